//! Point spectrum of `K_alpha` above the band `[0, 2/alpha]`: roots of the
//! secular function, the truncation cross-check, counting, the norm, the
//! rescaled sweep over `alpha` and the emergence threshold of the first eigenvalue.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alpha::Alpha;
use crate::asymptotics::SecularSolver;
use crate::error::{Error, Result};
use crate::kernel::TruncatedKernel;

/// Default truncation order of the cross-check.
pub const DEFAULT_TRUNC_N: usize = 4000;

/// Default root tolerance in `s`.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Oracle gap above which a report carries a warning.
pub const ORACLE_WARN: f64 = 1e-3;

/// Agreement asked of the backward recurrence at each secular evaluation.
const SOLVER_TOL: f64 = 1e-12;

/// Bracket width in `s` below which a non-converging solve ends the bisection.
/// At roots whose eigenvector nearly vanishes at `n = 1, 2` the head of the
/// decaying solution is lost to roundoff in a window of about 1e-11.
const BISECT_FLOOR: f64 = 1e-9;

/// Root tolerance in `s` behind [`operator_norm`].
pub const NORM_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenpair {
    pub s: f64,
    #[serde(rename = "lambda_J")]
    pub lambda_j: f64,
    #[serde(rename = "lambda_K")]
    pub lambda_k: f64,
}

impl Eigenpair {
    pub fn from_s(alpha: Alpha, s: f64) -> Self {
        let lambda_j = alpha.lambda_of(s);
        Eigenpair {
            s,
            lambda_j,
            lambda_k: 1.0 / lambda_j,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub alpha: f64,
    pub ac_band: [f64; 2],
    /// Ordered by decreasing `lambda_K`.
    pub eigenvalues: Vec<Eigenpair>,
    pub count: usize,
    /// `max_j |lambda_K_j - lambda_j(K^{(N)})|`; 0 without eigenvalues, `null` when not computed.
    pub oracle_gap: Option<f64>,
    pub warnings: Vec<String>,
}

impl SpectrumReport {
    pub fn has_warnings(&self) -> bool {
        !self.warnings.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.eigenvalues
            .first()
            .map(|e| e.lambda_k)
            .unwrap_or(self.ac_band[1])
    }
}

/// Settings for [`find_eigenvalues_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumOptions {
    /// Bisection stops once the bracket in `s` is below `tol`.
    pub tol: f64,
    /// Truncation order of the cross-check.
    pub trunc_n: usize,
    /// Whether to run the truncation cross-check.
    pub oracle: bool,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions {
            tol: DEFAULT_TOL,
            trunc_n: DEFAULT_TRUNC_N,
            oracle: true,
        }
    }
}

/// Scan grid over `(eps, alpha - eps)` with step `min(alpha/400, 0.02)`,
/// `eps = min(1e-4, alpha 1e-4)`.
pub fn scan_grid(alpha: Alpha) -> Vec<f64> {
    let a = alpha.get();
    let eps = (1e-4f64).min(a * 1e-4);
    let step = (a / 400.0).min(0.02);
    let (lo, hi) = (eps, a - eps);
    let pieces = ((hi - lo) / step).ceil().max(1.0) as usize;
    (0..=pieces)
        .map(|i| lo + (hi - lo) * i as f64 / pieces as f64)
        .collect()
}

fn bisect_root(solver: &SecularSolver, mut lo: f64, mut hi: f64, mut f_lo: f64, tol: f64) -> Result<f64> {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = match solver.secular(mid, SOLVER_TOL) {
            Ok(v) => v,
            Err(Error::NonConvergence { .. }) if hi - lo <= BISECT_FLOOR => break,
            Err(e) => return Err(e),
        };
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Roots of the secular function in `(0, alpha)`, increasing in `s`.
pub fn secular_roots(alpha: Alpha, tol: f64) -> Result<Vec<f64>> {
    if !(tol > 0.0) {
        return Err(Error::domain("root tolerance must be positive"));
    }
    let solver = SecularSolver::new(alpha);
    let grid = scan_grid(alpha);
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&s| solver.secular(s, SOLVER_TOL))
        .collect::<Result<_>>()?;
    let brackets: Vec<usize> = (0..grid.len() - 1)
        .filter(|&i| values[i] != 0.0 && (values[i] < 0.0) != (values[i + 1] < 0.0))
        .collect();
    let mut roots: Vec<f64> = grid
        .iter()
        .zip(&values)
        .filter(|(_, v)| **v == 0.0)
        .map(|(s, _)| *s)
        .collect();
    let refined: Vec<f64> = brackets
        .par_iter()
        .map(|&i| bisect_root(&solver, grid[i], grid[i + 1], values[i], tol))
        .collect::<Result<_>>()?;
    roots.extend(refined);
    roots.sort_by(|a, b| a.total_cmp(b));
    Ok(roots)
}

/// Eigenvalues of `K_alpha` above the band, with a truncation cross-check.
pub fn find_eigenvalues_with(alpha: Alpha, opts: SpectrumOptions) -> Result<SpectrumReport> {
    let roots = secular_roots(alpha, opts.tol)?;
    // largest s gives the largest lambda_K
    let eigenvalues: Vec<Eigenpair> = roots.iter().rev().map(|&s| Eigenpair::from_s(alpha, s)).collect();
    let band_top = alpha.band_top();
    let mut warnings = Vec::new();
    let mut oracle_gap = None;
    if opts.oracle {
        if opts.trunc_n < 2 {
            return Err(Error::Config(format!("truncation order must be >= 2, got {}", opts.trunc_n)));
        }
        let m = (eigenvalues.len() + 1).min(opts.trunc_n);
        let trunc = TruncatedKernel::new(alpha, opts.trunc_n)?.top_eigenvalues(m)?;
        let gap = eigenvalues
            .iter()
            .zip(&trunc)
            .map(|(e, t)| (e.lambda_k - t).abs())
            .fold(0.0, f64::max);
        if gap > ORACLE_WARN {
            warnings.push(format!(
                "alpha = {alpha}: truncation N = {} differs from the secular eigenvalues by {gap:.3e}",
                opts.trunc_n
            ));
        }
        if let Some(next) = trunc.get(eigenvalues.len()) {
            if *next > band_top + ORACLE_WARN {
                warnings.push(format!(
                    "alpha = {alpha}: truncation has eigenvalue {next:.6} above the band beyond the {} found",
                    eigenvalues.len()
                ));
            }
        }
        oracle_gap = Some(gap);
    }
    for e in &eigenvalues {
        if !(e.lambda_k > band_top) {
            warnings.push(format!("alpha = {alpha}: eigenvalue {} not above the band", e.lambda_k));
        }
    }
    Ok(SpectrumReport {
        alpha: alpha.get(),
        ac_band: [0.0, band_top],
        count: eigenvalues.len(),
        eigenvalues,
        oracle_gap,
        warnings,
    })
}

/// [`find_eigenvalues_with`] at tolerance `tol` and the default truncation.
pub fn find_eigenvalues(alpha: Alpha, tol: f64) -> Result<SpectrumReport> {
    find_eigenvalues_with(
        alpha,
        SpectrumOptions {
            tol,
            ..Default::default()
        },
    )
}

/// `N(K_alpha)`, the number of eigenvalues above the band.
pub fn count_eigenvalues(alpha: Alpha) -> Result<usize> {
    Ok(secular_roots(alpha, 1e-6)?.len())
}

/// `||K_alpha||`: the top eigenvalue if there is one, else `2/alpha`.
pub fn operator_norm(alpha: Alpha) -> Result<f64> {
    Ok(secular_roots(alpha, NORM_TOL)?
        .last()
        .map(|&s| 1.0 / alpha.lambda_of(s))
        .unwrap_or(alpha.band_top()))
}

/// Lower bound on `N(K_alpha)`: the number of integers `k >= 1` with `k < alpha/4`.
pub fn counting_lower_bound(alpha: Alpha) -> usize {
    let q = alpha.get() / 4.0;
    let c = q.ceil() as usize;
    c.saturating_sub(1)
}

/// One grid point of the rescaled spectrum `alpha K_alpha`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    /// Top of the rescaled band, always 2.
    pub band_top: f64,
    pub count: usize,
    /// `alpha lambda_K_j`, decreasing.
    pub eigenvalues: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Grid `alpha_min + i step` up to `alpha_max` (inclusive up to rounding).
pub fn sweep_grid(alpha_min: f64, alpha_max: f64, step: f64) -> Result<Vec<f64>> {
    if !(alpha_min > 0.0 && alpha_max > alpha_min && step > 0.0 && alpha_max.is_finite()) {
        return Err(Error::Config(format!(
            "sweep needs 0 < min < max and step > 0, got ({alpha_min}, {alpha_max}, {step})"
        )));
    }
    let pieces = ((alpha_max - alpha_min) / step + 1e-9).floor() as usize;
    Ok((0..=pieces).map(|i| alpha_min + step * i as f64).collect())
}

fn sweep_row(a: f64, opts: SpectrumOptions) -> SweepRow {
    let row = Alpha::new(a).and_then(|alpha| find_eigenvalues_with(alpha, opts));
    match row {
        Ok(r) => SweepRow {
            alpha: a,
            band_top: 2.0,
            count: r.count,
            eigenvalues: r.eigenvalues.iter().map(|e| a * e.lambda_k).collect(),
            warnings: r.warnings,
        },
        Err(e) => SweepRow {
            alpha: a,
            band_top: 2.0,
            count: 0,
            eigenvalues: Vec::new(),
            warnings: vec![format!("alpha = {a}: {e}")],
        },
    }
}

/// Rescaled spectra over an `alpha` grid; rows are evaluated in parallel and
/// returned in grid order. A failing row is reported in its warnings.
pub fn sweep_with(alpha_min: f64, alpha_max: f64, step: f64, opts: SpectrumOptions) -> Result<Vec<SweepRow>> {
    let grid = sweep_grid(alpha_min, alpha_max, step)?;
    Ok(grid.par_iter().map(|&a| sweep_row(a, opts)).collect())
}

pub fn sweep(alpha_min: f64, alpha_max: f64, step: f64, tol: f64) -> Result<Vec<SweepRow>> {
    sweep_with(
        alpha_min,
        alpha_max,
        step,
        SpectrumOptions {
            tol,
            ..Default::default()
        },
    )
}

/// The `alpha` in `(1, 2)` at which the first eigenvalue leaves the band,
/// located by bisection on `N(K_alpha) >= 1` to width `tol`.
pub fn threshold_alpha1(tol: f64) -> Result<f64> {
    let tol = tol.max(1e-9);
    let has_eig = |a: f64| -> Result<bool> { Ok(count_eigenvalues(Alpha::new(a)?)? >= 1) };
    let (mut lo, mut hi) = (1.0, 2.0);
    if has_eig(lo)? || !has_eig(hi)? {
        return Err(Error::Inconsistent(
            "the first eigenvalue does not emerge inside (1, 2)".into(),
        ));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if has_eig(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One Richardson step in `1/N` from truncations of order `N` and `2N`.
pub fn richardson(coarse: f64, fine: f64) -> f64 {
    2.0 * fine - coarse
}

/// Secular eigenvalues against truncations of order `n` and `2n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleComparison {
    pub alpha: f64,
    pub secular: Vec<f64>,
    pub coarse: Vec<f64>,
    pub fine: Vec<f64>,
    pub extrapolated: Vec<f64>,
    /// `max_j |secular_j - extrapolated_j|`.
    pub max_error: f64,
}

pub fn compare_oracles(alpha: Alpha, n: usize, tol: f64) -> Result<OracleComparison> {
    let roots = secular_roots(alpha, tol)?;
    let secular: Vec<f64> = roots.iter().rev().map(|&s| 1.0 / alpha.lambda_of(s)).collect();
    let m = secular.len();
    let (coarse, fine) = if m == 0 {
        (Vec::new(), Vec::new())
    } else {
        (
            TruncatedKernel::new(alpha, n)?.top_eigenvalues(m)?,
            TruncatedKernel::new(alpha, 2 * n)?.top_eigenvalues(m)?,
        )
    };
    let extrapolated: Vec<f64> = coarse.iter().zip(&fine).map(|(c, f)| richardson(*c, *f)).collect();
    let max_error = secular
        .iter()
        .zip(&extrapolated)
        .map(|(s, e)| (s - e).abs())
        .fold(0.0, f64::max);
    Ok(OracleComparison {
        alpha: alpha.get(),
        secular,
        coarse,
        fine,
        extrapolated,
        max_error,
    })
}
