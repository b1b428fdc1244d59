//! Invariant suites behind `verify`.

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::alpha::Alpha;
use crate::asymptotics::{f_taylor, TruncatedSeries};
use crate::error::Result;
use crate::jacobi::{default_check_rows, inverse_residual, TridiagonalWindow};
use crate::kernel::{integral_form, quadratic_form};
use crate::rkt::{em_upper_bound, f_sequence, rkt_decision};
use crate::special::zeta;
use crate::spectrum::{compare_oracles, operator_norm, SpectrumOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Quick,
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub alpha: f64,
    pub level: Level,
    pub checks: Vec<Check>,
    pub pass: bool,
}

/// `value <= bound`, or a failed check carrying the error.
fn check(name: &str, bound: f64, value: Result<f64>) -> Check {
    match value {
        Ok(v) => Check {
            name: name.into(),
            value: v,
            bound,
            pass: v <= bound,
            error: None,
        },
        Err(e) => Check {
            name: name.into(),
            value: f64::NAN,
            bound,
            pass: false,
            error: Some(e.to_string()),
        },
    }
}

fn inverse_identity(alpha: Alpha) -> Result<f64> {
    let mut worst = 0.0f64;
    for j in [1, 3, 10] {
        worst = worst.max(inverse_residual(alpha, j, default_check_rows(j))?);
    }
    Ok(worst)
}

/// Relative gap between the double sum and the integral form on random supports.
fn form_identity(alpha: Alpha, supports: usize) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst = 0.0f64;
    for _ in 0..supports {
        let len = rng.gen_range(2..=12);
        let x: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let q = quadratic_form(alpha, &x);
        let i = integral_form(alpha, &x, 1e-11)?;
        worst = worst.max((q - i).abs() / q.abs());
    }
    Ok(worst)
}

/// Distance of `||K_alpha||` outside `[max(2/a, zeta(1+2a)), max(2/a, zeta(1+a))]`.
fn norm_sandwich(alpha: Alpha) -> Result<f64> {
    let a = alpha.get();
    let norm = operator_norm(alpha)?;
    let lo = alpha.band_top().max(zeta(1.0 + 2.0 * a, 1e-14)?);
    let hi = alpha.band_top().max(zeta(1.0 + a, 1e-14)?);
    Ok((lo - norm).max(norm - hi).max(0.0))
}

/// Eigenvalues of a `J_alpha` window below 0.
fn sturm_positivity(alpha: Alpha) -> f64 {
    TridiagonalWindow::new(alpha, 400).sturm_count(0.0) as f64
}

fn taylor_checks(alpha: Alpha) -> Result<(f64, f64)> {
    let a = alpha.get();
    let mut odd = 0.0f64;
    let mut c0 = 0.0f64;
    for beta in [0.0, 0.5 * a, a, 2.0 * a + 1.0] {
        let f = f_taylor(alpha, beta, 20)?;
        odd = (1..=20).step_by(2).map(|i| f.coeff(i).abs()).fold(odd, f64::max);
        c0 = c0.max((f.coeff(0) - (a * a - beta * beta) / (2.0 * a)).abs());
    }
    Ok((odd, c0))
}

fn series_round_trip() -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let g = TruncatedSeries::new((0..=20).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let mut hc: Vec<f64> = (0..=20).map(|_| rng.gen_range(-0.5..0.5)).collect();
        hc[0] = rng.gen_range(1.0..2.0);
        let h = TruncatedSeries::new(hc);
        let back = (&g * &h).div(&h)?;
        worst = (0..=20).map(|i| (back.coeff(i) - g.coeff(i)).abs()).fold(worst, f64::max);
    }
    Ok(worst)
}

/// Largest excess of `F(n)` over its Euler–Maclaurin bound on a 10 x 10 grid
/// with `1 <= alpha - beta <= 2` and `n <= 1000`.
fn em_inequality() -> Result<f64> {
    let mut worst = f64::NEG_INFINITY;
    for i in 0..10 {
        for j in 0..10 {
            let beta = 0.1 + 0.3 * i as f64;
            let a = Alpha::new(beta + 1.0 + j as f64 / 9.0)?;
            for n in [1, 2, 3, 5, 10, 30, 100, 300, 1000] {
                worst = worst.max(f_sequence(a, beta, n)? - em_upper_bound(a, beta, n));
            }
        }
    }
    Ok(worst)
}

/// Runs the suites for `alpha`; `Full` adds the two-oracle agreement and the RKT verdict.
pub fn run_verify(alpha: Alpha, level: Level, opts: SpectrumOptions) -> VerifyReport {
    let mut checks = vec![
        check("inverse_identity", 1e-9, inverse_identity(alpha)),
        check(
            "form_identity",
            1e-8,
            form_identity(alpha, if level == Level::Full { 20 } else { 5 }),
        ),
        check("norm_bounds", 1e-6, norm_sandwich(alpha)),
        check("sturm_positivity", 0.0, Ok(sturm_positivity(alpha))),
        check("series_round_trip", 1e-13, series_round_trip()),
        check("em_inequality", 1e-12, em_inequality()),
    ];
    match taylor_checks(alpha) {
        Ok((odd, c0)) => {
            checks.push(check("f_evenness", 1e-12, Ok(odd)));
            checks.push(check("constant_term", 1e-13, Ok(c0)));
        }
        Err(e) => checks.push(check("f_taylor", 0.0, Err(e))),
    }
    if level == Level::Full {
        let half = (opts.trunc_n / 2).max(2);
        checks.push(check(
            "two_oracle_agreement",
            1e-4,
            compare_oracles(alpha, half, opts.tol).map(|c| c.max_error),
        ));
        checks.push(check(
            "rkt_consistency",
            0.0,
            rkt_decision(alpha).map(|r| if r.holds == (r.count == 0) { 0.0 } else { 1.0 }),
        ));
    }
    let pass = checks.iter().all(|c| c.pass);
    VerifyReport {
        alpha: alpha.get(),
        level,
        checks,
        pass,
    }
}
