use crate::alpha::Alpha;
use crate::error::{Error, Result};
use crate::jacobi::JacobiParams;

use super::{build_expansion, expansion_order, AsymptoticExpansion};

/// First seeding index of the backward recurrence.
pub const N_START_INIT: usize = 64;

/// Largest seeding index before giving up.
pub const N_START_CAP: usize = 1_000_000;

/// Rows whose parameters are cached by [`SecularSolver`].
const CACHE_ROWS: usize = 1 << 12;

/// Doublings without improvement after which the agreement is taken as roundoff.
const STALL_LIMIT: u32 = 3;

/// Largest roundoff floor accepted in place of the requested tolerance.
const FLOOR_LIMIT: f64 = 1e-4;

/// Magnitude at which the backward sweep rescales its values.
const RESCALE_AT: f64 = 1e200;

/// The decaying solution `x_{alpha,s}` sampled at `n = 1..=N_start + 1`.
///
/// Values are stored in the scaled form `u(n) = x(n) n^{1/2+s}`, which tends
/// to 1 and never under- or overflows for large `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedSolution {
    pub alpha: Alpha,
    pub s: f64,
    pub lam: f64,
    pub n_start: usize,
    pub order: usize,
    /// `u(1..=n_start+1)` at index `n - 1`, up to the factor `10^{-200 rescales}`.
    pub scaled: Vec<f64>,
    /// Number of times the sweep was rescaled by `1e-200`.
    pub rescales: u32,
    /// `|C_k(k)| N_start^{-2k}`: relative defect of the seed rows.
    pub tail_residual: f64,
    /// Change of the direction of `(x(1), x(2))` between the last two seeding
    /// indices, each normalized by the largest of `|x(1)|`, `|x(2)|` and the
    /// terms of row 2 that determine `x(1)`.
    pub agreement: f64,
}

impl GeneralizedSolution {
    /// `x(n)` (in the stored normalization).
    pub fn value(&self, n: usize) -> f64 {
        assert!(n >= 1 && n <= self.scaled.len());
        let nf = n as f64;
        self.scaled[n - 1] * (-(0.5 + self.s) * nf.ln()).exp()
    }

    /// `x(n) n^{1/2+s}` (in the stored normalization).
    pub fn scaled_value(&self, n: usize) -> f64 {
        self.scaled[n - 1]
    }

    /// `x(1..=N_start+1)`.
    pub fn values(&self) -> Vec<f64> {
        (1..=self.scaled.len()).map(|n| self.value(n)).collect()
    }

    /// Largest scaled residual of the recurrence over rows `2..=N_start`,
    /// each row divided by the sum of the moduli of its three terms.
    pub fn interior_residual(&self) -> f64 {
        let p = JacobiParams::new(self.alpha);
        let x = self.values();
        let mut worst = 0.0f64;
        for n in 2..self.scaled.len() {
            let k = n as u64;
            let t = [
                p.a(k - 1) * x[n - 2],
                (p.b(k) - self.lam) * x[n - 1],
                p.a(k) * x[n],
            ];
            let scale: f64 = t.iter().map(|v| v.abs()).sum();
            if scale > 0.0 {
                worst = worst.max((t[0] + t[1] + t[2]).abs() / scale);
            }
        }
        worst
    }

    /// `b(1) x(1) + a(1) x(2) - lambda x(1)`, divided by `max(|x(1)|, |x(2)|)`.
    pub fn boundary_defect(&self) -> f64 {
        let p = JacobiParams::new(self.alpha);
        let x1 = self.value(1);
        let x2 = self.value(2);
        (p.b(1) * x1 + p.a(1) * x2 - self.lam * x1) / x1.abs().max(x2.abs())
    }
}

/// Per-`alpha` cache of the Jacobi parameters used by the backward recurrence.
#[derive(Debug, Clone)]
pub struct SecularSolver {
    params: JacobiParams,
    a: Vec<f64>,
    log_n: Vec<f64>,
}

impl SecularSolver {
    pub fn new(alpha: Alpha) -> Self {
        let params = JacobiParams::new(alpha);
        let rows = 1..=CACHE_ROWS as u64 + 1;
        SecularSolver {
            params,
            a: rows.clone().map(|n| params.a(n)).collect(),
            log_n: rows.map(|n| (n as f64).ln()).collect(),
        }
    }

    pub fn alpha(&self) -> Alpha {
        self.params.alpha
    }

    fn a(&self, n: usize) -> f64 {
        self.a.get(n - 1).copied().unwrap_or_else(|| self.params.a(n as u64))
    }

    fn log_n(&self, n: usize) -> f64 {
        self.log_n.get(n - 1).copied().unwrap_or_else(|| (n as f64).ln())
    }

    /// `f_{alpha,s}(1/n) - lambda = n^{1/2+s} ((J_alpha - lambda) n^{-1/2-s})(n)`, `n >= 2`.
    ///
    /// Far from the origin the Taylor coefficients `diagonal` are summed
    /// (convergence radius `min(1, 2 sin(pi / (2 alpha)))`); closer in, the
    /// closed form is evaluated through `expm1`/`log1p`.
    fn defect(&self, s: f64, lam: f64, diagonal: &[f64], n: usize) -> f64 {
        let a = self.alpha().get();
        let radius = if a <= 1.0 {
            1.0
        } else {
            2.0 * (std::f64::consts::FRAC_PI_2 / a).sin()
        };
        let z = 1.0 / n as f64;
        if z <= 0.25 * radius {
            let z2 = z * z;
            return diagonal[1..].iter().rev().fold(0.0, |acc, c| acc * z2 + c) * z2;
        }
        let q = |g: f64, w: f64| -(g * w.ln_1p()).exp_m1();
        let f = (q(a - s, -z) / q(2.0 * a, -z) - q(a - s, z) / q(2.0 * a, z)) / z;
        f - lam
    }

    /// Runs the three-term recurrence backward from the seeds
    /// `u(N) = u_n`, `u(N) - u(N+1) = step_n`, for the scaled unknown
    /// `u(n) = x(n) n^{1/2+s}`, in difference form:
    ///
    /// ```text
    /// d(n-1) = r(n) d(n) - ((n-1)/n)^p g(n) u(n) / a(n-1),   u(n-1) = u(n) + d(n-1),
    /// ```
    ///
    /// with `p = 1/2 + s`, `d(n) = u(n) - u(n+1)`,
    /// `r(n) = a(n) (n/(n+1))^p ((n-1)/n)^p / a(n-1)` and `g(n) = f_{alpha,s}(1/n) - lambda`.
    /// Both solutions of the recurrence are nearly constant in this scaling, so
    /// the direct form cancels to leading order; the difference form does not.
    ///
    /// Returns `u(1..=N+1)` and the number of `1e-200` rescalings.
    fn sweep(&self, expansion: &AsymptoticExpansion, n_start: usize, u_n: f64, step_n: f64) -> (Vec<f64>, u32) {
        assert!(n_start >= 2);
        let s = expansion.s;
        let lam = expansion.lam;
        let p = 0.5 + s;
        let mut u = vec![0.0; n_start + 1];
        u[n_start] = u_n - step_n;
        u[n_start - 1] = u_n;
        let mut d = step_n;
        let mut rescales = 0;
        for n in (2..=n_start).rev() {
            let ln = self.log_n(n);
            let up = (p * (ln - self.log_n(n + 1))).exp();
            let down = (p * (self.log_n(n - 1) - ln)).exp();
            let inv_prev = 1.0 / self.a(n - 1);
            let g = self.defect(s, lam, &expansion.diagonal, n);
            d = self.a(n) * up * down * inv_prev * d - down * g * inv_prev * u[n - 1];
            let next = u[n - 1] + d;
            u[n - 2] = next;
            if next.abs() > RESCALE_AT {
                for v in &mut u[n - 2..] {
                    *v /= RESCALE_AT;
                }
                d /= RESCALE_AT;
                rescales += 1;
            }
        }
        (u, rescales)
    }

    /// Backward recurrence from arbitrary seeds `u(N+1) = seed_upper`, `u(N) = seed_lower`
    /// (scaled values, see [`GeneralizedSolution`]).
    pub fn backward(&self, s: f64, n_start: usize, seed_upper: f64, seed_lower: f64) -> Result<(Vec<f64>, u32)> {
        let expansion = build_expansion(self.alpha(), s, 1)?;
        Ok(self.sweep(&expansion, n_start, seed_lower, seed_lower - seed_upper))
    }

    fn seeded(&self, expansion: &AsymptoticExpansion, n_start: usize) -> (Vec<f64>, u32) {
        let nf = n_start as f64;
        self.sweep(expansion, n_start, expansion.eval_scaled(nf), expansion.eval_scaled_step(nf))
    }

    /// The decaying solution for `0 < s < alpha`.
    ///
    /// Seeds from the asymptotic expansion at `N_start = 64, 128, ...` until
    /// two successive runs agree at `n = 1, 2` to relative `tol`.
    ///
    /// For larger `alpha` the companion solution can grow faster than the
    /// decaying one on `n < alpha` when running backward, which amplifies
    /// roundoff to a floor of up to ~1e-10 that no `N_start` removes. When the
    /// agreement has stopped improving for three doublings and is below 1e-4,
    /// that floor is accepted; the achieved value is kept in `agreement`.
    pub fn solve_generalized(&self, s: f64, tol: f64) -> Result<GeneralizedSolution> {
        let alpha = self.alpha();
        if !(s > 0.0 && s < alpha.get()) {
            return Err(Error::domain(format!(
                "spectral parameter s = {s} outside (0, {alpha})"
            )));
        }
        let order = expansion_order(alpha, s);
        let expansion = build_expansion(alpha, s, order)?;
        let ck = expansion.residual_coefficient(order).abs();

        // Direction of (x(1), x(2)); the overall scale of x is irrelevant to W.
        // x(1) is measured against the terms of row 2 that cancel in it.
        let lam = alpha.lambda_of(s);
        let (a1, a2, b2) = (self.a(1), self.a(2), self.params.b(2));
        let head = |u: &[f64]| {
            let x2 = u[1] * (-(0.5 + s) * 2f64.ln()).exp();
            let x3 = u[2] * (-(0.5 + s) * 3f64.ln()).exp();
            let terms = ((lam - b2) * x2).abs() + (a2 * x3).abs();
            let scale = u[0].abs().max(x2.abs()).max(terms / a1.abs());
            (u[0] / scale, x2 / scale)
        };

        let mut n_start = N_START_INIT;
        let (mut prev, _) = self.seeded(&expansion, n_start);
        let mut best = f64::INFINITY;
        let mut stalled = 0;
        loop {
            let next_start = 2 * n_start;
            if next_start > N_START_CAP {
                return Err(Error::no_convergence(
                    "backward recurrence",
                    format!("alpha = {alpha}, s = {s}: N_start exceeded {N_START_CAP}"),
                ));
            }
            let (cur, cur_rescales) = self.seeded(&expansion, next_start);
            let (p1, p2) = head(&prev);
            let (c1, c2) = head(&cur);
            let agreement = (p1 - c1).abs().max((p2 - c2).abs());
            if agreement < 0.5 * best {
                best = agreement;
                stalled = 0;
            } else {
                stalled += 1;
            }
            let at_floor = stalled >= STALL_LIMIT && agreement <= FLOOR_LIMIT;
            if agreement <= tol || at_floor {
                let nf = next_start as f64;
                return Ok(GeneralizedSolution {
                    alpha,
                    s,
                    lam: alpha.lambda_of(s),
                    n_start: next_start,
                    order,
                    scaled: cur,
                    rescales: cur_rescales,
                    tail_residual: ck * nf.powf(-2.0 * order as f64),
                    agreement,
                });
            }
            n_start = next_start;
            prev = cur;
        }
    }

    /// Secular function `W(s)`; its zeros in `(0, alpha)` are the eigenvalues
    /// `(alpha^2 - s^2) / (2 alpha)` of `J_alpha`.
    pub fn secular(&self, s: f64, tol: f64) -> Result<f64> {
        Ok(self.solve_generalized(s, tol)?.boundary_defect())
    }
}

/// See [`SecularSolver::solve_generalized`].
pub fn solve_generalized(alpha: Alpha, s: f64, tol: f64) -> Result<GeneralizedSolution> {
    SecularSolver::new(alpha).solve_generalized(s, tol)
}

/// See [`SecularSolver::secular`].
pub fn secular(alpha: Alpha, s: f64, tol: f64) -> Result<f64> {
    SecularSolver::new(alpha).secular(s, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha(v: f64) -> Alpha {
        Alpha::new(v).unwrap()
    }

    #[test]
    fn interior_rows_hold() {
        for (a, s) in [(2.0, 1.0), (0.5, 0.2), (12.0, 3.0), (50.0, 40.0), (50.0, 0.5)] {
            let sol = solve_generalized(alpha(a), s, 1e-12).unwrap();
            let r = sol.interior_residual();
            assert!(r <= 1e-11, "{a} {s}: {r}");
            assert!(sol.value(1).is_finite());
        }
    }

    #[test]
    fn asymptotic_rate() {
        for (a, s) in [(2.0, 1.0), (5.0, 2.5)] {
            let sol = solve_generalized(alpha(a), s, 1e-13).unwrap();
            assert_eq!(sol.rescales, 0);
            let d50 = (sol.scaled_value(50) - 1.0).abs();
            let d100 = (sol.scaled_value(100) - 1.0).abs();
            let ratio = d50 / d100;
            assert!((3.2..=4.8).contains(&ratio), "{a} {s}: {ratio}");
        }
    }

    #[test]
    fn near_endpoint_matches_seed() {
        let (a, s) = (alpha(0.5), 0.5 - 1e-3);
        let sol = solve_generalized(a, s, 1e-12).unwrap();
        let e = build_expansion(a, s, sol.order).unwrap();
        let n = sol.n_start;
        assert!(sol.values().iter().all(|v| v.is_finite()));
        assert!((sol.value(n) - e.eval(n as u64)).abs() <= 1e-10 * e.eval(n as u64));
    }

    #[test]
    fn miller_stability() {
        // The scale of x is arbitrary, so stability is measured on the shape x(1)/x(2).
        for a in [0.5, 1.0, 3.0, 12.0, 50.0] {
            let solver = SecularSolver::new(alpha(a));
            // away from the band edge s = 0, where the backward damping N^{-2s} is lost
            for s in [0.2 * a, 0.5 * a, 0.9 * a] {
                let n = solver.solve_generalized(s, 1e-12).unwrap().n_start;
                let e = build_expansion(alpha(a), s, 3).unwrap();
                let (hi, lo) = (e.eval_scaled(n as f64 + 1.0), e.eval_scaled(n as f64));
                let shape = |u: &[f64]| u[0] / u[1];
                let (base, _) = solver.backward(s, n, hi, lo).unwrap();
                for (dh, dl) in [(1e-8, -1e-8), (1e-8, 0.0), (0.0, -1e-8)] {
                    let (pert, _) = solver.backward(s, n, hi * (1.0 + dh), lo * (1.0 + dl)).unwrap();
                    let change = (shape(&pert) / shape(&base) - 1.0).abs();
                    assert!(change < 1e-6, "{a} {s}: {change}");
                }
            }
        }
    }

    #[test]
    fn secular_endpoint_and_domain() {
        // at s = alpha the solution is n^{-1/2-alpha}, which satisfies the first row with value 1
        let w = secular(alpha(2.0), 2.0 - 1e-9, 1e-12).unwrap();
        assert!((w - 1.0).abs() < 1e-6, "{w}");
        assert!(secular(alpha(2.0), 0.0, 1e-12).is_err());
        assert!(secular(alpha(2.0), 2.0, 1e-12).is_err());
    }

    #[test]
    fn secular_sign_pattern() {
        let solver = SecularSolver::new(alpha(0.5));
        for i in 1..100 {
            let s = 0.5 * i as f64 / 100.0;
            assert!(solver.secular(s, 1e-12).unwrap() > 0.0, "{s}");
        }
        let solver = SecularSolver::new(alpha(4.0));
        let vals: Vec<f64> = (1..200).map(|i| solver.secular(4.0 * i as f64 / 200.0, 1e-12).unwrap()).collect();
        assert!(vals.windows(2).any(|w| w[0] * w[1] < 0.0));
    }
}
