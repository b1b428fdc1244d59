//! The Jacobi matrix `J_alpha` inverting `K_alpha`: its parameters, row
//! application, the factorized form and eigenvalue counting for truncations.

use crate::alpha::Alpha;
use crate::error::{Error, Result};
use crate::kernel::{kernel_entry, TruncatedKernel};
use crate::linalg;

/// Parameter rules `a_alpha(n)`, `b_alpha(n)`, `c_alpha(n)`.
///
/// The production evaluators avoid both overflow of `n^{2 alpha}` and the
/// cancellation in `n^{2 alpha} - (n-1)^{2 alpha}` by working with the scaled
/// quantity `n^{2 alpha + 1} c(n) = n / (1 - (1 - 1/n)^{2 alpha})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiParams {
    pub alpha: Alpha,
}

impl JacobiParams {
    pub fn new(alpha: Alpha) -> Self {
        JacobiParams { alpha }
    }

    fn two_alpha(&self) -> f64 {
        2.0 * self.alpha.get()
    }

    /// `n^{2 alpha + 1} c_alpha(n)`.
    pub fn scaled_c(&self, n: u64) -> f64 {
        assert!(n >= 1);
        if n == 1 {
            return 1.0;
        }
        let nf = n as f64;
        nf / -(self.two_alpha() * (-1.0 / nf).ln_1p()).exp_m1()
    }

    /// `c_alpha(n) = 1 / (n^{2 alpha} - (n-1)^{2 alpha})`; underflows to 0 for huge `n^{2 alpha}`.
    pub fn c(&self, n: u64) -> f64 {
        self.scaled_c(n) * (-(self.two_alpha() + 1.0) * (n as f64).ln()).exp()
    }

    /// Off-diagonal `a_alpha(n) = -sqrt(n(n+1)) / (2 sinh(alpha log(1 + 1/n)))`.
    pub fn a(&self, n: u64) -> f64 {
        assert!(n >= 1);
        let nf = n as f64;
        -(nf * (nf + 1.0)).sqrt() / (2.0 * (self.alpha.get() * (1.0 / nf).ln_1p()).sinh())
    }

    /// Diagonal `b_alpha(n) = n / (1 - (1 - 1/n)^{2 alpha}) + n / ((1 + 1/n)^{2 alpha} - 1)`.
    pub fn b(&self, n: u64) -> f64 {
        assert!(n >= 1);
        let nf = n as f64;
        self.scaled_c(n) + nf / (self.two_alpha() * (1.0 / nf).ln_1p()).exp_m1()
    }

    /// `a_alpha(n)` from the raw power formula, without any cancellation control.
    pub fn a_literal(&self, n: u64) -> f64 {
        let (nf, e) = (n as f64, self.alpha.get() + 0.5);
        nf.powf(e) * (nf + 1.0).powf(e) / (nf.powf(self.two_alpha()) - (nf + 1.0).powf(self.two_alpha()))
    }

    /// `b_alpha(n)` from the raw power formula.
    pub fn b_literal(&self, n: u64) -> f64 {
        let nf = n as f64;
        let p = |x: f64| x.powf(self.two_alpha());
        nf.powf(self.two_alpha() + 1.0) * (p(nf + 1.0) - p(nf - 1.0))
            / ((p(nf + 1.0) - p(nf)) * (p(nf) - p(nf - 1.0)))
    }

    /// `c_alpha(n)` from the raw power formula.
    pub fn c_literal(&self, n: u64) -> f64 {
        let nf = n as f64;
        1.0 / (nf.powf(self.two_alpha()) - (nf - 1.0).powf(self.two_alpha()))
    }

    /// `a_alpha(n) = -n^{alpha+1/2} (n+1)^{alpha+1/2} c_alpha(n+1)`, evaluated stably.
    pub fn a_from_c(&self, n: u64) -> f64 {
        let r = (n as f64 / (n as f64 + 1.0)).ln();
        -(r * (self.alpha.get() + 0.5)).exp() * self.scaled_c(n + 1)
    }

    /// `b_alpha(n) = n^{2 alpha + 1} (c_alpha(n) + c_alpha(n+1))`, evaluated stably.
    pub fn b_from_c(&self, n: u64) -> f64 {
        let r = (n as f64 / (n as f64 + 1.0)).ln();
        self.scaled_c(n) + (r * (self.two_alpha() + 1.0)).exp() * self.scaled_c(n + 1)
    }

    pub fn window(&self, order: usize) -> TridiagonalWindow {
        TridiagonalWindow::new(self.alpha, order)
    }
}

/// `(a_alpha(n), b_alpha(n), c_alpha(n))`.
pub fn jacobi_params(alpha: Alpha, n: u64) -> (f64, f64, f64) {
    let p = JacobiParams::new(alpha);
    (p.a(n), p.b(n), p.c(n))
}

/// The `N x N` truncation of `J_alpha`, materialized.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalWindow {
    pub alpha: Alpha,
    /// `a(1..N-1)`.
    pub off: Vec<f64>,
    /// `b(1..N)`.
    pub diag: Vec<f64>,
}

impl TridiagonalWindow {
    pub fn new(alpha: Alpha, order: usize) -> Self {
        let p = JacobiParams::new(alpha);
        TridiagonalWindow {
            alpha,
            off: (1..order as u64).map(|n| p.a(n)).collect(),
            diag: (1..=order as u64).map(|n| p.b(n)).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.diag.len()
    }

    /// Number of eigenvalues of the truncation strictly below `lam`.
    pub fn sturm_count(&self, lam: f64) -> usize {
        linalg::sturm_count(&self.diag, &self.off, lam)
    }

    /// `k`-th smallest eigenvalue (0-based).
    pub fn eigenvalue(&self, k: usize) -> f64 {
        linalg::tridiagonal_eigenvalue(&self.diag, &self.off, k)
    }
}

/// Number of eigenvalues of `window` strictly below `lam`.
pub fn sturm_count(window: &TridiagonalWindow, lam: f64) -> usize {
    window.sturm_count(lam)
}

/// Row `n >= 2` of `J_alpha x`: `a(n-1) x(n-1) + b(n) x(n) + a(n) x(n+1)`.
///
/// `x` is indexed from 1, i.e. `x[0]` holds `x(1)`, and must cover `n + 1`.
pub fn apply_jacobi(alpha: Alpha, x: &[f64], n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::Index(format!("interior rows start at n = 2, got {n}")));
    }
    if x.len() < n + 1 {
        return Err(Error::Index(format!(
            "row {n} needs x(n+1) but only {} values were given",
            x.len()
        )));
    }
    let p = JacobiParams::new(alpha);
    let k = n as u64;
    Ok(p.a(k - 1) * x[n - 2] + p.b(k) * x[n - 1] + p.a(k) * x[n])
}

/// Rows `1..=n_out` of `J_alpha x` by the three-term rule, `x` zero beyond its end.
pub fn apply_three_term(alpha: Alpha, x: &[f64], n_out: usize) -> Vec<f64> {
    let p = JacobiParams::new(alpha);
    let at = |i: usize| if i >= 1 && i <= x.len() { x[i - 1] } else { 0.0 };
    (1..=n_out)
        .map(|n| {
            let k = n as u64;
            let left = if n > 1 { p.a(k - 1) * at(n - 1) } else { 0.0 };
            left + p.b(k) * at(n) + p.a(k) * at(n + 1)
        })
        .collect()
}

/// Rows `1..=n_out` of `D(n^{alpha+1/2}) (I - S*) D(c_alpha) (I - S) D(n^{alpha+1/2}) x`,
/// `x` zero beyond its end.
///
/// Evaluated literally, factor by factor; returns a domain error when the
/// intermediate powers `n^{2 alpha + 1}` leave the floating-point range.
pub fn apply_factorized(params: &JacobiParams, x: &[f64], n_out: usize) -> Result<Vec<f64>> {
    let a = params.alpha.get();
    let len = n_out + 1;
    if (2.0 * a + 1.0) * (len as f64).ln() > 650.0 {
        return Err(Error::domain(format!(
            "factorized form overflows for alpha = {a} at n = {len}"
        )));
    }
    let at = |i: usize| if i < x.len() { x[i] } else { 0.0 };
    let weight: Vec<f64> = (1..=len).map(|n| (n as f64).powf(a + 0.5)).collect();
    // u = D(n^{alpha+1/2}) x, then v = D(c) (I - S) u
    let u: Vec<f64> = (0..len).map(|i| weight[i] * at(i)).collect();
    let v: Vec<f64> = (0..len)
        .map(|i| {
            let prev = if i > 0 { u[i - 1] } else { 0.0 };
            params.c_literal(i as u64 + 1) * (u[i] - prev)
        })
        .collect();
    // (I - S*) v, then D(n^{alpha+1/2})
    Ok((0..n_out).map(|i| weight[i] * (v[i] - v[i + 1])).collect())
}

/// `max_{n <= n_check} |(J_alpha K_alpha e_j)(n) - e_j(n)|`.
///
/// The column `K_alpha e_j` is the explicit sequence `k_alpha(., j)`; since
/// `J_alpha` is tridiagonal each row only needs three of its entries.
pub fn inverse_residual(alpha: Alpha, j: usize, n_check: usize) -> Result<f64> {
    if j == 0 {
        return Err(Error::Index("basis index starts at 1".into()));
    }
    let column: Vec<f64> = (1..=n_check as u64 + 1)
        .map(|m| kernel_entry(alpha, m, j as u64))
        .collect();
    let rows = apply_three_term(alpha, &column, n_check);
    Ok(rows
        .iter()
        .enumerate()
        .map(|(i, v)| (v - if i + 1 == j { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max))
}

/// Default number of rows checked by [`inverse_residual`].
pub fn default_check_rows(j: usize) -> usize {
    2 * j + 200
}

/// The `m` largest eigenvalues of `K_alpha^{(N)}`, decreasing.
pub fn truncated_top_eigs(alpha: Alpha, order: usize, m: usize) -> Result<Vec<f64>> {
    if m > 10 || order < m {
        return Err(Error::domain(format!("need m <= 10 and N >= m, got m = {m}, N = {order}")));
    }
    TruncatedKernel::new(alpha, order)?.top_eigenvalues(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::zeta;

    fn alpha(v: f64) -> Alpha {
        Alpha::new(v).unwrap()
    }

    fn rel(x: f64, y: f64) -> f64 {
        (x - y).abs() / y.abs().max(1e-300)
    }

    #[test]
    fn half_alpha_closed_forms() {
        let p = JacobiParams::new(alpha(0.5));
        for n in 1..=3u64 {
            let nf = n as f64;
            assert!(rel(p.a(n), -nf * (nf + 1.0)) < 1e-14);
            assert!(rel(p.b(n), 2.0 * nf * nf) < 1e-14);
            assert!(rel(p.c(n), 1.0) < 1e-14);
        }
        for a in [0.1, 1.0, 9.0] {
            assert_eq!(JacobiParams::new(alpha(a)).c(1), 1.0);
        }
        let one = JacobiParams::new(alpha(1.0));
        assert!((one.a(1) + 2f64.powf(1.5) / 3.0).abs() < 1e-15);
    }

    #[test]
    fn parameter_forms_agree() {
        for a in [0.3, 0.5, 1.0, 2.0, 7.0] {
            let p = JacobiParams::new(alpha(a));
            for n in 1..=1000u64 {
                assert!(rel(p.a_from_c(n), p.a(n)) < 1e-12, "a {a} {n}");
                assert!(rel(p.b_from_c(n), p.b(n)) < 1e-12, "b {a} {n}");
                assert!(rel(p.a_literal(n), p.a(n)) < 1e-11, "a lit {a} {n}");
                assert!(rel(p.b_literal(n), p.b(n)) < 1e-10, "b lit {a} {n}");
                assert!(p.a(n) < 0.0 && p.b(n) > 0.0 && p.c(n) > 0.0);
            }
        }
    }

    #[test]
    fn large_alpha_is_finite() {
        let p = JacobiParams::new(alpha(50.0));
        for n in [1u64, 2, 100, 20_000] {
            assert!(p.a(n).is_finite() && p.b(n).is_finite() && p.b(n) > 0.0);
        }
    }

    #[test]
    fn power_solutions_are_annihilated() {
        for a in [0.5, 1.0, 2.5] {
            for sign in [-1.0, 1.0] {
                let x: Vec<f64> = (1..=60).map(|n| (n as f64).powf(-0.5 + sign * a)).collect();
                for n in 2..59 {
                    let p = JacobiParams::new(alpha(a));
                    let scale = p.b(n as u64) * x[n - 1];
                    let r = apply_jacobi(alpha(a), &x, n).unwrap();
                    assert!(r.abs() < 1e-12 * scale, "{a} {sign} {n}: {r}");
                }
            }
        }
        assert!(matches!(apply_jacobi(alpha(1.0), &[1.0, 2.0], 1), Err(Error::Index(_))));
    }

    #[test]
    fn tridiagonal_rows_vanish_off_band() {
        let mut x = vec![0.0; 20];
        x[9] = 1.0;
        for n in [2usize, 5, 8, 12, 18] {
            assert_eq!(apply_jacobi(alpha(1.7), &x, n).unwrap(), 0.0);
        }
    }

    #[test]
    fn factorized_matches_three_term() {
        let p = JacobiParams::new(alpha(0.5));
        let got = apply_factorized(&p, &[1.0], 4).unwrap();
        for (g, w) in got.iter().zip([2.0, -2.0, 0.0, 0.0]) {
            assert!((g - w).abs() < 1e-13);
        }
        let p = JacobiParams::new(alpha(2.0));
        let x: Vec<f64> = (0..30).map(|i| ((i * 13 % 7) as f64 - 3.0) * 0.25).collect();
        let f = apply_factorized(&p, &x, 31).unwrap();
        let t = apply_three_term(alpha(2.0), &x, 31);
        for (u, v) in f.iter().zip(&t) {
            assert!((u - v).abs() <= 1e-12 * v.abs().max(1.0), "{u} {v}");
        }
    }

    #[test]
    fn power_sequence_maps_to_first_basis_vector() {
        for a in [0.5, 1.0, 3.0] {
            let x: Vec<f64> = (1..=41).map(|n| (n as f64).powf(-0.5 - a)).collect();
            let y = apply_factorized(&JacobiParams::new(alpha(a)), &x, 40).unwrap();
            assert!((y[0] - 1.0).abs() < 1e-12, "{a}: {}", y[0]);
            assert!(y[1..].iter().all(|v| v.abs() < 1e-10), "{a}");
        }
    }

    #[test]
    fn inverse_identity() {
        for (a, j) in [(1.0, 1), (0.5, 3), (5.0, 10), (2.0, 10)] {
            let r = inverse_residual(alpha(a), j, default_check_rows(j)).unwrap();
            assert!(r <= 1e-9, "{a} {j}: {r}");
        }
    }

    #[test]
    fn sturm_counts() {
        for a in [0.25, 1.0, 6.0] {
            let w = TridiagonalWindow::new(alpha(a), 200);
            assert_eq!(w.sturm_count(0.0), 0);
            assert_eq!(w.sturm_count(-1.0), 0);
            let bmax = w.diag.iter().cloned().fold(0.0, f64::max);
            let amax = w.off.iter().map(|v| v.abs()).fold(0.0, f64::max);
            assert_eq!(w.sturm_count(bmax + 2.0 * amax), 200);
        }
    }

    #[test]
    fn truncated_top() {
        assert_eq!(truncated_top_eigs(alpha(3.0), 1, 1).unwrap(), vec![1.0]);
        let top = truncated_top_eigs(alpha(4.0), 1000, 1).unwrap()[0];
        let lo = zeta(9.0, 1e-14).unwrap() - 5e-3;
        let hi = zeta(5.0, 1e-14).unwrap();
        assert!(top >= lo && top <= hi, "{top}");
        assert!(truncated_top_eigs(alpha(3.0), 5, 11).is_err());
    }
}
