//! Decaying solutions of `(J_alpha - lambda) x = 0` for
//! `lambda = (alpha^2 - s^2) / (2 alpha)`: the power-series coefficients of
//! `J_alpha n^{-1/2-beta} = n^{-1/2-beta} f_{alpha,beta}(1/n)`, the asymptotic
//! expansion `y_k`, and the backward-recurrence solver behind the secular function.

mod series;
mod solver;

pub use series::{binomial_series, TruncatedSeries};
pub use solver::{secular, solve_generalized, GeneralizedSolution, SecularSolver, N_START_CAP, N_START_INIT};

use crate::alpha::Alpha;
use crate::error::{Error, Result};

/// Largest series order accepted by [`f_taylor`].
pub const MAX_TAYLOR_ORDER: usize = 40;

/// Largest expansion order used by the solver.
pub const MAX_EXPANSION_ORDER: usize = MAX_TAYLOR_ORDER / 2;

/// `(1 - (1 - z)^gamma) / z` through `z^order`.
fn lower_quotient(gamma: f64, order: usize) -> TruncatedSeries {
    let b = binomial_series(gamma, order + 1);
    let coeffs = (0..=order)
        .map(|i| {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            sign * b.coeff(i + 1)
        })
        .collect();
    TruncatedSeries::new(coeffs)
}

/// `(1 - (1 + z)^gamma) / z` through `z^order`.
fn upper_quotient(gamma: f64, order: usize) -> TruncatedSeries {
    let b = binomial_series(gamma, order + 1);
    TruncatedSeries::new((0..=order).map(|i| -b.coeff(i + 1)).collect())
}

/// Taylor coefficients of
///
/// ```text
/// f_{alpha,beta}(z) = (1/z) [ (1-(1-z)^{alpha-beta}) / (1-(1-z)^{2 alpha})
///                            - (1-(1+z)^{alpha-beta}) / (1-(1+z)^{2 alpha}) ]
/// ```
///
/// through `z^order`. The function is even, so odd coefficients vanish up to
/// roundoff; `C_{alpha,beta}(j)` is the coefficient of `z^{2j}`.
pub fn f_taylor(alpha: Alpha, beta: f64, order: usize) -> Result<TruncatedSeries> {
    if order > MAX_TAYLOR_ORDER {
        return Err(Error::domain(format!(
            "Taylor order {order} exceeds {MAX_TAYLOR_ORDER}"
        )));
    }
    let a = alpha.get();
    let m = order + 1;
    let lower = lower_quotient(a - beta, m).div(&lower_quotient(2.0 * a, m))?;
    let upper = upper_quotient(a - beta, m).div(&upper_quotient(2.0 * a, m))?;
    let diff = &lower - &upper;
    debug_assert!(diff.coeff(0).abs() <= 1e-12 * (1.0 + (a - beta).abs() / a));
    Ok(diff.shift_down())
}

/// `C_{alpha,beta}(0..=j_max)`, the even Taylor coefficients of `f_{alpha,beta}`.
pub fn diagonal_coefficients(alpha: Alpha, beta: f64, j_max: usize) -> Result<Vec<f64>> {
    let f = f_taylor(alpha, beta, 2 * j_max)?;
    Ok((0..=j_max).map(|j| f.coeff(2 * j)).collect())
}

/// The approximate solution `y_k = sum_{j<k} Y(j) n^{-1/2-s-2j}` and its
/// residual `(J_alpha - lambda) y_k = sum_{j>=k} C_k(j) n^{-1/2-s-2j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticExpansion {
    pub alpha: Alpha,
    pub s: f64,
    pub lam: f64,
    pub order: usize,
    /// `Y(0..order)`, with `Y(0) = 1`.
    pub y: Vec<f64>,
    /// `C_k(j)` for `j = order..=j_max`, stored at index `j - order`.
    pub residual: Vec<f64>,
    /// `C_{alpha,s}(0..=j_max)`, the coefficients of `f_{alpha,s}`.
    pub diagonal: Vec<f64>,
}

impl AsymptoticExpansion {
    /// Largest residual index kept.
    pub fn j_max(&self) -> usize {
        self.order + self.residual.len() - 1
    }

    /// `C_k(j)` for `j >= order`.
    pub fn residual_coefficient(&self, j: usize) -> f64 {
        assert!(j >= self.order);
        self.residual.get(j - self.order).copied().unwrap_or(f64::NAN)
    }

    /// `y_k(n) n^{1/2 + s} = sum_j Y(j) n^{-2j}`.
    pub fn eval_scaled(&self, n: f64) -> f64 {
        let z2 = 1.0 / (n * n);
        self.y.iter().rev().fold(0.0, |acc, c| acc * z2 + c)
    }

    /// `(y_k(n) n^{1/2+s}) - (y_k(n+1) (n+1)^{1/2+s})`, without cancellation.
    pub fn eval_scaled_step(&self, n: f64) -> f64 {
        let log_step = (1.0 / n).ln_1p();
        self.y
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, c)| {
                let e = 2.0 * j as f64;
                c * (-e * n.ln()).exp() * -(-e * log_step).exp_m1()
            })
            .sum()
    }

    /// `y_k(n)`.
    pub fn eval(&self, n: u64) -> f64 {
        let nf = n as f64;
        self.eval_scaled(nf) * (-(0.5 + self.s) * nf.ln()).exp()
    }
}

/// `y_k(n)` for a built expansion.
pub fn eval_tail(expansion: &AsymptoticExpansion, n: u64) -> f64 {
    expansion.eval(n)
}

/// Order rule `max(ceil((alpha + 1 + |lambda|)/2) + 1, ceil((s + 3)/2) + 1, 3)`,
/// capped at [`MAX_EXPANSION_ORDER`].
pub fn expansion_order(alpha: Alpha, s: f64) -> usize {
    let lam = alpha.lambda_of(s).abs();
    let a = ((alpha.get() + 1.0 + lam) / 2.0).ceil() + 1.0;
    let b = ((s + 3.0) / 2.0).ceil() + 1.0;
    let k = a.max(b).max(3.0);
    if k.is_finite() {
        (k as usize).min(MAX_EXPANSION_ORDER)
    } else {
        MAX_EXPANSION_ORDER
    }
}

/// Builds `y_k` by killing the leading residual term `k - 1` times.
///
/// Adding `Y(k) n^{-1/2-s-2k}` contributes
/// `Y(k) (f_{alpha,s+2k}(0) - lambda) = -Y(k) 2k (s+k) / alpha` at order `k`,
/// so `Y(k) = alpha C_k(k) / (2k (s+k))`, and then
/// `C_{k+1}(j) = C_k(j) + Y(k) C_{alpha, s+2k}(j-k)` for `j > k`.
pub fn build_expansion(alpha: Alpha, s: f64, order: usize) -> Result<AsymptoticExpansion> {
    if order == 0 || order > MAX_EXPANSION_ORDER {
        return Err(Error::domain(format!(
            "expansion order must lie in 1..={MAX_EXPANSION_ORDER}, got {order}"
        )));
    }
    if !(s > -1.0) {
        return Err(Error::domain(format!("expansion needs s > -1, got {s}")));
    }
    for j in 1..order {
        if (s + j as f64).abs() < 1e-14 {
            return Err(Error::Pole { s, j });
        }
    }
    let a = alpha.get();
    let j_max = MAX_EXPANSION_ORDER.max(order);
    // residual[j] = C_k(j) for the current k, j = 0..=j_max (entries below k are 0)
    let diagonal = diagonal_coefficients(alpha, s, j_max)?;
    let mut residual = diagonal.clone();
    residual[0] = 0.0;
    let mut y = vec![1.0];
    for k in 1..order {
        let kf = k as f64;
        let yk = a * residual[k] / (2.0 * kf * (s + kf));
        let shifted = diagonal_coefficients(alpha, s + 2.0 * kf, j_max - k)?;
        for j in k + 1..=j_max {
            residual[j] += yk * shifted[j - k];
        }
        residual[k] = 0.0;
        y.push(yk);
    }
    Ok(AsymptoticExpansion {
        alpha,
        s,
        lam: alpha.lambda_of(s),
        order,
        y,
        residual: residual[order..].to_vec(),
        diagonal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::apply_jacobi;

    fn alpha(v: f64) -> Alpha {
        Alpha::new(v).unwrap()
    }

    fn f_direct(a: f64, b: f64, z: f64) -> f64 {
        // 1 - (1 + w)^g without cancellation
        let q = |g: f64, w: f64| -(g * w.ln_1p()).exp_m1();
        (q(a - b, -z) / q(2.0 * a, -z) - q(a - b, z) / q(2.0 * a, z)) / z
    }

    #[test]
    fn taylor_structure() {
        for (a, b) in [(1.0, 0.0), (2.0, 1.0), (0.5, 0.3), (7.0, 11.0), (3.0, -0.5)] {
            let f = f_taylor(alpha(a), b, 40).unwrap();
            assert!((f.coeff(0) - (a * a - b * b) / (2.0 * a)).abs() < 1e-13 * (1.0 + b * b / a));
            for i in (1..=40).step_by(2) {
                let scale = f.coeff(i - 1).abs().max(f.coeff(i + 1).abs()).max(1.0);
                assert!(f.coeff(i).abs() < 1e-12 * scale, "{a} {b} z^{i}: {}", f.coeff(i));
            }
        }
        assert!(f_taylor(alpha(1.0), 0.0, 41).is_err());
    }

    #[test]
    fn taylor_matches_function() {
        let f = f_taylor(alpha(1.0), 0.0, 40).unwrap();
        let h = 1e-3;
        // f(0) is the removable value (alpha^2 - beta^2)/(2 alpha) = 1/2
        let central = (f_direct(1.0, 0.0, h) + f_direct(1.0, 0.0, -h) - 1.0) / (h * h);
        assert!((central - 2.0 * f.coeff(2)).abs() < 1e-6, "{central} vs {}", 2.0 * f.coeff(2));
        for (a, b) in [(2.0, 1.3), (5.0, 2.5)] {
            let f = f_taylor(alpha(a), b, 40).unwrap();
            for z in [0.05, 0.1] {
                assert!((f.eval(z) - f_direct(a, b, z)).abs() < 1e-10, "{a} {b} {z}");
            }
        }
    }

    #[test]
    fn expansion_first_terms() {
        let (a, s) = (alpha(2.0), 0.7);
        let c = diagonal_coefficients(a, s, 5).unwrap();
        let e1 = build_expansion(a, s, 1).unwrap();
        assert_eq!(e1.y, vec![1.0]);
        for j in 1..=5 {
            assert!((e1.residual_coefficient(j) - c[j]).abs() < 1e-15);
        }
        let e2 = build_expansion(a, s, 2).unwrap();
        assert!((e2.y[1] - 2.0 * c[1] / (2.0 * (s + 1.0))).abs() < 1e-15);
        assert_eq!(eval_tail(&e1, 7), 7f64.powf(-1.2));
        let e4 = build_expansion(a, s, 4).unwrap();
        assert!((eval_tail(&e4, 1) - e4.y.iter().sum::<f64>()).abs() < 1e-15);
    }

    #[test]
    fn pole_is_reported() {
        assert_eq!(build_expansion(alpha(1.0), -0.5, 3).err(), None);
        assert!(build_expansion(alpha(1.0), -1.0, 3).is_err());
        let e = Error::Pole { s: -1.0 + 1e-16, j: 1 };
        assert_eq!(build_expansion(alpha(1.0), -1.0 + 1e-16, 3).err(), Some(e));
    }

    #[test]
    fn expansion_residual_decay() {
        for (a, s) in [(2.0, 1.0), (5.0, 2.5), (1.0, 0.3)] {
            for k in [1usize, 2] {
                let e = build_expansion(alpha(a), s, k).unwrap();
                let ck = e.residual_coefficient(k).abs();
                for n in [50usize, 80, 200] {
                    let x: Vec<f64> = (1..=n as u64 + 1).map(|m| e.eval(m)).collect();
                    let row = apply_jacobi(alpha(a), &x, n).unwrap() - e.lam * x[n - 1];
                    let bound = 2.0 * ck * (n as f64).powf(-0.5 - s - 2.0 * k as f64);
                    assert!(row.abs() <= bound, "{a} {s} k={k} n={n}: {row} vs {bound}");
                }
            }
        }
    }

    #[test]
    fn order_rule() {
        assert_eq!(expansion_order(alpha(0.5), 0.25), 3);
        assert_eq!(expansion_order(alpha(10.0), 1.0), 9);
        assert_eq!(expansion_order(alpha(50.0), 1.0), MAX_EXPANSION_ORDER);
    }
}
