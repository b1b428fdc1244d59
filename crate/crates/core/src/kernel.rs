//! The Hardy kernel `k_alpha(n, m) = (nm)^{alpha - 1/2} / max(n, m)^{2 alpha}`,
//! its principal truncations and the diagonal limit `K_inf = diag(1/n)`.

use num_complex::Complex64;

use crate::alpha::Alpha;
use crate::error::{Error, Result};
use crate::linalg::lanczos_top;
use crate::special::LorentzQuadrature;

/// Relative tolerance used by the iterative eigenvalue extraction.
pub const EIG_TOL: f64 = 1e-12;

/// Largest truncation order accepted by [`TruncatedKernel::to_dense`].
pub const DENSE_CAP: usize = 20_000;

/// `k_alpha(n, m)`, evaluated as `exp(-(log n + log m)/2 + alpha log(min/max))`
/// so that neither large `alpha` nor large indices overflow.
pub fn kernel_entry(alpha: Alpha, n: u64, m: u64) -> f64 {
    assert!(n >= 1 && m >= 1, "kernel indices start at 1");
    if n == m {
        return 1.0 / n as f64;
    }
    let (lo, hi) = if n < m { (n, m) } else { (m, n) };
    let (lo, hi) = (lo as f64, hi as f64);
    (-0.5 * (lo.ln() + hi.ln()) + alpha.get() * (lo / hi).ln()).exp()
}

/// The infinite matrix `K_alpha` as an entry rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardyKernel {
    pub alpha: Alpha,
}

impl HardyKernel {
    pub fn new(alpha: Alpha) -> Self {
        HardyKernel { alpha }
    }

    pub fn entry(&self, n: u64, m: u64) -> f64 {
        kernel_entry(self.alpha, n, m)
    }

    pub fn truncate(&self, order: usize) -> Result<TruncatedKernel> {
        TruncatedKernel::new(self.alpha, order)
    }
}

/// The principal `N x N` truncation `K_alpha^{(N)}`.
///
/// Stored implicitly: a product with a vector costs `O(N)` through the
/// recursions
///
/// ```text
/// L(n) = ((n-1)/n)^alpha L(n-1) + y(n),   R(n) = (n/(n+1))^alpha (R(n+1) + y(n+1)),
/// ```
///
/// with `y(m) = m^{-1/2} x(m)` and `(K x)(n) = n^{-1/2} (L(n) + R(n))`.
#[derive(Debug, Clone)]
pub struct TruncatedKernel {
    alpha: Alpha,
    /// `ratio[i] = ((i+1)/(i+2))^alpha`, the decay factor between indices `i+1` and `i+2`.
    ratio: Vec<f64>,
    inv_sqrt: Vec<f64>,
}

impl TruncatedKernel {
    pub fn new(alpha: Alpha, order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::domain("truncation order must be at least 1"));
        }
        let a = alpha.get();
        let ratio = (1..order)
            .map(|n| (a * (-1.0 / (n as f64 + 1.0)).ln_1p()).exp())
            .collect();
        let inv_sqrt = (1..=order).map(|n| 1.0 / (n as f64).sqrt()).collect();
        Ok(TruncatedKernel {
            alpha,
            ratio,
            inv_sqrt,
        })
    }

    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    pub fn order(&self) -> usize {
        self.inv_sqrt.len()
    }

    pub fn entry(&self, n: usize, m: usize) -> f64 {
        kernel_entry(self.alpha, n as u64, m as u64)
    }

    /// `out = K^{(N)} x`.
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        let n = self.order();
        assert!(x.len() == n && out.len() == n, "dimension mismatch");
        let mut left = 0.0;
        for i in 0..n {
            let y = self.inv_sqrt[i] * x[i];
            left = if i == 0 { y } else { self.ratio[i - 1] * left + y };
            out[i] = left;
        }
        let mut right = 0.0;
        for i in (0..n).rev() {
            if i + 1 < n {
                right = self.ratio[i] * (right + self.inv_sqrt[i + 1] * x[i + 1]);
            }
            out[i] = self.inv_sqrt[i] * (out[i] + right);
        }
    }

    /// Dense row-major copy of the truncation.
    pub fn to_dense(&self) -> Result<Vec<f64>> {
        let n = self.order();
        if n > DENSE_CAP {
            return Err(Error::domain(format!(
                "dense truncation of order {n} exceeds the cap {DENSE_CAP}"
            )));
        }
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = self.entry(i + 1, j + 1);
            }
        }
        Ok(out)
    }

    /// The `m` largest eigenvalues in decreasing order.
    pub fn top_eigenvalues(&self, m: usize) -> Result<Vec<f64>> {
        lanczos_top(|x, y| self.apply(x, y), self.order(), m, EIG_TOL)
    }
}

/// The diagonal matrix `K_inf = diag(1, 1/2, ..., 1/N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiagonalLimit {
    pub order: usize,
}

impl DiagonalLimit {
    pub fn entry(&self, n: usize) -> f64 {
        1.0 / n as f64
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (1..=self.order).map(|n| self.entry(n)).collect()
    }
}

/// `sum_{n,m} k_alpha(n,m) x(n) x(m)` by direct double summation; `x[0]` is `x(1)`.
pub fn quadratic_form(alpha: Alpha, x: &[f64]) -> f64 {
    let support: Vec<usize> = (0..x.len()).filter(|&i| x[i] != 0.0).collect();
    let mut total = 0.0;
    for &i in &support {
        total += x[i] * x[i] / (i + 1) as f64;
        for &j in support.iter().filter(|&&j| j > i) {
            total += 2.0 * kernel_entry(alpha, i as u64 + 1, j as u64 + 1) * x[i] * x[j];
        }
    }
    total
}

/// Hermitian form `sum_{n,m} k_alpha(n,m) x(n) conj(x(m))`.
pub fn quadratic_form_complex(alpha: Alpha, x: &[Complex64]) -> f64 {
    let mut total = 0.0;
    for (i, xi) in x.iter().enumerate() {
        total += xi.norm_sqr() / (i + 1) as f64;
        for (j, xj) in x.iter().enumerate().skip(i + 1) {
            total += 2.0 * kernel_entry(alpha, i as u64 + 1, j as u64 + 1) * (xi * xj.conj()).re;
        }
    }
    total
}

/// The same form evaluated as `int |sum_n x(n) n^{-1/2 - it}|^2 omega_alpha(t) dt / 2pi`.
pub fn integral_form(alpha: Alpha, x: &[f64], tol: f64) -> Result<f64> {
    let terms: Vec<(f64, f64)> = x
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(i, v)| {
            let n = (i + 1) as f64;
            (n.ln(), v / n.sqrt())
        })
        .collect();
    if terms.is_empty() {
        return Ok(0.0);
    }
    let largest = terms.last().map(|t| t.0).unwrap_or(0.0).exp();
    let mut quad = LorentzQuadrature::with_tol(tol);
    if largest > 1.0 {
        // Smallest frequency |log n - log m| that can occur in |.|^2.
        quad.min_frequency = quad.min_frequency.min((largest / (largest - 1.0)).ln());
    }
    quad.integrate(alpha, |t| {
        let (mut re, mut im) = (0.0, 0.0);
        for &(log_n, c) in &terms {
            let (s, co) = (t * log_n).sin_cos();
            re += c * co;
            im -= c * s;
        }
        re * re + im * im
    })
}

/// Outcome of [`diff_norm_bound_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffNormCheck {
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Largest eigenvalue of `K_alpha^{(N)} - K_inf^{(N)}` against the bound `2/alpha`.
pub fn diff_norm_bound_check(alpha: Alpha, order: usize) -> Result<DiffNormCheck> {
    if order < 2 {
        return Err(Error::domain("difference check needs N >= 2"));
    }
    let k = TruncatedKernel::new(alpha, order)?;
    let apply = |x: &[f64], y: &mut [f64]| {
        k.apply(x, y);
        for (i, (yi, xi)) in y.iter_mut().zip(x).enumerate() {
            *yi -= xi / (i + 1) as f64;
        }
    };
    let value = lanczos_top(apply, order, 1, EIG_TOL)?[0];
    let bound = alpha.band_top();
    Ok(DiffNormCheck {
        value,
        bound,
        pass: value <= bound + 1e-10,
    })
}
