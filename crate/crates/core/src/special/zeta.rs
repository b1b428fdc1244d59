//! Real-argument Riemann zeta and power-tail sums by Euler–Maclaurin.

use crate::error::{Error, Result};

/// Default relative tolerance for [`zeta`].
pub const ZETA_TOL: f64 = 1e-12;

const MAX_CUTOFF: u64 = 1 << 26;

/// Bernoulli corrections B_{2k}/(2k)! for k = 1..=5.
const BERNOULLI_OVER_FACTORIAL: [f64; 5] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
];

/// `scale * sum_{m >= cutoff} m^{-p}` by the Euler–Maclaurin remainder at `cutoff`,
/// where `scale = exp(log_scale)`. Accurate when `cutoff` is a few times `p`.
fn em_remainder(cutoff: f64, p: f64, log_scale: f64) -> f64 {
    let ln_m = cutoff.ln();
    let pow = |q: f64| (log_scale - q * ln_m).exp();
    let mut acc = pow(p - 1.0) / (p - 1.0) + 0.5 * pow(p);
    // Derivatives of m^{-p}: (-1)^{2k-1} p (p+1) ... (p+2k-2) m^{-p-2k+1}.
    let mut rising = p;
    let mut order = p + 1.0;
    for (k, coef) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        if k > 0 {
            rising *= (p + 2.0 * k as f64 - 1.0) * (p + 2.0 * k as f64);
            order += 2.0;
        }
        acc += coef * rising * pow(order);
    }
    acc
}

/// Scaled tail `exp(log_scale) * sum_{m >= first} m^{-p}` for `p > 1`.
///
/// Terms below the Euler–Maclaurin cutoff are summed directly (smallest first);
/// every power is formed in log space so large `p` and large scales do not overflow.
pub fn scaled_tail(first: u64, p: f64, log_scale: f64) -> f64 {
    debug_assert!(first >= 1 && p > 1.0);
    let cutoff = first.max(4 * p.ceil() as u64 + 16);
    let mut acc = em_remainder(cutoff as f64, p, log_scale);
    for m in (first..cutoff).rev() {
        acc += (log_scale - p * (m as f64).ln()).exp();
    }
    acc
}

/// `sum_{m >= first} m^{-p}`.
pub fn power_tail(first: u64, p: f64) -> f64 {
    scaled_tail(first, p, 0.0)
}

/// `n^{p-1} sum_{m > n} m^{-p}`, which tends to `1/(p-1)` as `n` grows.
pub fn normalized_tail(n: u64, p: f64) -> f64 {
    scaled_tail(n + 1, p, (p - 1.0) * (n as f64).ln())
}

/// Riemann zeta for real `sigma > 1`, to relative tolerance `tol`.
///
/// The cutoff of the Euler–Maclaurin split is doubled from 8 until two successive
/// values agree to `tol`.
pub fn zeta(sigma: f64, tol: f64) -> Result<f64> {
    if !(sigma > 1.0 + 1e-12) || !sigma.is_finite() {
        return Err(Error::domain(format!("zeta requires sigma > 1, got {sigma}")));
    }
    let tol = tol.max(4.0 * f64::EPSILON);
    let at_cutoff = |cutoff: u64| {
        let mut acc = em_remainder(cutoff as f64, sigma, 0.0);
        for n in (1..cutoff).rev() {
            acc += (-sigma * (n as f64).ln()).exp();
        }
        acc
    };
    let mut cutoff = 8u64;
    let mut prev = at_cutoff(cutoff);
    loop {
        cutoff *= 2;
        let cur = at_cutoff(cutoff);
        if (cur - prev).abs() <= tol * cur.abs() {
            return Ok(cur);
        }
        if cutoff >= MAX_CUTOFF {
            return Err(Error::no_convergence(
                "zeta",
                format!("sigma = {sigma}, last change {:e}", (cur - prev).abs()),
            ));
        }
        prev = cur;
    }
}
