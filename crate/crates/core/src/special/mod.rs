//! Scalar special functions and quadrature shared by the rest of the crate.

mod quadrature;
mod zeta;

pub use quadrature::{integrate, AdaptiveLimits};
pub use zeta::{normalized_tail, power_tail, scaled_tail, zeta, ZETA_TOL};

use num_complex::Complex64;

use crate::alpha::Alpha;
use crate::error::{Error, Result};

/// Default absolute tolerance for [`lorentz_integrate`].
pub const INTEGRAL_TOL: f64 = 1e-10;

/// The standard sequence `n -> n^{-s}` for complex `s` with `Re s > -1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSequence {
    exponent: Complex64,
}

impl PowerSequence {
    pub fn new(exponent: Complex64) -> Result<Self> {
        if !(exponent.re > -1.0) || !exponent.im.is_finite() {
            return Err(Error::domain(format!(
                "power sequence needs Re s > -1, got {exponent}"
            )));
        }
        Ok(PowerSequence { exponent })
    }

    pub fn real(exponent: f64) -> Result<Self> {
        Self::new(Complex64::new(exponent, 0.0))
    }

    pub fn exponent(&self) -> Complex64 {
        self.exponent
    }

    pub fn value(&self, n: u64) -> Complex64 {
        debug_assert!(n >= 1);
        if n == 1 {
            return Complex64::new(1.0, 0.0);
        }
        (-self.exponent * (n as f64).ln()).exp()
    }

    /// Real part of the value; exact for real exponents.
    pub fn value_re(&self, n: u64) -> f64 {
        if self.exponent.im == 0.0 {
            (-self.exponent.re * (n as f64).ln()).exp()
        } else {
            self.value(n).re
        }
    }

    /// Values at `n = 1..=len` (real part).
    pub fn sample(&self, len: usize) -> Vec<f64> {
        (1..=len as u64).map(|n| self.value_re(n)).collect()
    }
}

/// The Lorentzian `t -> 2 alpha / (alpha^2 + t^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzianWeight {
    pub alpha: Alpha,
}

impl LorentzianWeight {
    pub fn new(alpha: Alpha) -> Self {
        LorentzianWeight { alpha }
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        omega(self.alpha, t)
    }

    pub fn max_value(&self) -> f64 {
        self.alpha.band_top()
    }
}

/// The Mellin symbol `omega_alpha(t) = 2 alpha / (alpha^2 + t^2)`.
#[inline]
pub fn omega(alpha: Alpha, t: f64) -> f64 {
    let a = alpha.get();
    2.0 * a / (a * a + t * t)
}

/// Integration of a bounded function against `omega_alpha(t) dt / 2pi`.
///
/// The core piece is computed in the variable `theta` with `t = alpha tan(theta)`,
/// in which the weight becomes `dtheta / pi`. For oscillating `g` that
/// substitution alone leaves infinitely many oscillations near `theta = +-pi/2`,
/// so the weight is split by a Gaussian-smoothed cutoff `chi` at `|t| = T`:
///
/// ```text
/// I = int g omega chi dt/2pi + mean(g) * (1 - int omega chi dt/2pi)
/// ```
///
/// where the far-field mean of `g` is taken separately on each half line
/// through a Gaussian window. Both the neglected far-field fluctuation and the
/// window error decay like `exp(-(b sigma)^2 / 4)` for oscillation frequencies
/// `b >= min_frequency`, with `sigma = 10 / min_frequency`.
#[derive(Debug, Clone, Copy)]
pub struct LorentzQuadrature {
    pub tol: f64,
    pub min_frequency: f64,
    pub limits: AdaptiveLimits,
}

impl Default for LorentzQuadrature {
    fn default() -> Self {
        LorentzQuadrature {
            tol: INTEGRAL_TOL,
            min_frequency: 0.05,
            limits: AdaptiveLimits::default(),
        }
    }
}

impl LorentzQuadrature {
    pub fn with_tol(tol: f64) -> Self {
        LorentzQuadrature {
            tol,
            ..Default::default()
        }
    }

    pub fn integrate<G: Fn(f64) -> f64>(&self, alpha: Alpha, g: G) -> Result<f64> {
        if !(self.min_frequency > 0.0) || !(self.tol > 0.0) {
            return Err(Error::domain("quadrature needs positive tolerance and frequency"));
        }
        let a = alpha.get();
        let sigma = 10.0 / self.min_frequency;
        let cut = 6.0 * sigma;
        let reach = cut + 6.0 * sigma;
        let chi = |t: f64| 0.5 * libm::erfc((t.abs() - cut) / sigma);

        let t_breaks = uniform_breaks(-reach, reach, 20.0);
        let theta_breaks: Vec<f64> = t_breaks.iter().map(|&t| (t / a).atan()).collect();
        let inv_pi = std::f64::consts::FRAC_1_PI;

        let near = integrate(
            |theta: f64| {
                let t = a * theta.tan();
                g(t) * chi(t) * inv_pi
            },
            &theta_breaks,
            0.25 * self.tol,
            self.limits,
        )?;
        let near_mass = integrate(
            |theta: f64| chi(a * theta.tan()) * inv_pi,
            &theta_breaks,
            0.125 * self.tol,
            self.limits,
        )?;

        let center = 7.0 * sigma;
        let norm = 1.0 / (sigma * std::f64::consts::PI.sqrt());
        let window_mean = |c: f64| -> Result<f64> {
            let breaks = uniform_breaks(c - 6.5 * sigma, c + 6.5 * sigma, 20.0);
            integrate(
                |t: f64| {
                    let u = (t - c) / sigma;
                    g(t) * (-u * u).exp() * norm
                },
                &breaks,
                0.25 * self.tol,
                self.limits,
            )
        };
        let far_mean = 0.5 * (window_mean(center)? + window_mean(-center)?);
        Ok(near + far_mean * (1.0 - near_mass))
    }
}

fn uniform_breaks(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let pieces = ((hi - lo) / step).ceil().max(1.0) as usize;
    (0..=pieces)
        .map(|i| lo + (hi - lo) * i as f64 / pieces as f64)
        .collect()
}

/// `int g(t) omega_alpha(t) dt / 2pi` with the default quadrature settings.
pub fn lorentz_integrate<G: Fn(f64) -> f64>(alpha: Alpha, g: G, tol: f64) -> Result<f64> {
    LorentzQuadrature::with_tol(tol).integrate(alpha, g)
}
