use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The kernel parameter `alpha`, a finite strictly positive real.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(Alpha(value))
        } else {
            Err(Error::domain(format!("alpha must be finite and > 0, got {value}")))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// Top of the absolutely continuous band of `K_alpha`, `2 / alpha`.
    #[inline]
    pub fn band_top(self) -> f64 {
        2.0 / self.0
    }

    /// Bottom of the absolutely continuous band of `J_alpha`, `alpha / 2`.
    #[inline]
    pub fn jacobi_band_bottom(self) -> f64 {
        self.0 / 2.0
    }

    /// Jacobi spectral parameter `(alpha^2 - s^2) / (2 alpha)` attached to `s`.
    #[inline]
    pub fn lambda_of(self, s: f64) -> f64 {
        (self.0 * self.0 - s * s) / (2.0 * self.0)
    }
}

impl TryFrom<f64> for Alpha {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Alpha::new(value)
    }
}

impl From<Alpha> for f64 {
    fn from(a: Alpha) -> f64 {
        a.0
    }
}

/// Rounded to 12 significant digits, so grid values like `0.15000000000000002` read as `0.15`.
impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rounded: f64 = format!("{:.11e}", self.0).parse().map_err(|_| fmt::Error)?;
        write!(f, "{rounded}")
    }
}
