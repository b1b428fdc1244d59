use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

/// Power series in `z` truncated after `z^K`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Vec<f64>,
}

impl TruncatedSeries {
    /// Series with the given coefficients `g(0..=K)`.
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series needs at least g(0)");
        TruncatedSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        TruncatedSeries::new(vec![0.0; order + 1])
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    /// Truncate (or zero-extend) to order `order`.
    pub fn truncated(&self, order: usize) -> Self {
        TruncatedSeries::new((0..=order).map(|i| self.coeff(i)).collect())
    }

    pub fn scale(&self, c: f64) -> Self {
        TruncatedSeries::new(self.coeffs.iter().map(|v| v * c).collect())
    }

    /// `self / h`, exact through the common order; needs `h(0) != 0`.
    pub fn div(&self, h: &TruncatedSeries) -> Result<Self> {
        let h0 = h.coeff(0);
        if h0 == 0.0 {
            return Err(Error::domain("series division by a series with zero constant term"));
        }
        let order = self.order().min(h.order());
        let mut q = vec![0.0; order + 1];
        for i in 0..=order {
            let mut acc = self.coeff(i);
            for j in 1..=i {
                acc -= h.coeff(j) * q[i - j];
            }
            q[i] = acc / h0;
        }
        Ok(TruncatedSeries::new(q))
    }

    /// `self / z`; the constant term is discarded (callers check it vanishes).
    pub fn shift_down(&self) -> Self {
        if self.coeffs.len() == 1 {
            return TruncatedSeries::zero(0);
        }
        TruncatedSeries::new(self.coeffs[1..].to_vec())
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * z + c)
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let order = self.order().min(rhs.order());
        TruncatedSeries::new((0..=order).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let order = self.order().min(rhs.order());
        TruncatedSeries::new((0..=order).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let order = self.order().min(rhs.order());
        let coeffs = (0..=order)
            .map(|i| (0..=i).map(|j| self.coeff(j) * rhs.coeff(i - j)).sum())
            .collect();
        TruncatedSeries::new(coeffs)
    }
}

/// Coefficients of `(1 + z)^gamma` through `z^order`.
pub fn binomial_series(gamma: f64, order: usize) -> TruncatedSeries {
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut c = 1.0;
    for i in 0..=order {
        coeffs.push(c);
        c *= (gamma - i as f64) / (i + 1) as f64;
    }
    TruncatedSeries::new(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let g = TruncatedSeries::new(vec![1.0, 2.0, 3.0]);
        let h = TruncatedSeries::new(vec![2.0, -1.0, 0.5]);
        assert_eq!((&g + &h).coeffs(), &[3.0, 1.0, 3.5]);
        assert_eq!((&g - &h).coeffs(), &[-1.0, 3.0, 2.5]);
        assert_eq!((&g * &h).coeffs(), &[2.0, 3.0, 4.5]);
        assert!(g.div(&TruncatedSeries::new(vec![0.0, 1.0])).is_err());
        assert_eq!(g.shift_down().coeffs(), &[2.0, 3.0]);
    }

    #[test]
    fn geometric_series_by_division() {
        let one = TruncatedSeries::new(vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        let q = one.div(&TruncatedSeries::new(vec![1.0, -1.0, 0.0, 0.0, 0.0])).unwrap();
        assert_eq!(q.coeffs(), &[1.0; 5]);
    }

    #[test]
    fn binomial_matches_powf() {
        let s = binomial_series(2.5, 30);
        for z in [-0.3, 0.1, 0.25] {
            assert!((s.eval(z) - (1.0f64 + z).powf(2.5)).abs() < 1e-14);
        }
        assert_eq!(binomial_series(2.0, 4).coeffs(), &[1.0, 2.0, 1.0, 0.0, 0.0]);
    }
}
