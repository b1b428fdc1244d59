//! Small dense/tridiagonal eigen-helpers: Sturm counts, bisection, and a
//! Lanczos extractor for the extreme eigenvalues of an implicit symmetric operator.

use crate::error::{Error, Result};

/// Number of eigenvalues strictly below `lam` of the symmetric tridiagonal matrix
/// with diagonal `diag` and off-diagonal `off` (`off.len() + 1 == diag.len()`).
///
/// Uses the signed LDL^T pivot recursion `d_1 = b_1 - lam`,
/// `d_n = b_n - lam - a_{n-1}^2 / d_{n-1}`; an exact zero pivot is replaced by
/// `+1e-300`, which is the limit from `lam - 0`.
pub fn sturm_count(diag: &[f64], off: &[f64], lam: f64) -> usize {
    debug_assert!(diag.is_empty() || off.len() + 1 >= diag.len());
    let mut count = 0;
    let mut d = 1.0;
    for (i, &b) in diag.iter().enumerate() {
        d = if i == 0 {
            b - lam
        } else {
            let a = off[i - 1];
            b - lam - a * a / d
        };
        if d == 0.0 {
            d = 1e-300;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Gershgorin interval containing every eigenvalue.
pub fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (i, &b) in diag.iter().enumerate() {
        let left = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < diag.len() { off[i].abs() } else { 0.0 };
        lo = lo.min(b - left - right);
        hi = hi.max(b + left + right);
    }
    (lo, hi)
}

/// The `index`-th smallest eigenvalue (0-based) by Sturm bisection.
pub fn tridiagonal_eigenvalue(diag: &[f64], off: &[f64], index: usize) -> f64 {
    let (mut lo, mut hi) = gershgorin(diag, off);
    let pad = 1e-12 * (lo.abs().max(hi.abs()) + 1.0);
    lo -= pad;
    hi += pad;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) > index {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Eigenvector of a symmetric tridiagonal matrix for a (very accurate)
/// eigenvalue estimate, by two steps of inverse iteration.
fn tridiagonal_eigenvector(diag: &[f64], off: &[f64], lam: f64) -> Vec<f64> {
    let n = diag.len();
    let scale = diag.iter().chain(off).fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let shift = lam + 1e-14 * scale;
    let mut v = vec![1.0; n];
    for _ in 0..3 {
        // Thomas algorithm with partial guarding of tiny pivots.
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut piv = diag[0] - shift;
        if piv.abs() < 1e-300 {
            piv = 1e-300;
        }
        if n > 1 {
            c[0] = off[0] / piv;
        }
        d[0] = v[0] / piv;
        for i in 1..n {
            let a = off[i - 1];
            let mut p = diag[i] - shift - a * c[i - 1];
            if p.abs() < 1e-300 {
                p = 1e-300;
            }
            if i + 1 < n {
                c[i] = off[i] / p;
            }
            d[i] = (v[i] - a * d[i - 1]) / p;
        }
        let mut x = vec![0.0; n];
        x[n - 1] = d[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = d[i] - c[i] * x[i + 1];
        }
        let norm = x.iter().map(|t| t * t).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            break;
        }
        v = x.into_iter().map(|t| t / norm).collect();
    }
    v
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Lanczos iteration with full reorthogonalization for the `m` largest
/// eigenvalues of a symmetric operator of dimension `dim` given by `apply`.
///
/// A Ritz value is accepted once its residual bound `|beta_j y_j|` is below
/// `tol * |theta|`. Returns the eigenvalues in decreasing order.
pub fn lanczos_top<F>(apply: F, dim: usize, m: usize, tol: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64], &mut [f64]),
{
    if m == 0 {
        return Ok(Vec::new());
    }
    if m > dim {
        return Err(Error::domain(format!("asked for {m} eigenvalues of a {dim}-dimensional operator")));
    }
    let max_steps = dim.min(800);
    // Deterministic start vector with components along everything.
    let mut q: Vec<f64> = (0..dim)
        .map(|i| 1.0 / ((i + 1) as f64).sqrt() * (1.0 + 0.5 * ((i as f64) * 0.618_033_988_75).sin()))
        .collect();
    let norm = dot(&q, &q).sqrt();
    q.iter_mut().for_each(|v| *v /= norm);

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![0.0; dim];
    let mut next_check = (2 * m + 10).min(max_steps);
    loop {
        apply(&q, &mut w);
        let a = dot(&q, &w);
        for (wi, qi) in w.iter_mut().zip(&q) {
            *wi -= a * qi;
        }
        if let (Some(prev), Some(&b)) = (basis.last(), betas.last()) {
            for (wi, pi) in w.iter_mut().zip(prev.iter()) {
                *wi -= b * pi;
            }
        }
        basis.push(q.clone());
        alphas.push(a);
        // Two passes of classical Gram–Schmidt against the whole basis.
        for _ in 0..2 {
            for v in &basis {
                let c = dot(v, &w);
                for (wi, vi) in w.iter_mut().zip(v) {
                    *wi -= c * vi;
                }
            }
        }
        let b = dot(&w, &w).sqrt();
        let k = alphas.len();
        let exhausted = k == dim || b <= 1e-14 * alphas.iter().fold(0.0f64, |s, v| s.max(v.abs()));
        if k >= next_check || exhausted || k == max_steps {
            next_check = k + 10;
            let take = m.min(k);
            let mut ritz = Vec::with_capacity(take);
            let mut converged = true;
            for idx in 0..take {
                let theta = tridiagonal_eigenvalue(&alphas, &betas, k - 1 - idx);
                if !exhausted {
                    let y = tridiagonal_eigenvector(&alphas, &betas, theta);
                    let resid = (b * y[k - 1]).abs();
                    if resid > tol * theta.abs().max(1e-300) {
                        converged = false;
                    }
                }
                ritz.push(theta);
            }
            if exhausted && take < m {
                return Err(Error::no_convergence(
                    "lanczos",
                    format!("invariant subspace of dimension {k} < {m}"),
                ));
            }
            if converged {
                return Ok(ritz);
            }
            if k == max_steps {
                return Err(Error::no_convergence(
                    "lanczos",
                    format!("{k} steps without meeting tolerance {tol:e}"),
                ));
            }
        }
        betas.push(b);
        q = w.iter().map(|v| v / b).collect();
    }
}
