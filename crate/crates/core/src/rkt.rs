//! Reproducing-kernel directions `x = (n^{-1/2-beta})`: the Rayleigh quotient
//! `R(beta) = <K_alpha x, x> / ||x||^2`, its supremum over `beta > 0`, and the
//! comparison with `||K_alpha||`.

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::alpha::Alpha;
use crate::error::{Error, Result};
use crate::special::{normalized_tail, zeta, ZETA_TOL};
use crate::spectrum::{count_eigenvalues, operator_norm};

/// Search box for `beta`.
pub const BETA_MIN: f64 = 1e-4;
pub const BETA_MAX: f64 = 100.0;

/// Largest outer truncation in [`kernel_ratio`].
pub const MAX_OUTER: usize = 10_000_000;

/// Default tolerance of [`kernel_ratio`] and [`rkt_supremum`].
pub const RATIO_TOL: f64 = 1e-12;

/// Largest `norm - S^2` still read as equality.
pub const GAP_TOL: f64 = 1e-6;

const GRID_POINTS: usize = 121;

/// Below this `|alpha - beta|` the `1/(alpha - beta)` terms of the tail
/// expansion cancel badly; the ratio is then averaged from both sides.
const DIAGONAL_GUARD: f64 = 1e-6;

/// `F(n) = n^{-(alpha-beta)} sum_{m<=n} m^{alpha-beta-1} + n^{alpha+beta} sum_{m>n} m^{-alpha-beta-1}`,
/// so that `(K_alpha x)(n) = F(n) n^{-1/2-beta}`.
pub fn f_sequence(alpha: Alpha, beta: f64, n: u64) -> Result<f64> {
    check_beta(beta)?;
    if n == 0 {
        return Err(Error::Index("F(n) needs n >= 1".into()));
    }
    let gamma = alpha.get() - beta;
    let mut head = 0.0;
    for m in 1..=n {
        head = head_step(head, gamma, m);
    }
    Ok(head + normalized_tail(n, 1.0 + alpha.get() + beta))
}

/// `h(m) = ((m-1)/m)^gamma h(m-1) + 1/m`, where `h(m) = m^{-gamma} sum_{k<=m} k^{gamma-1}`.
fn head_step(prev: f64, gamma: f64, m: u64) -> f64 {
    if m == 1 {
        return 1.0;
    }
    let mf = m as f64;
    (gamma * (-1.0 / mf).ln_1p()).exp() * prev + 1.0 / mf
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("beta must be positive and finite, got {beta}")))
    }
}

/// Euler–Maclaurin coefficients of `sum_{k<=m} k^{g-1}` beyond the leading
/// power and constant, as multiples of `m^{g-1}, m^{g-2}, m^{g-4}, m^{g-6}`.
fn em_head(g: f64) -> [f64; 4] {
    [
        0.5,
        (g - 1.0) / 12.0,
        -(g - 1.0) * (g - 2.0) * (g - 3.0) / 720.0,
        (g - 1.0) * (g - 2.0) * (g - 3.0) * (g - 4.0) * (g - 5.0) / 30240.0,
    ]
}

/// `R(beta)` with the outer sum truncated at `outer`; the remainder uses the
/// large-`m` expansion `F(m) = F_0 + F_2 m^{-2} + F_4 m^{-4} + F_6 m^{-6} + C m^{-(alpha-beta)}`.
fn ratio_at(alpha: f64, beta: f64, outer: usize) -> f64 {
    let gamma = alpha - beta;
    let delta = alpha + beta;
    let w = 1.0 + 2.0 * beta;

    // q(m) = m^{-w} h(m) stays bounded even when h grows like m^{beta - alpha}
    let mut head = vec![0.0; outer];
    let mut q = 1.0;
    head[0] = q;
    for m in 2..=outer {
        let mf = m as f64;
        q = ((1.0 + delta) * (-1.0 / mf).ln_1p()).exp() * q + (-(w + 1.0) * mf.ln()).exp();
        head[m - 1] = q;
    }

    // tail part G(m) = m^delta sum_{k>m} k^{-delta-1}, run downward
    let mut g = normalized_tail(outer as u64, 1.0 + delta);
    let mut num = 0.0;
    let mut den = 0.0;
    for m in (1..=outer).rev() {
        let mf = m as f64;
        let weight = (-w * mf.ln()).exp();
        num += head[m - 1] + weight * g;
        den += weight;
        if m > 1 {
            g = (delta * (-1.0 / mf).ln_1p()).exp() * (g + 1.0 / mf);
        }
    }

    let mf = outer as f64;
    let eh = em_head(gamma);
    let scale = (-2.0 * beta * mf.ln()).exp();
    // C M^{-gamma} M^{-2 beta}, with h(M) M^{-2 beta} = M q(M)
    let c_scaled = mf * head[outer - 1]
        - scale * (1.0 / gamma + eh[0] / mf + eh[1] / (mf * mf) + eh[2] / mf.powi(4) + eh[3] / mf.powi(6));
    let d = delta + 1.0;
    let f0 = 1.0 / gamma + 1.0 / delta;
    let f2 = alpha / 6.0;
    let f4 = eh[2] - d * (d + 1.0) * (d + 2.0) / 720.0;
    let f6 = eh[3] + d * (d + 1.0) * (d + 2.0) * (d + 3.0) * (d + 4.0) / 30240.0;
    let zt = |p: f64| normalized_tail(outer as u64, p);
    let tail_num = scale
        * (f0 * zt(w)
            + f2 * zt(w + 2.0) / mf.powi(2)
            + f4 * zt(w + 4.0) / mf.powi(4)
            + f6 * zt(w + 6.0) / mf.powi(6))
        + c_scaled * zt(1.0 + delta);
    (num + tail_num) / (den + scale * zt(w))
}

/// `R(beta) = sum_m m^{-1-2beta} F(m) / zeta(1 + 2 beta)`, the squared norm ratio
/// along the reproducing-kernel direction at `1/2 + beta`.
///
/// The outer truncation starts well above `alpha + beta` and doubles until two
/// values agree to relative `tol`.
pub fn kernel_ratio(alpha: Alpha, beta: f64, tol: f64) -> Result<f64> {
    check_beta(beta)?;
    let a = alpha.get();
    if (a - beta).abs() < DIAGONAL_GUARD {
        let h = 2.0 * DIAGONAL_GUARD;
        let lo = kernel_ratio(alpha, beta - h, tol)?;
        let hi = kernel_ratio(alpha, beta + h, tol)?;
        return Ok(0.5 * (lo + hi));
    }
    let mut outer = 1024usize.max((16.0 * (2.0 * a + beta + 8.0)).ceil() as usize);
    let mut prev = ratio_at(a, beta, outer);
    loop {
        outer *= 2;
        if outer > MAX_OUTER {
            return Err(Error::no_convergence(
                "kernel ratio",
                format!("alpha = {alpha}, beta = {beta}: outer truncation exceeded {MAX_OUTER}"),
            ));
        }
        let cur = ratio_at(a, beta, outer);
        if (cur - prev).abs() <= tol.max(f64::EPSILON) * cur.abs() {
            return Ok(cur);
        }
        prev = cur;
    }
}

/// Where the supremum of `R` is attained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaStar {
    At(f64),
    /// The left limit `2/alpha`.
    ZeroLimit,
    /// The right limit `1`.
    InfiniteLimit,
}

impl Serialize for BetaStar {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            BetaStar::At(b) => ser.serialize_f64(*b),
            BetaStar::ZeroLimit => ser.serialize_str("beta->0+"),
            BetaStar::InfiniteLimit => ser.serialize_str("beta->inf"),
        }
    }
}

/// `sup_{beta > 0} R(beta)` and its location.
///
/// `R` is sampled on a logarithmic grid over `[1e-4, 100]`, the best sample is
/// refined by golden-section search in `log beta`, and the result is compared
/// with the endpoint limits `2/alpha` and `1`.
pub fn rkt_supremum(alpha: Alpha, tol: f64) -> Result<(f64, BetaStar)> {
    let (lo, hi) = (BETA_MIN.ln(), BETA_MAX.ln());
    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..GRID_POINTS).map(|i| lo + step * i as f64).collect();
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&t| kernel_ratio(alpha, t.exp(), RATIO_TOL))
        .collect::<Result<_>>()?;
    let best = (0..GRID_POINTS).max_by(|&i, &j| values[i].total_cmp(&values[j])).unwrap_or(0);

    let (mut a, mut b) = (grid[best.saturating_sub(1)], grid[(best + 1).min(GRID_POINTS - 1)]);
    let ratio = |t: f64| kernel_ratio(alpha, t.exp(), RATIO_TOL);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let (mut f1, mut f2) = (ratio(x1)?, ratio(x2)?);
    while b - a > tol.max(1e-10) {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = ratio(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = ratio(x1)?;
        }
    }
    let (mut sup, mut at) = (values[best], BetaStar::At(grid[best].exp()));
    for (t, f) in [(x1, f1), (x2, f2)] {
        if f > sup {
            sup = f;
            at = BetaStar::At(t.exp());
        }
    }
    let left = alpha.band_top();
    if left >= sup {
        sup = left;
        at = BetaStar::ZeroLimit;
    }
    if 1.0 > sup {
        sup = 1.0;
        at = BetaStar::InfiniteLimit;
    }
    Ok((sup, at))
}

/// Verdict on the reproducing kernel thesis for `phi_alpha`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RktReport {
    pub alpha: f64,
    #[serde(rename = "S_squared")]
    pub s_squared: f64,
    pub beta_star: BetaStar,
    pub norm: f64,
    pub holds: bool,
    pub count: usize,
    /// `norm - S_squared`.
    pub gap: f64,
}

/// The thesis holds exactly when `K_alpha` has no eigenvalues above the band.
/// The numerical gap `||K_alpha|| - S^2` must agree: at most `1e-6` when it
/// holds, positive when it fails; otherwise [`Error::Inconsistent`].
pub fn rkt_decision(alpha: Alpha) -> Result<RktReport> {
    let count = count_eigenvalues(alpha)?;
    let norm = operator_norm(alpha)?;
    let (s_squared, beta_star) = rkt_supremum(alpha, 1e-8)?;
    let gap = norm - s_squared;
    let holds = count == 0;
    let consistent = if holds { gap.abs() <= GAP_TOL } else { gap > 0.0 };
    if !consistent {
        return Err(Error::Inconsistent(format!(
            "alpha = {alpha}: {count} eigenvalue(s) but norm - S^2 = {gap:e}"
        )));
    }
    Ok(RktReport {
        alpha: alpha.get(),
        s_squared,
        beta_star,
        norm,
        holds,
        count,
        gap,
    })
}

/// `(alpha+beta) zeta(1+alpha+beta) - (alpha+beta)/(alpha-beta) - 1`, which vanishes
/// exactly when `F(1)` equals the limit `1/(alpha-beta) + 1/(alpha+beta)`.
pub fn f1inf_equation_gap(alpha: Alpha, beta: f64) -> Result<f64> {
    let a = alpha.get();
    if !(beta > 0.0 && beta < a) {
        return Err(Error::domain(format!("need 0 < beta < alpha, got beta = {beta}")));
    }
    let sum = a + beta;
    Ok(sum * zeta(1.0 + sum, ZETA_TOL)? - sum / (a - beta) - 1.0)
}

/// Upper bound `1/(alpha-beta) + 1/(alpha+beta) + alpha/(6n^2) - n^{-(alpha-beta)}/12`
/// on `F(n)`, valid when `1 <= alpha - beta <= 2`.
pub fn em_upper_bound(alpha: Alpha, beta: f64, n: u64) -> f64 {
    let a = alpha.get();
    let nf = n as f64;
    let g = a - beta;
    1.0 / g + 1.0 / (a + beta) + a / (6.0 * nf * nf) - (-g * nf.ln()).exp() / 12.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{quadratic_form, quadratic_form_complex};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn alpha(v: f64) -> Alpha {
        Alpha::new(v).unwrap()
    }

    /// `<K x, x> / ||x||^2` for `x = (n^{-1/2-beta})` with both sums cut at `n`.
    fn brute_ratio(a: f64, beta: f64, n: usize) -> f64 {
        let x: Vec<f64> = (1..=n).map(|k| (k as f64).powf(-0.5 - beta)).collect();
        let norm: f64 = x.iter().map(|v| v * v).sum();
        quadratic_form(alpha(a), &x) / norm
    }

    #[test]
    fn f_sequence_endpoints() {
        for (a, b) in [(1.0, 0.5), (3.0, 1.0), (0.5, 2.0), (4.0, 4.0)] {
            let f1 = f_sequence(alpha(a), b, 1).unwrap();
            let z = zeta(1.0 + a + b, 1e-14).unwrap();
            assert!((f1 - z).abs() <= 1e-10, "{a} {b}");
        }
        for (a, b) in [(1.0, 0.2), (3.0, 1.0), (2.0, 0.3)] {
            let f = f_sequence(alpha(a), b, 100_000).unwrap();
            assert!((f - 1.0 / (a - b) - 1.0 / (a + b)).abs() <= 1e-3, "{a} {b}: {f}");
        }
    }

    #[test]
    fn f_sequence_direct_sum() {
        // direct head and a long direct tail with an integral bracket
        let (a, b, n) = (1.5, 0.7, 7u64);
        let (g, d) = (a - b, a + b);
        let nf = n as f64;
        let head: f64 = (1..=n).map(|m| (m as f64).powf(g - 1.0)).sum::<f64>() * nf.powf(-g);
        let cut = 200_000u64;
        let tail: f64 = (n + 1..=cut).rev().map(|m| (m as f64).powf(-d - 1.0)).sum::<f64>()
            + (cut as f64 + 0.5).powf(-d) / d;
        let f = f_sequence(alpha(a), b, n).unwrap();
        assert!((f - head - nf.powf(d) * tail).abs() < 1e-10);
    }

    #[test]
    fn em_bound_holds_on_grid() {
        for i in 0..10 {
            for j in 0..10 {
                let beta = 0.1 + 0.3 * i as f64;
                let a = beta + 1.0 + j as f64 / 9.0;
                let al = alpha(a);
                let mut head = 0.0;
                for n in 1..=1000u64 {
                    head = head_step(head, a - beta, n);
                    let f = head + normalized_tail(n, 1.0 + a + beta);
                    assert!(f <= em_upper_bound(al, beta, n) + 1e-12, "{a} {beta} {n}");
                }
            }
        }
    }

    #[test]
    fn ratio_matches_truncated_form() {
        // large beta: the truncated form converges fast
        for (a, b) in [(0.5, 1.5), (2.0, 1.0), (3.0, 2.5), (1.0, 4.0), (2.0, 2.0)] {
            let r = kernel_ratio(alpha(a), b, 1e-13).unwrap();
            let brute = brute_ratio(a, b, 3000);
            assert!((r - brute).abs() < 1e-6, "{a} {b}: {r} vs {brute}");
        }
    }

    #[test]
    fn ratio_endpoint_limits() {
        for a in [0.5, 1.0, 3.0] {
            let r0 = kernel_ratio(alpha(a), 1e-4, 1e-12).unwrap();
            assert!((r0 - 2.0 / a).abs() < 5e-3, "{a}: {r0}");
        }
        let r = kernel_ratio(alpha(1.0), 50.0, 1e-12).unwrap();
        assert!((r - 1.0).abs() < 1e-3, "{r}");
        for a in [0.5, 3.0] {
            let r = kernel_ratio(alpha(a), 50.0, 1e-12).unwrap();
            assert!((r - 1.0).abs() < 1e-3, "{a}: {r}");
        }
    }

    #[test]
    fn ratio_continuous_across_diagonal() {
        let al = alpha(1.3);
        let mid = kernel_ratio(al, 1.3, 1e-12).unwrap();
        let near = kernel_ratio(al, 1.3 + 1e-4, 1e-12).unwrap();
        assert!((mid - near).abs() < 1e-4);
    }

    #[test]
    fn ratio_below_norm() {
        for a in [0.5, 2.0, 4.0] {
            let norm = operator_norm(alpha(a)).unwrap();
            for b in [1e-3, 0.1, 0.7, 2.0, 10.0] {
                let r = kernel_ratio(alpha(a), b, 1e-12).unwrap();
                assert!(r <= norm + 1e-8, "{a} {b}: {r} > {norm}");
            }
        }
    }

    #[test]
    fn real_direction_dominates() {
        let n = 400;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = alpha(1.7);
        for _ in 0..20 {
            let beta: f64 = rng.gen_range(0.05..3.0);
            let t: f64 = rng.gen_range(-30.0..30.0);
            let w = Complex64::new(0.5 + beta, t);
            let xc: Vec<Complex64> = (1..=n).map(|k| (-w.conj() * (k as f64).ln()).exp()).collect();
            let xr: Vec<f64> = (1..=n).map(|k| (k as f64).powf(-0.5 - beta)).collect();
            assert!(quadratic_form_complex(a, &xc) <= quadratic_form(a, &xr) + 1e-8);
        }
    }

    #[test]
    fn f1inf_gap_signs() {
        let g = f1inf_equation_gap(alpha(1.8), 0.5).unwrap();
        assert!(g != 0.0 && g.is_finite());
        assert!(f1inf_equation_gap(alpha(1.8), 1.8 - 1e-3).unwrap() < 0.0);
        for (a, b) in [(1.0, 0.2), (3.0, 1.0), (0.7, 0.6)] {
            let s = a + b;
            let lhs = s * zeta(1.0 + s, 1e-14).unwrap();
            assert!(s < lhs && lhs < 1.0 + s);
        }
        assert!(f1inf_equation_gap(alpha(1.0), 1.0).is_err());
    }

    #[test]
    fn supremum_small_alpha_at_left_endpoint() {
        let (s2, at) = rkt_supremum(alpha(0.5), 1e-8).unwrap();
        assert_eq!(at, BetaStar::ZeroLimit);
        assert!((s2 - 4.0).abs() < 5e-3);
    }

    #[test]
    fn decisions() {
        let a1 = crate::spectrum::threshold_alpha1(1e-6).unwrap();
        for a in [0.25, 0.5, 1.0, 1.5, a1 - 0.1, a1 + 0.1, 2.0, 4.0, 8.0] {
            let r = rkt_decision(alpha(a)).unwrap();
            assert_eq!(r.holds, r.count == 0, "{a}");
            assert_eq!(r.holds, a < a1, "{a}");
            assert!(r.s_squared <= r.norm + 1e-8, "{a}");
            assert!(r.s_squared >= (2.0 / a).max(1.0) - 1e-6, "{a}");
            if r.holds {
                assert_eq!(r.beta_star, BetaStar::ZeroLimit);
            }
        }
        let r = rkt_decision(alpha(4.0)).unwrap();
        let json = serde_json::to_value(&r).unwrap();
        assert!(json["S_squared"].is_f64() && json["beta_star"].is_f64());
        let r = rkt_decision(alpha(1.0)).unwrap();
        assert_eq!(serde_json::to_value(&r).unwrap()["beta_star"], "beta->0+");
    }
}
