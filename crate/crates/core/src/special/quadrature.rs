//! Globally adaptive Gauss–Kronrod (7, 15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Refinement limits for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveLimits {
    /// Maximum bisection depth of any segment relative to its initial piece.
    pub max_depth: u32,
    /// Hard cap on the number of live segments.
    pub max_segments: usize,
}

impl Default for AdaptiveLimits {
    fn default() -> Self {
        AdaptiveLimits {
            max_depth: 30,
            max_segments: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, depth: u32) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &wk)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += wk * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Segment {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
        depth,
    }
}

/// Integrates `f` over the pieces delimited by `breaks` (sorted, at least two
/// points) to absolute error `tol`, always bisecting the piece with the
/// largest error estimate.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    tol: f64,
    limits: AdaptiveLimits,
) -> Result<f64> {
    if breaks.len() < 2 {
        return Err(Error::domain("quadrature needs at least one interval"));
    }
    let mut heap = BinaryHeap::with_capacity(breaks.len() * 4);
    let mut frozen_value = 0.0;
    let mut frozen_error = 0.0;
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            heap.push(gauss_kronrod(&f, w[0], w[1], 0));
        }
    }
    let mut total_error: f64 = heap.iter().map(|s| s.error).sum();
    let mut iterations = 0usize;
    while total_error + frozen_error > tol {
        iterations += 1;
        // Summing the running error drifts; refresh it now and then.
        if iterations % 4096 == 0 {
            total_error = heap.iter().map(|s| s.error).sum();
            if total_error + frozen_error <= tol {
                break;
            }
        }
        let Some(worst) = heap.pop() else { break };
        if worst.depth >= limits.max_depth || worst.b - worst.a <= 4.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs()) {
            frozen_value += worst.value;
            frozen_error += worst.error;
            total_error -= worst.error;
            continue;
        }
        if heap.len() >= limits.max_segments {
            return Err(Error::no_convergence(
                "adaptive quadrature",
                format!("segment cap reached with error {:e}", total_error + frozen_error),
            ));
        }
        let mid = 0.5 * (worst.a + worst.b);
        let left = gauss_kronrod(&f, worst.a, mid, worst.depth + 1);
        let right = gauss_kronrod(&f, mid, worst.b, worst.depth + 1);
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    total_error = heap.iter().map(|s| s.error).sum();
    if total_error + frozen_error > tol {
        return Err(Error::no_convergence(
            "adaptive quadrature",
            format!(
                "depth cap {} reached with error estimate {:e} > {tol:e}",
                limits.max_depth,
                total_error + frozen_error
            ),
        ));
    }
    let mut values: Vec<f64> = heap.into_iter().map(|s| s.value).collect();
    values.push(frozen_value);
    // Sum small contributions first.
    values.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
    Ok(values.iter().sum())
}
