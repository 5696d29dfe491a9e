//! Adaptive Gauss–Kronrod quadrature and central finite differences.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};

/// Subdivision budget shared by all quadrature entry points.
pub const MAX_SUBDIVISIONS: usize = 4000;

// 15-point Kronrod nodes (non-negative half) and weights, with the embedded
// 7-point Gauss weights on the odd Kronrod nodes.
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

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
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

fn gauss_kronrod<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, &x) in XGK.iter().enumerate().take(7) {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Segment {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// `∫_a^b f` to absolute accuracy `tol`.
pub fn adaptive_integral<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    adaptive_integral_with_breaks(f, a, b, &[], tol)
}

/// Like [`adaptive_integral`], but the interval is first split at every
/// break point inside `(a, b)`. Pass the locations where `f` has kinks or
/// jumps; Gauss–Kronrod only converges quickly on smooth pieces.
pub fn adaptive_integral_with_breaks<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: f64,
) -> Result<f64> {
    if !(a <= b) {
        return Err(Error::InvalidParameter("integration bounds must satisfy a <= b".into()));
    }
    if a == b {
        return Ok(0.0);
    }
    let mut cuts: Vec<f64> = Vec::with_capacity(breaks.len() + 2);
    cuts.push(a);
    cuts.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut heap: BinaryHeap<Segment> = cuts
        .windows(2)
        .map(|w| gauss_kronrod(f, w[0], w[1]))
        .collect();
    let mut total: f64 = heap.iter().map(|s| s.value).sum();
    let mut error: f64 = heap.iter().map(|s| s.error).sum();

    // segments too narrow to split in floating point
    let mut frozen_value = 0.0;
    let mut subdivisions = 0;
    while !(error <= tol) {
        if subdivisions >= MAX_SUBDIVISIONS || heap.is_empty() {
            return Err(Error::NumericalFailure {
                estimate: total,
                error_estimate: error,
            });
        }
        let worst = heap.pop().expect("heap checked non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            frozen_value += worst.value;
            continue;
        }
        let left = gauss_kronrod(f, worst.a, mid);
        let right = gauss_kronrod(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
    }
    // resum from the pieces to shed rounding accumulated in `total`
    Ok(heap.iter().map(|s| s.value).sum::<f64>() + frozen_value)
}

/// Central finite difference of order 1 or 2 with step `h`.
pub fn finite_difference<F: Fn(f64) -> f64 + ?Sized>(f: &F, x: f64, order: u8, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidParameter("finite difference step must be positive".into()));
    }
    match order {
        1 => Ok((f(x + h) - f(x - h)) / (2.0 * h)),
        2 => Ok((f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)),
        _ => Err(Error::InvalidParameter("finite difference order must be 1 or 2".into())),
    }
}
