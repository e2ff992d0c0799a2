//! Adaptive Gauss–Kronrod quadrature on `[0, 1]`.
//!
//! The integrand is pulled back through `p = sin²(πt/2)`, which turns
//! `p^{-1/2}` and `(1-p)^{-1/2}` endpoint singularities into bounded
//! factors, then `[0, 1]` in `t` is split at `1/2` and refined by bisecting
//! the interval with the largest error estimate.

use std::collections::BinaryHeap;
use std::f64::consts::PI;

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

/// Maximum number of subintervals before giving up.
pub const MAX_INTERVALS: usize = 4000;

struct Piece {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15(g: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let fc = g(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (k, &x) in XGK.iter().enumerate().take(7) {
        let s = g(c - h * x) + g(c + h * x);
        kron += WGK[k] * s;
        if k % 2 == 1 {
            gauss += WG[k / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// `∫₀¹ f(p) dp` to absolute accuracy `tol`.
///
/// Near `p = 1` the argument carries only absolute precision, so an integrand
/// with a `(1−p)^{-c}` singularity is better served by [`integrate_split`].
pub fn integrate<F: Fn(f64) -> f64>(f: F, tol: f64) -> Result<f64> {
    integrate_split(|p, _| f(p), tol)
}

/// `∫₀¹ f(p, 1−p) dp` to absolute accuracy `tol`, with both `p` and `1−p`
/// computed to full relative precision.
pub fn integrate_split<F: Fn(f64, f64) -> f64>(f: F, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Input(format!("tolerance must be positive, got {tol}")));
    }
    let g = |t: f64| {
        let jac = 0.5 * PI * (PI * t).sin();
        if jac <= 0.0 {
            return 0.0;
        }
        let s = (0.5 * PI * t).sin();
        let c = (0.5 * PI * t).cos();
        f(s * s, c * c) * jac
    };
    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut err = 0.0;
    for (lo, hi) in [(0.0, 0.5), (0.5, 1.0)] {
        let (value, error) = gk15(&g, lo, hi);
        total += value;
        err += error;
        heap.push(Piece { lo, hi, value, error });
    }
    while err > tol {
        if !total.is_finite() {
            return Err(Error::Accuracy {
                estimate: total,
                error_bound: f64::INFINITY,
            });
        }
        if heap.len() >= MAX_INTERVALS {
            return Err(Error::Accuracy {
                estimate: total,
                error_bound: err,
            });
        }
        let worst = heap.pop().expect("heap is nonempty");
        total -= worst.value;
        err -= worst.error;
        let mid = 0.5 * (worst.lo + worst.hi);
        for (lo, hi) in [(worst.lo, mid), (mid, worst.hi)] {
            let (value, error) = gk15(&g, lo, hi);
            total += value;
            err += error;
            heap.push(Piece { lo, hi, value, error });
        }
        // Recompute the running sums occasionally to avoid drift.
        if heap.len() % 64 == 0 {
            total = heap.iter().map(|p| p.value).sum();
            err = heap.iter().map(|p| p.error).sum();
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_and_linear() {
        assert!((integrate(|_| 1.0, 1e-12).unwrap() - 1.0).abs() < 1e-12);
        assert!((integrate(|p| 2.0 * (1.0 - p), 1e-12).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn arcsine_density() {
        let v = integrate(|p| p.powf(-0.5) * (1.0 - p).powf(-0.5), 1e-10).unwrap();
        assert!((v - PI).abs() < 1e-10);
    }

    #[test]
    fn nonintegrable_reports_accuracy() {
        let r = integrate(|p| 1.0 / (p * p), 1e-10);
        assert!(matches!(r, Err(Error::Accuracy { .. })));
    }
}
