//! Worst-case deviation of a multilinear polynomial under input noise.
//!
//! By default noisy inputs stay inside `[0,1]^m`: a bit equal to 0 may move
//! up to `δ`, a bit equal to 1 may move down to `1−δ`. [`NoiseBox::Full`]
//! allows both directions. A multilinear polynomial is affine in each
//! coordinate, so its extremes over either box are attained at the corners. For each domain point the
//! corner values are produced by a per-variable butterfly over the dense
//! coefficient vector, costing `O(m·2^m)` per point.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::MultiPoly;
use crate::boolfn::PartialFn;
use crate::error::{input, Result};

/// Arity up to which corners are enumerated exhaustively.
pub const EXACT_ROBUSTNESS_ARITY: usize = 16;
/// Default number of random corners beyond that arity.
pub const DEFAULT_SAMPLES: usize = 100_000;

/// Shape of the perturbation box around a Boolean point `x`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NoiseBox {
    /// `[x_i − δ, x_i + δ] ∩ [0, 1]` per coordinate.
    #[default]
    Clipped,
    /// `[x_i − δ, x_i + δ]` per coordinate.
    Full,
}

impl NoiseBox {
    /// `(low, high)` ends of the interval for a coordinate with value `xi`.
    fn ends(self, xi: f64, delta: f64) -> (f64, f64) {
        match self {
            NoiseBox::Full => (xi - delta, xi + delta),
            NoiseBox::Clipped if xi == 0.0 => (0.0, delta),
            NoiseBox::Clipped => (1.0 - delta, 1.0),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RobustnessOptions {
    pub noise: NoiseBox,
    /// Random corners drawn beyond [`EXACT_ROBUSTNESS_ARITY`].
    pub samples: usize,
    pub seed: u64,
}

impl Default for RobustnessOptions {
    fn default() -> Self {
        RobustnessOptions {
            noise: NoiseBox::Clipped,
            samples: DEFAULT_SAMPLES,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RobustnessReport {
    /// Largest `|h(x) − p(x + Δ)|` found.
    pub margin: f64,
    /// Domain point attaining it (leftmost bit most significant).
    pub input: usize,
    /// Corner attaining it: bit set means the upper end of that
    /// coordinate's interval, same bit layout as `input`.
    pub corner: usize,
    pub exact: bool,
    /// Number of random corners evaluated, zero when exact.
    pub samples: usize,
}

/// `max |h(x) − p(x + Δ)|` over `x ∈ Dom(h)` and the clipped noise box;
/// exact up to [`EXACT_ROBUSTNESS_ARITY`], sampled with the defaults beyond.
pub fn robustness_margin(p: &MultiPoly, h: &PartialFn, delta: f64) -> Result<RobustnessReport> {
    robustness_margin_with(p, h, delta, &RobustnessOptions::default())
}

pub fn robustness_margin_with(
    p: &MultiPoly,
    h: &PartialFn,
    delta: f64,
    opts: &RobustnessOptions,
) -> Result<RobustnessReport> {
    let m = h.arity();
    if p.num_vars() != m {
        return input(format!(
            "polynomial has {} variables, function has arity {m}",
            p.num_vars()
        ));
    }
    if !p.is_multilinear() {
        return input("robustness margin needs a multilinear polynomial");
    }
    if !(0.0..0.5).contains(&delta) {
        return input(format!("noise level must lie in [0, 1/2), got {delta}"));
    }
    if m <= EXACT_ROBUSTNESS_ARITY {
        Ok(exact(p, h, delta, opts.noise))
    } else {
        sampled(p, h, delta, opts)
    }
}

/// `E[p(z)]` for independent bits `z_i ~ Bernoulli(y_i)`, by enumerating
/// the cube. Equals `p(y)` when `p` is multilinear.
pub fn bernoulli_expectation(p: &MultiPoly, y: &[f64]) -> Result<f64> {
    let m = p.num_vars();
    if y.len() != m {
        return input(format!("point has {} coordinates, expected {m}", y.len()));
    }
    if m > EXACT_ROBUSTNESS_ARITY {
        return input(format!("enumeration supports at most {EXACT_ROBUSTNESS_ARITY} variables"));
    }
    if y.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return input("probabilities must lie in [0, 1]");
    }
    Ok((0..1usize << m)
        .map(|z| {
            let prob: f64 = (0..m)
                .map(|i| if (z >> (m - 1 - i)) & 1 == 1 { y[i] } else { 1.0 - y[i] })
                .product();
            prob * p.evaluate_cube(z)
        })
        .sum())
}

fn target(h: &PartialFn, x: usize) -> f64 {
    if h.value(x) == Some(true) {
        1.0
    } else {
        0.0
    }
}

fn exact(p: &MultiPoly, h: &PartialFn, delta: f64, noise: NoiseBox) -> RobustnessReport {
    let m = h.arity();
    let mut coeffs = vec![0.0; 1usize << m];
    for (e, c) in p.terms() {
        let mask = e
            .iter()
            .enumerate()
            .fold(0usize, |acc, (i, &k)| acc | ((k as usize) << (m - 1 - i)));
        coeffs[mask] += c;
    }
    let domain: Vec<usize> = h.domain().collect();
    let best = domain
        .par_iter()
        .map(|&x| {
            let mut v = coeffs.clone();
            for i in 0..m {
                let bit = 1usize << (m - 1 - i);
                let xi = if x & bit != 0 { 1.0 } else { 0.0 };
                let (lo, hi) = noise.ends(xi, delta);
                for s in 0..v.len() {
                    if s & bit == 0 {
                        let c0 = v[s];
                        let c1 = v[s | bit];
                        v[s] = c0 + lo * c1;
                        v[s | bit] = c0 + hi * c1;
                    }
                }
            }
            let t = target(h, x);
            let (corner, dev) = v
                .iter()
                .enumerate()
                .map(|(c, val)| (c, (t - val).abs()))
                .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
            (dev, x, corner)
        })
        .reduce(
            || (f64::NEG_INFINITY, usize::MAX, 0),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );
    RobustnessReport {
        margin: best.0,
        input: best.1,
        corner: best.2,
        exact: true,
        samples: 0,
    }
}

fn sampled(p: &MultiPoly, h: &PartialFn, delta: f64, opts: &RobustnessOptions) -> Result<RobustnessReport> {
    let samples = opts.samples;
    if samples == 0 {
        return input("sampling needs at least one sample");
    }
    let m = h.arity();
    let domain: Vec<usize> = h.domain().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best = RobustnessReport {
        margin: f64::NEG_INFINITY,
        input: 0,
        corner: 0,
        exact: false,
        samples,
    };
    let mut y = vec![0.0; m];
    for _ in 0..samples {
        let x = domain[rng.random_range(0..domain.len())];
        let corner: usize = rng.random_range(0..1usize << m);
        for (i, yi) in y.iter_mut().enumerate() {
            let bit = 1usize << (m - 1 - i);
            let xi = if x & bit != 0 { 1.0 } else { 0.0 };
            let (lo, hi) = opts.noise.ends(xi, delta);
            *yi = if corner & bit != 0 { hi } else { lo };
        }
        let dev = (target(h, x) - p.eval_unchecked(&y)).abs();
        if dev > best.margin {
            best.margin = dev;
            best.input = x;
            best.corner = corner;
        }
    }
    Ok(best)
}
