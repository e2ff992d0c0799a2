//! An explicit feasible solution of the dual adversary SDP for the
//! combinatorial group testing problem, with objective at most `π√n`.
//!
//! For `S ⊆ [n]` and `p ∈ (0,1)` let
//!
//! ```text
//! ψ_S(p)[x] = (1−p)^{−|x|/2} · (np/(1−p))^{+1/4}   if |x ∩ S| = 0
//!           = (1−p)^{−|x|/2} · (np/(1−p))^{−1/4}   if |x ∩ S| = 1
//!           = 0                                     otherwise
//! Y_S(p)    = p^{|S|−1} (1−p)^{n−|S|} / 2 · ψ_S(p) ψ_S(p)ᵀ
//! X_S       = ∫₀¹ Y_S(p) dp
//! ```
//!
//! Each `ψ_S(p)` depends only on the hidden string `x`, so all matrices are
//! indexed by `x ∈ {0,1}^n` (bit `i` of the index is `x_{i+1}`). Every entry
//! is `scalar · p^a (1−p)^b` integrated in closed form as
//! `scalar · B(a+1, b+1)`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{frobenius, integrate_split, log_beta, min_eigenvalue, DenseMatrix};

pub const MAX_WITNESS_N: usize = 10;
pub const TOL_PSD: f64 = 1e-8;
pub const TOL_CONSTRAINT: f64 = 1e-6;

/// `Y_S(p)[x, x′] = scalar · p^a (1−p)^b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryExponents {
    pub a: f64,
    pub b: f64,
    pub scalar: f64,
}

impl EntryExponents {
    pub fn integral(&self) -> Result<f64> {
        Ok(self.scalar * log_beta(self.a + 1.0, self.b + 1.0)?.exp())
    }

    pub fn eval(&self, p: f64) -> f64 {
        self.eval_split(p, 1.0 - p)
    }

    /// Value at `p` given `q = 1 − p` separately.
    pub fn eval_split(&self, p: f64, q: f64) -> f64 {
        self.scalar * p.powf(self.a) * q.powf(self.b)
    }
}

/// `+1` when `|x ∩ S| = 0`, `−1` when it is 1, `None` otherwise.
fn side(s: usize, x: usize) -> Option<i32> {
    match (s & x).count_ones() {
        0 => Some(1),
        1 => Some(-1),
        _ => None,
    }
}

/// Exponents of `Y_S(p)[x, x′]`, or `None` when the entry vanishes.
/// Sets and strings are bitmasks over `n` bits.
pub fn entry_exponents(n: usize, s: usize, x: usize, xp: usize) -> Option<EntryExponents> {
    let (sx, sxp) = (side(s, x)?, side(s, xp)?);
    let k = s.count_ones() as f64;
    let e = (sx + sxp) as f64 / 4.0;
    let weights = (x.count_ones() + xp.count_ones()) as f64 / 2.0;
    Some(EntryExponents {
        a: k - 1.0 + e,
        b: n as f64 - k - weights - e,
        scalar: (n as f64).powf(e) / 2.0,
    })
}

/// `X_S` restricted to its support `{x : |x ∩ S| ≤ 1}`; zero elsewhere.
#[derive(Clone, Debug)]
pub struct SupportBlock {
    pub support: Vec<usize>,
    pub matrix: DenseMatrix,
}

#[derive(Clone, Debug)]
pub struct WitnessFamily {
    pub n: usize,
    /// Indexed by the bitmask of `S`.
    pub blocks: Vec<SupportBlock>,
}

impl WitnessFamily {
    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// `X_S[x, x′]`.
    pub fn entry(&self, s: usize, x: usize, xp: usize) -> f64 {
        let block = &self.blocks[s];
        match (block.support.binary_search(&x), block.support.binary_search(&xp)) {
            (Ok(i), Ok(j)) => block.matrix[(i, j)],
            _ => 0.0,
        }
    }

    /// `X_S` as a full `2^n × 2^n` matrix.
    pub fn dense(&self, s: usize) -> DenseMatrix {
        let block = &self.blocks[s];
        let mut out = DenseMatrix::zeros(self.dim(), self.dim());
        for (i, &x) in block.support.iter().enumerate() {
            for (j, &xp) in block.support.iter().enumerate() {
                out[(x, xp)] = block.matrix[(i, j)];
            }
        }
        out
    }
}

/// Integrated entries depend only on `(|S|, |x|, |x′|, sides)`; caching them
/// keeps the Beta evaluations to a few thousand.
struct EntryCache {
    n: usize,
    values: Vec<f64>,
}

impl EntryCache {
    fn new(n: usize) -> Result<EntryCache> {
        let m = n + 1;
        let mut values = vec![f64::NAN; m * m * m * 4];
        for k in 0..=n {
            for wx in 0..=n {
                for wy in 0..=n {
                    for (code, (sx, sy)) in [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().enumerate() {
                        // Representative strings realising the profile, if any.
                        let (x, y) = (Self::rep(n, k, wx, sx), Self::rep(n, k, wy, sy));
                        if let (Some(x), Some(y)) = (x, y) {
                            let e = entry_exponents(n, (1 << k) - 1, x, y)
                                .expect("representatives lie in the support");
                            values[((k * m + wx) * m + wy) * 4 + code] = e.integral()?;
                        }
                    }
                }
            }
        }
        Ok(EntryCache { n, values })
    }

    /// A string of weight `w` meeting `S = {1..k}` in `hits` positions.
    fn rep(n: usize, k: usize, w: usize, hits: usize) -> Option<usize> {
        if hits > k || hits > w || w - hits > n - k {
            return None;
        }
        let inside = (1usize << hits) - 1;
        let outside = ((1usize << (w - hits)) - 1) << k;
        Some(inside | outside)
    }

    fn get(&self, s: usize, x: usize, y: usize) -> f64 {
        let m = self.n + 1;
        let k = s.count_ones() as usize;
        let (hx, hy) = ((s & x).count_ones() as usize, (s & y).count_ones() as usize);
        let (wx, wy) = (x.count_ones() as usize, y.count_ones() as usize);
        self.values[((k * m + wx) * m + wy) * 4 + hx * 2 + hy]
    }
}

pub fn build_witness(n: usize) -> Result<WitnessFamily> {
    if n == 0 || n > MAX_WITNESS_N {
        return Err(Error::Resource(format!(
            "witness construction supports 1 ≤ n ≤ {MAX_WITNESS_N}, got {n}"
        )));
    }
    let cache = EntryCache::new(n)?;
    let dim = 1usize << n;
    let blocks = (0..dim)
        .into_par_iter()
        .map(|s| {
            let support: Vec<usize> = (0..dim).filter(|&x| side(s, x).is_some()).collect();
            let len = support.len();
            let matrix =
                DenseMatrix::from_fn(len, len, |i, j| cache.get(s, support[i], support[j]));
            SupportBlock { support, matrix }
        })
        .collect();
    Ok(WitnessFamily { n, blocks })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub n: usize,
    /// Smallest eigenvalue over all `X_S`.
    pub min_eig: f64,
    /// Smallest `λ_min(X_S) / ‖X_S‖_F`.
    pub min_eig_relative: f64,
    /// `max_{x≠x′} |Σ_{S : |x∩S|+|x′∩S|=1} X_S[x,x′] − 1|`.
    pub max_constraint_dev: f64,
    /// `max_x Σ_S X_S[x,x]`.
    pub objective: f64,
    pub pi_sqrt_n: f64,
    /// `π√n − objective`.
    pub objective_gap: f64,
    /// Largest deviation of `Σ_S X_S[x,x]` from `(π/2)(√n + |x|/√n)`.
    pub diagonal_dev: f64,
    pub quadrature_dev: Option<f64>,
    pub psd_ok: bool,
    pub constraint_ok: bool,
}

pub fn verify(w: &WitnessFamily, tol_psd: f64, tol_constraint: f64) -> Result<WitnessReport> {
    let n = w.n;
    let dim = w.dim();
    let eigs: Vec<(f64, f64)> = w
        .blocks
        .par_iter()
        .map(|b| -> Result<(f64, f64)> {
            let mut lo = min_eigenvalue(&b.matrix)?;
            if b.support.len() < dim {
                // The full matrix has zero rows off the support.
                lo = lo.min(0.0);
            }
            let norm = frobenius(&b.matrix);
            Ok((lo, if norm > 0.0 { lo / norm } else { 0.0 }))
        })
        .collect::<Result<_>>()?;
    let min_eig = eigs.iter().map(|e| e.0).fold(f64::INFINITY, f64::min);
    let min_eig_relative = eigs.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);

    let max_constraint_dev = (0..dim)
        .into_par_iter()
        .map(|x| {
            let mut worst = 0.0f64;
            for xp in 0..dim {
                if xp == x {
                    continue;
                }
                let sum: f64 = (0..dim)
                    .filter(|&s| (s & x).count_ones() + (s & xp).count_ones() == 1)
                    .map(|s| w.entry(s, x, xp))
                    .sum();
                worst = worst.max((sum - 1.0).abs());
            }
            worst
        })
        .reduce(|| 0.0, f64::max);

    let root = (n as f64).sqrt();
    let diagonals: Vec<f64> = (0..dim)
        .into_par_iter()
        .map(|x| (0..dim).map(|s| w.entry(s, x, x)).sum())
        .collect();
    let objective = diagonals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let diagonal_dev = diagonals
        .iter()
        .enumerate()
        .map(|(x, v)| (v - PI / 2.0 * (root + x.count_ones() as f64 / root)).abs())
        .fold(0.0, f64::max);
    let pi_sqrt_n = PI * root;
    Ok(WitnessReport {
        n,
        min_eig,
        min_eig_relative,
        max_constraint_dev,
        objective,
        pi_sqrt_n,
        objective_gap: pi_sqrt_n - objective,
        diagonal_dev,
        quadrature_dev: None,
        psd_ok: min_eig_relative >= -tol_psd,
        constraint_ok: max_constraint_dev <= tol_constraint,
    })
}

/// Recomputes entries by adaptive quadrature and returns the largest
/// difference from the stored closed-form values. Every entry is checked
/// when `samples` covers them all, otherwise a seeded random sample.
pub fn quadrature_crosscheck(w: &WitnessFamily, samples: usize, seed: u64) -> Result<f64> {
    if w.n > 6 {
        return Err(Error::Resource(format!(
            "quadrature cross-check supports n ≤ 6, got {}",
            w.n
        )));
    }
    let dim = w.dim();
    let total = dim * dim * dim;
    let picks: Vec<(usize, usize, usize)> = if samples >= total {
        (0..total).map(|t| (t / (dim * dim), (t / dim) % dim, t % dim)).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..samples)
            .map(|_| {
                (
                    rng.random_range(0..dim),
                    rng.random_range(0..dim),
                    rng.random_range(0..dim),
                )
            })
            .collect()
    };
    let devs = picks
        .par_iter()
        .map(|&(s, x, xp)| -> Result<f64> {
            let stored = w.entry(s, x, xp);
            let numeric = match entry_exponents(w.n, s, x, xp) {
                Some(e) => integrate_split(|p, q| e.eval_split(p, q), 1e-12)?,
                None => 0.0,
            };
            Ok((stored - numeric).abs())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(devs.into_iter().fold(0.0, f64::max))
}

/// Builds and verifies the witness, adding the quadrature check when `n ≤ 6`.
pub fn witness_report(n: usize, samples: usize, seed: u64) -> Result<WitnessReport> {
    let w = build_witness(n)?;
    let mut report = verify(&w, TOL_PSD, TOL_CONSTRAINT)?;
    if n <= 6 {
        report.quadrature_dev = Some(quadrature_crosscheck(&w, samples, seed)?);
    }
    Ok(report)
}
