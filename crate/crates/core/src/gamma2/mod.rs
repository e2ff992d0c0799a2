//! The factorization norm `γ2(A) = min_{BC=A} ‖B‖_row ‖C‖_col` and its
//! approximate version, computed by semidefinite programming.
//!
//! Both are solved in the form
//!
//! ```text
//! minimize t  s.t.  Z = [[P, A], [Aᵀ, Q]] ⪰ 0,  Z_ii ≤ t,
//! ```
//!
//! where the off-diagonal block is fixed to `A` for the exact norm and only
//! box-constrained for the approximate one. A factorization is read off a
//! Gram decomposition of the optimal `Z`.

mod comm;
mod ops;

pub use comm::{build_comm, build_gadget, CommName, Gadget, SignMatrix, MAX_GADGET_BITS, MAX_SIDE};
pub use ops::{
    amplify_matrix, hadamard_poly_compose, pm_amplifier, substitute_columns, AmplifiedMatrix,
    HadamardResult,
};

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::numerics::sdp::{solve_sdp, SdpOptions, SdpProblem, SdpTerm};
use crate::numerics::DenseMatrix;

pub const MAX_EXACT_DIM: usize = 64;
pub const MAX_APPROX_DIM: usize = 32;
/// Relative accuracy promised for SDP values.
pub const SDP_TOL: f64 = 1e-5;
pub const DEFAULT_APPROX_EPSILON: f64 = 2.0 / 3.0;

#[derive(Clone, Debug)]
pub struct Gamma2Result {
    /// Primal value `t`, an upper bound up to solver residuals.
    pub value: f64,
    /// Dual objective, a lower bound up to solver residuals.
    pub lower_bound: f64,
    /// `B` with `BC ≈ A`.
    pub b: DenseMatrix,
    pub c: DenseMatrix,
    pub residual: f64,
    pub iterations: usize,
}

impl Gamma2Result {
    /// `‖B‖_row · ‖C‖_col`.
    pub fn factor_norm(&self) -> f64 {
        row_norm(&self.b) * row_norm(&self.c.transpose())
    }
}

#[derive(Clone, Debug)]
pub struct ApproxMatrixResult {
    pub value: f64,
    pub lower_bound: f64,
    pub approximant: DenseMatrix,
    pub epsilon: f64,
    pub b: DenseMatrix,
    pub c: DenseMatrix,
}

/// JSON view of an [`ApproxMatrixResult`]; the factors are optional.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ApproxMatrixJson {
    pub value: f64,
    pub lower_bound: f64,
    pub epsilon: f64,
    pub rows: usize,
    pub cols: usize,
    pub approximant: Vec<Vec<f64>>,
    /// Largest `|A_xy − sign_xy|` over defined entries.
    pub max_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<Vec<f64>>>,
}

pub fn rows_of(m: &DenseMatrix) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

impl ApproxMatrixResult {
    pub fn max_error(&self, f: &SignMatrix) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..f.rows() {
            for j in 0..f.cols() {
                if let Some(s) = f.get(i, j) {
                    worst = worst.max((self.approximant[(i, j)] - s as f64).abs());
                }
            }
        }
        worst
    }

    pub fn to_json(&self, f: &SignMatrix, with_factors: bool) -> ApproxMatrixJson {
        ApproxMatrixJson {
            value: self.value,
            lower_bound: self.lower_bound,
            epsilon: self.epsilon,
            rows: self.approximant.nrows(),
            cols: self.approximant.ncols(),
            approximant: rows_of(&self.approximant),
            max_error: self.max_error(f),
            b: with_factors.then(|| rows_of(&self.b)),
            c: with_factors.then(|| rows_of(&self.c)),
        }
    }
}

/// Largest Euclidean norm of a row.
pub fn row_norm(m: &DenseMatrix) -> f64 {
    (0..m.nrows())
        .map(|i| m.row(i).norm())
        .fold(0.0, f64::max)
}

/// `max |A_ij|`.
pub fn max_abs(m: &DenseMatrix) -> f64 {
    m.iter().fold(0.0, |a, v| a.max(v.abs()))
}

/// Number of singular values above `tol · σ_max`.
pub fn numerical_rank(m: &DenseMatrix, tol: f64) -> usize {
    let sv = m.clone().singular_values();
    let top = sv.iter().fold(0.0f64, |a, &v| a.max(v));
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&v| v > tol * top).count()
}

/// Entry boxes for the off-diagonal block; equal ends pin the entry.
struct Boxes {
    rows: usize,
    cols: usize,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

struct Solved {
    value: f64,
    lower_bound: f64,
    z: DenseMatrix,
    residual: f64,
    iterations: usize,
}

fn solve_gamma2_sdp(boxes: &Boxes) -> Result<Solved> {
    let (r, c) = (boxes.rows, boxes.cols);
    let dim = r + c;
    let pinned = boxes.lo.iter().zip(&boxes.hi).all(|(l, h)| l == h);
    // Linear variables: t, one diagonal slack per row of Z, then two box
    // slacks per entry unless every entry is pinned.
    let n_lin = 1 + dim + if pinned { 0 } else { 2 * r * c };
    let mut terms = Vec::new();
    let mut b = Vec::new();
    for i in 0..r {
        for j in 0..c {
            let k = i * c + j;
            let entry = (i, r + j, 0.5);
            if pinned {
                terms.push(SdpTerm { psd: vec![entry], lin: vec![] });
                b.push(boxes.lo[k]);
            } else {
                terms.push(SdpTerm { psd: vec![entry], lin: vec![(1 + dim + 2 * k, 1.0)] });
                b.push(boxes.hi[k]);
                terms.push(SdpTerm { psd: vec![entry], lin: vec![(2 + dim + 2 * k, -1.0)] });
                b.push(boxes.lo[k]);
            }
        }
    }
    for i in 0..dim {
        terms.push(SdpTerm {
            psd: vec![(i, i, 1.0)],
            lin: vec![(0, -1.0), (1 + i, 1.0)],
        });
        b.push(0.0);
    }
    let mut c_lin = vec![0.0; n_lin];
    c_lin[0] = 1.0;
    let problem = SdpProblem {
        c_psd: DenseMatrix::zeros(dim, dim),
        c_lin,
        terms,
        b,
    };
    let opts = SdpOptions::default();
    let sol = solve_sdp(&problem, &opts)?;
    if sol.residual > SDP_TOL {
        return Err(Error::Solver {
            message: format!("γ2 SDP stopped with residual {:.3e}", sol.residual),
            best: Some(sol.y),
        });
    }
    Ok(Solved {
        value: sol.primal_objective,
        lower_bound: sol.dual_objective,
        z: sol.x_psd,
        residual: sol.residual,
        iterations: sol.iterations,
    })
}

/// `B` and `C` from a Gram decomposition of `Z`, rescaled so that
/// `‖B‖_row = ‖C‖_col`.
fn gram_factors(z: &DenseMatrix, r: usize) -> (DenseMatrix, DenseMatrix) {
    let eig = SymmetricEigen::new((z + z.transpose()) * 0.5);
    let dim = z.nrows();
    let mut v = eig.eigenvectors.clone();
    for k in 0..dim {
        let s = eig.eigenvalues[k].max(0.0).sqrt();
        v.column_mut(k).scale_mut(s);
    }
    let b = v.rows(0, r).into_owned();
    let c = v.rows(r, dim - r).transpose();
    let (nb, nc) = (row_norm(&b), row_norm(&c.transpose()));
    if nb > 0.0 && nc > 0.0 {
        let s = (nc / nb).sqrt();
        (b * s, c / s)
    } else {
        (b, c)
    }
}

fn check_dims(rows: usize, cols: usize, cap: usize) -> Result<()> {
    if rows == 0 || cols == 0 {
        return input("matrix must be nonempty");
    }
    if rows.max(cols) > cap {
        return Err(Error::Resource(format!(
            "{rows}×{cols} matrix exceeds the {cap}×{cap} limit"
        )));
    }
    Ok(())
}

pub fn gamma2_exact(a: &DenseMatrix) -> Result<Gamma2Result> {
    check_dims(a.nrows(), a.ncols(), MAX_EXACT_DIM)?;
    if a.iter().any(|v| !v.is_finite()) {
        return input("matrix has non-finite entries");
    }
    if a.iter().all(|&v| v == 0.0) {
        return Ok(Gamma2Result {
            value: 0.0,
            lower_bound: 0.0,
            b: DenseMatrix::zeros(a.nrows(), 1),
            c: DenseMatrix::zeros(1, a.ncols()),
            residual: 0.0,
            iterations: 0,
        });
    }
    let vals: Vec<f64> = (0..a.nrows()).flat_map(|i| (0..a.ncols()).map(move |j| a[(i, j)])).collect();
    let boxes = Boxes {
        rows: a.nrows(),
        cols: a.ncols(),
        lo: vals.clone(),
        hi: vals,
    };
    let s = solve_gamma2_sdp(&boxes)?;
    let (b, c) = gram_factors(&s.z, a.nrows());
    Ok(Gamma2Result {
        value: s.value,
        lower_bound: s.lower_bound,
        b,
        c,
        residual: s.residual,
        iterations: s.iterations,
    })
}

/// Smallest `γ2(A)` over `A` with `|A_xy − F_xy| ≤ ε` on defined entries and
/// `|A_xy| ≤ 1` everywhere.
pub fn approx_gamma2(f: &SignMatrix, eps: f64) -> Result<ApproxMatrixResult> {
    check_dims(f.rows(), f.cols(), MAX_APPROX_DIM)?;
    if !(eps > 0.0 && eps < 1.0) {
        return input(format!("ε must lie in (0, 1), got {eps}"));
    }
    let mut lo = Vec::with_capacity(f.rows() * f.cols());
    let mut hi = Vec::with_capacity(f.rows() * f.cols());
    for i in 0..f.rows() {
        for j in 0..f.cols() {
            let (l, h) = match f.get(i, j) {
                Some(s) => {
                    let s = s as f64;
                    ((s - eps).max(-1.0), (s + eps).min(1.0))
                }
                None => (-1.0, 1.0),
            };
            lo.push(l);
            hi.push(h);
        }
    }
    let boxes = Boxes {
        rows: f.rows(),
        cols: f.cols(),
        lo,
        hi,
    };
    let s = solve_gamma2_sdp(&boxes)?;
    let r = f.rows();
    let approximant = DMatrix::from_fn(r, f.cols(), |i, j| s.z[(i, r + j)].clamp(-1.0, 1.0));
    let (b, c) = gram_factors(&s.z, r);
    Ok(ApproxMatrixResult {
        value: s.value,
        lower_bound: s.lower_bound,
        approximant,
        epsilon: eps,
        b,
        c,
    })
}

/// Lower bound on `γ2(A)` found by local search over
/// `γ2(A) = max_{‖u‖=‖v‖=1} ‖diag(u) A diag(v)‖_tr`.
///
/// Each step takes the polar factor `W` of the current reweighted matrix and
/// replaces `u` by the normalized maximizer of `tr(Wᵀ diag(u) A diag(v))`,
/// then does the same for `v`; the trace norm never decreases. Independent
/// of the SDP route, it serves as a cross-check.
pub fn factorization_search(a: &DenseMatrix, restarts: usize, seed: u64) -> Result<f64> {
    check_dims(a.nrows(), a.ncols(), MAX_EXACT_DIM)?;
    let (r, c) = (a.nrows(), a.ncols());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0f64;
    let trace_norm = |u: &[f64], v: &[f64]| -> (f64, DenseMatrix) {
        let m = DMatrix::from_fn(r, c, |i, j| u[i] * a[(i, j)] * v[j]);
        let svd = m.svd(true, true);
        let w = svd.u.as_ref().expect("requested") * svd.v_t.as_ref().expect("requested");
        (svd.singular_values.sum(), w)
    };
    let unit = |x: Vec<f64>| -> Vec<f64> {
        let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 0.0 {
            x.into_iter().map(|v| v / n).collect()
        } else {
            x
        }
    };
    for restart in 0..restarts.max(1) {
        let (mut u, mut v) = if restart == 0 {
            (vec![1.0 / (r as f64).sqrt(); r], vec![1.0 / (c as f64).sqrt(); c])
        } else {
            (
                unit((0..r).map(|_| rng.random_range(0.05..1.0)).collect()),
                unit((0..c).map(|_| rng.random_range(0.05..1.0)).collect()),
            )
        };
        let mut last = 0.0;
        for _ in 0..2000 {
            let (_, w) = trace_norm(&u, &v);
            u = unit((0..r).map(|i| (0..c).map(|j| w[(i, j)] * a[(i, j)] * v[j]).sum()).collect());
            let (_, w) = trace_norm(&u, &v);
            v = unit((0..c).map(|j| (0..r).map(|i| w[(i, j)] * a[(i, j)] * u[i]).sum()).collect());
            let (val, _) = trace_norm(&u, &v);
            best = best.max(val);
            if (val - last).abs() <= 1e-13 * val.max(1.0) {
                break;
            }
            last = val;
        }
    }
    Ok(best)
}
