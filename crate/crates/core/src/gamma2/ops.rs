//! Operations on approximating matrices: column substitution, entrywise
//! polynomials, and error amplification.

use crate::error::{input, Error, Result};
use crate::numerics::DenseMatrix;
use crate::poly::{bernstein_majority, bernstein_value, MultiPoly, MAX_VOTES};

use super::{gamma2_exact, SignMatrix};

fn digit(idx: usize, base: usize, n: usize, i: usize) -> usize {
    (idx / base.pow((n - 1 - i) as u32)) % base
}

fn replace_digits(idx: usize, base: usize, n: usize, keep: &[bool], with: usize) -> usize {
    (0..n).fold(0, |acc, i| {
        acc * base + if keep[i] { digit(idx, base, n, i) } else { with }
    })
}

/// `A_S[x, y] = A[x, y^S]` where `y^S` keeps the coordinates in `S` and sets
/// the others to a column `b` of the inner problem with `F(·, b) ≡ 0`.
///
/// `a` approximates `OR_n ∘ F` with row and column indices read as base-`|𝒳|`
/// and base-`|𝒴|` digit strings, coordinate 0 most significant. `s` holds
/// 0-based coordinates. Without an all-zero column, a pair `(a₀, b₀)` with
/// `F(a₀, b₀) = 0` is substituted on both sides instead, which amounts to a
/// submatrix tensored with all-ones matrices.
pub fn substitute_columns(
    a: &DenseMatrix,
    inner: &SignMatrix,
    n: usize,
    s: &[usize],
) -> Result<DenseMatrix> {
    let (xr, yc) = (inner.rows(), inner.cols());
    if n == 0 || a.nrows() != xr.pow(n as u32) || a.ncols() != yc.pow(n as u32) {
        return input(format!(
            "{}×{} matrix does not index {n} copies of a {xr}×{yc} problem",
            a.nrows(),
            a.ncols()
        ));
    }
    let mut keep = vec![false; n];
    for &i in s {
        if i >= n {
            return input(format!("coordinate {i} out of range for n = {n}"));
        }
        keep[i] = true;
    }
    // F = 0 is the sign −1.
    let zero_col = (0..yc).find(|&b| (0..xr).all(|x| inner.get(x, b) == Some(-1)));
    if let Some(b) = zero_col {
        return Ok(DenseMatrix::from_fn(a.nrows(), a.ncols(), |x, y| {
            a[(x, replace_digits(y, yc, n, &keep, b))]
        }));
    }
    let pair = (0..xr)
        .flat_map(|x| (0..yc).map(move |y| (x, y)))
        .find(|&(x, y)| inner.get(x, y) == Some(-1));
    let Some((a0, b0)) = pair else {
        return Err(Error::Precondition(
            "inner problem has no input pair with value 0".into(),
        ));
    };
    Ok(DenseMatrix::from_fn(a.nrows(), a.ncols(), |x, y| {
        a[(
            replace_digits(x, xr, n, &keep, a0),
            replace_digits(y, yc, n, &keep, b0),
        )]
    }))
}

#[derive(Clone, Debug)]
pub struct HadamardResult {
    pub matrix: DenseMatrix,
    /// `Σ_m |α_m| · M^{deg m}` with `M = max_i γ2(mats_i)`.
    pub bound: f64,
    /// `γ2` of each input matrix.
    pub input_gamma2: Vec<f64>,
    /// `γ2` of the result, from the SDP.
    pub gamma2: f64,
}

/// Applies `p` entrywise, `B_xy = p(M_1[x,y], …, M_N[x,y])`, and bounds
/// `γ2(B)` through the coefficients of `p`.
pub fn hadamard_poly_compose(p: &MultiPoly, mats: &[DenseMatrix]) -> Result<HadamardResult> {
    if mats.len() != p.num_vars() {
        return input(format!(
            "polynomial has {} variables but {} matrices were given",
            p.num_vars(),
            mats.len()
        ));
    }
    let Some(first) = mats.first() else {
        return input("need at least one matrix");
    };
    let shape = first.shape();
    if mats.iter().any(|m| m.shape() != shape) {
        return input("matrices differ in shape");
    }
    let matrix = DenseMatrix::from_fn(shape.0, shape.1, |i, j| {
        let point: Vec<f64> = mats.iter().map(|m| m[(i, j)]).collect();
        p.evaluate(&point).expect("point has one value per variable")
    });
    let input_gamma2 = mats
        .iter()
        .map(|m| gamma2_exact(m).map(|r| r.value))
        .collect::<Result<Vec<_>>>()?;
    let big = input_gamma2.iter().copied().fold(0.0, f64::max);
    let bound = p
        .terms()
        .map(|(e, c)| c.abs() * big.powi(e.iter().sum::<u32>() as i32))
        .sum();
    let gamma2 = gamma2_exact(&matrix)?.value;
    Ok(HadamardResult {
        matrix,
        bound,
        input_gamma2,
        gamma2,
    })
}

/// `P(a) = 1 − 2 A_k((1 − a)/2)`: majority of `k` votes in the `±1`
/// convention. Maps `[1−ε, 1]` towards 1 and `[−1, −1+ε]` towards −1.
pub fn pm_amplifier(k: usize) -> Result<MultiPoly> {
    let ak = bernstein_majority(k)?;
    let half = MultiPoly::from_terms(1, [(vec![0], 0.5), (vec![1], -0.5)])?;
    let composed = ak.compose_with(&half)?;
    MultiPoly::constant(1, 1.0).sub(&composed.scale(2.0))
}

#[derive(Clone, Debug)]
pub struct AmplifiedMatrix {
    pub matrix: DenseMatrix,
    pub votes: usize,
    pub poly: MultiPoly,
    pub certificate: HadamardResult,
}

/// Amplifies an `ε`-approximation to error `target` by entrywise majority.
pub fn amplify_matrix(a: &DenseMatrix, eps: f64, target: f64) -> Result<AmplifiedMatrix> {
    if !(eps > 0.0 && eps < 1.0) || !(target > 0.0) {
        return input(format!("need 0 < ε < 1 and a positive target, got ({eps}, {target})"));
    }
    if a.iter().any(|v| v.abs() > 1.0 + 1e-12) {
        return input("approximant entries must lie in [−1, 1]");
    }
    let mut votes = 1;
    if target < eps {
        while bernstein_value(votes, eps / 2.0) > target / 2.0 {
            votes += 2;
            if votes > MAX_VOTES {
                return Err(Error::Resource(format!(
                    "amplifying from {eps} to {target} needs more than {MAX_VOTES} votes"
                )));
            }
        }
    }
    let poly = if votes == 1 {
        MultiPoly::var(1, 0)
    } else {
        pm_amplifier(votes)?
    };
    let certificate = hadamard_poly_compose(&poly, std::slice::from_ref(a))?;
    Ok(AmplifiedMatrix {
        matrix: certificate.matrix.clone(),
        votes,
        poly,
        certificate,
    })
}
