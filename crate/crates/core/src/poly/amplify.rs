//! Majority-vote amplification polynomials.

use super::UniPoly;
use crate::error::{input, Error, Result};

/// Largest vote count whose monomial coefficients are all integers below
/// 2^53, so that they are stored exactly. At 41 votes the largest one is
/// about 3.4e16.
pub const MAX_VOTES: usize = 39;

fn binom_exact(n: usize, k: usize) -> i128 {
    (0..k).fold(1i128, |acc, i| acc * (n - i) as i128 / (i + 1) as i128)
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `A_k(x) = Σ_{j > k/2} C(k,j) x^j (1−x)^{k−j}` evaluated in Bernstein form.
pub fn bernstein_value(k: usize, x: f64) -> f64 {
    (k / 2 + 1..=k)
        .map(|j| binom(k, j) * x.powi(j as i32) * (1.0 - x).powi((k - j) as i32))
        .sum()
}

/// `A_k` for odd `k`, expanded into monomials.
pub fn bernstein_majority(k: usize) -> Result<UniPoly> {
    if k % 2 == 0 {
        return input(format!("vote count must be odd, got {k}"));
    }
    if k > MAX_VOTES {
        return Err(Error::Resource(format!("vote count {k} exceeds {MAX_VOTES}")));
    }
    let mut coeffs = vec![0i128; k + 1];
    for j in k / 2 + 1..=k {
        let cj = binom_exact(k, j);
        for i in 0..=k - j {
            let sign = if i % 2 == 0 { 1 } else { -1 };
            coeffs[j + i] += sign * cj * binom_exact(k - j, i);
        }
    }
    Ok(UniPoly::new(coeffs.into_iter().map(|c| c as f64).collect()))
}

/// Smallest odd `k` with `A_k(1/3) ≤ ε`.
pub fn amplification_degree(eps: f64) -> Result<usize> {
    if !(eps > 0.0 && eps < 0.5) {
        return input(format!("target error must lie in (0, 1/2), got {eps}"));
    }
    let mut k = 1;
    while bernstein_value(k, 1.0 / 3.0) > eps {
        k += 2;
        if k > MAX_VOTES {
            return Err(Error::Resource(format!(
                "target error {eps} needs more than {MAX_VOTES} votes"
            )));
        }
    }
    Ok(k)
}

/// The amplifier for target error `ε`: maps `[0, 1/3]` into `[0, ε]` and
/// `[2/3, 1]` into `[1−ε, 1]` while keeping `[0,1]` inside `[0,1]`.
pub fn amplification_poly(eps: f64) -> Result<UniPoly> {
    bernstein_majority(amplification_degree(eps)?)
}
