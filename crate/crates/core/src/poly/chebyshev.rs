//! Chebyshev approximants of OR.
//!
//! On Hamming weights the approximant is
//! `P(k) = (1 − T_d((n−k)/(n−1)) / T_d(n/(n−1))) / (1 + η)` with
//! `η = 1/T_d(n/(n−1))`, so `P(0) = 0` and `P(k) ∈ [(1−η)/(1+η), 1]` for
//! `k ≥ 1`. The multivariate polynomial is recovered from the weight profile
//! through forward differences: `p(x) = Σ_j Δ^j P(0) · e_j(x)`.

use super::{MultiPoly, MAX_TERMS};
use crate::error::{input, Error, Result};

/// Largest `n` for which the weight profile is built.
pub const MAX_PROFILE_N: usize = 4096;

#[derive(Clone, Debug)]
pub struct ChebyshevProfile {
    pub n: usize,
    /// Degree of the multilinear polynomial, `min(d, n)`.
    pub degree: usize,
    pub eta: f64,
    /// `P(0), …, P(n)`.
    pub values: Vec<f64>,
    /// `max_k |P(k) − OR(k)|`.
    pub max_error: f64,
}

fn chebyshev_t(d: usize, x: f64) -> f64 {
    match d {
        0 => 1.0,
        _ => {
            let (mut a, mut b) = (1.0, x);
            for _ in 1..d {
                let c = 2.0 * x * b - a;
                a = b;
                b = c;
            }
            b
        }
    }
}

/// Weight profile of the approximant with the smallest Chebyshev degree
/// meeting error `ε`.
pub fn chebyshev_or_profile(n: usize, eps: f64) -> Result<ChebyshevProfile> {
    if n == 0 {
        return input("n must be at least 1");
    }
    if !(eps > 0.0 && eps < 0.5) {
        return input(format!("error must lie in (0, 1/2), got {eps}"));
    }
    if n > MAX_PROFILE_N {
        return Err(Error::Resource(format!("n = {n} exceeds {MAX_PROFILE_N}")));
    }
    if n == 1 {
        return Ok(ChebyshevProfile {
            n,
            degree: 1,
            eta: 0.0,
            values: vec![0.0, 1.0],
            max_error: 0.0,
        });
    }
    let top = n as f64 / (n - 1) as f64;
    let mut d = 1;
    let eta = loop {
        let eta = 1.0 / chebyshev_t(d, top);
        if 2.0 * eta / (1.0 + eta) <= eps || d >= n {
            break eta;
        }
        d += 1;
    };
    let values: Vec<f64> = (0..=n)
        .map(|k| {
            let r = chebyshev_t(d, (n - k) as f64 / (n - 1) as f64) * eta;
            (1.0 - r) / (1.0 + eta)
        })
        .collect();
    let max_error = values
        .iter()
        .enumerate()
        .map(|(k, v)| (v - if k > 0 { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max);
    Ok(ChebyshevProfile {
        n,
        degree: d.min(n),
        eta,
        values,
        max_error,
    })
}

/// Forward differences `Δ^j P(0)` for `j = 0..=degree`.
fn forward_differences(values: &[f64], degree: usize) -> Vec<f64> {
    let mut row: Vec<f64> = values[..=degree].to_vec();
    let mut out = Vec::with_capacity(degree + 1);
    for _ in 0..=degree {
        out.push(row[0]);
        row = row.windows(2).map(|w| w[1] - w[0]).collect();
    }
    out
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Symmetric polynomial on `n` variables approximating OR to error `ε`
/// and bounded in `[0,1]` on the cube.
pub fn chebyshev_or(n: usize, eps: f64) -> Result<MultiPoly> {
    let prof = chebyshev_or_profile(n, eps)?;
    let terms: f64 = (0..=prof.degree).map(|j| binom(n, j)).sum();
    if terms > MAX_TERMS as f64 {
        return Err(Error::Resource(format!(
            "expansion for n = {n} needs {terms:.0} terms"
        )));
    }
    let diffs = forward_differences(&prof.values, prof.degree);
    let mut p = MultiPoly::zero(n);
    for (j, &c) in diffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        // All j-subsets of the variables.
        let mut subset: Vec<usize> = (0..j).collect();
        loop {
            let mut e = vec![0u32; n];
            for &i in &subset {
                e[i] = 1;
            }
            p.add_term(e, c);
            // Next combination in lexicographic order.
            let mut i = j;
            loop {
                if i == 0 {
                    subset.clear();
                    break;
                }
                i -= 1;
                if subset[i] < n - j + i {
                    subset[i] += 1;
                    for t in i + 1..j {
                        subset[t] = subset[t - 1] + 1;
                    }
                    break;
                }
            }
            if subset.is_empty() {
                break;
            }
        }
    }
    Ok(p)
}
