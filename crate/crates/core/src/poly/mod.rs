//! Sparse multivariate and dense univariate real polynomials.

mod amplify;
mod chebyshev;
mod robust;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};

pub use amplify::{
    amplification_degree, amplification_poly, bernstein_majority, bernstein_value, MAX_VOTES,
};
pub use chebyshev::{chebyshev_or, chebyshev_or_profile, ChebyshevProfile};
pub use robust::{
    bernoulli_expectation, robustness_margin, robustness_margin_with, NoiseBox, RobustnessOptions, RobustnessReport, DEFAULT_SAMPLES,
    EXACT_ROBUSTNESS_ARITY,
};

/// Largest number of terms a product or substitution may create.
pub const MAX_TERMS: usize = 4_000_000;

/// A polynomial in `m` variables stored as exponent vector → coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoly {
    m: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

impl MultiPoly {
    pub fn zero(m: usize) -> Self {
        MultiPoly {
            m,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(m: usize, c: f64) -> Self {
        let mut p = Self::zero(m);
        p.add_term(vec![0; m], c);
        p
    }

    /// The variable `x_i` (0-based).
    pub fn var(m: usize, i: usize) -> Self {
        let mut e = vec![0; m];
        e[i] = 1;
        let mut p = Self::zero(m);
        p.add_term(e, 1.0);
        p
    }

    /// Builds from `(exponents, coefficient)` pairs; repeated monomials add up.
    pub fn from_terms(m: usize, terms: impl IntoIterator<Item = (Vec<u32>, f64)>) -> Result<Self> {
        let mut p = Self::zero(m);
        for (e, c) in terms {
            if e.len() != m {
                return input(format!("monomial has {} exponents, expected {m}", e.len()));
            }
            if !c.is_finite() {
                return input("non-finite coefficient");
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    /// Multilinear polynomial agreeing with `values` on `{0,1}^m`, where
    /// `values` is indexed with the leftmost variable most significant.
    pub fn from_cube_values(m: usize, values: &[f64]) -> Result<Self> {
        if values.len() != 1usize << m {
            return input(format!("expected {} values, got {}", 1usize << m, values.len()));
        }
        let mut c = values.to_vec();
        // Möbius transform over the subset lattice.
        for bitpos in 0..m {
            let b = 1usize << bitpos;
            for s in 0..c.len() {
                if s & b != 0 {
                    c[s] -= c[s ^ b];
                }
            }
        }
        let mut p = Self::zero(m);
        for (s, v) in c.into_iter().enumerate() {
            if v != 0.0 {
                p.add_term(mask_to_exps(s, m), v);
            }
        }
        Ok(p)
    }

    pub fn num_vars(&self) -> usize {
        self.m
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), *c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exps: &[u32]) -> f64 {
        self.terms.get(exps).copied().unwrap_or(0.0)
    }

    fn add_term(&mut self, e: Vec<u32>, c: f64) {
        if c == 0.0 {
            return;
        }
        let entry = self.terms.entry(e);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = *o.get() + c;
                if s == 0.0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn is_multilinear(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&v| v <= 1))
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.m {
            return input(format!("point has {} coordinates, expected {}", x.len(), self.m));
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut t = *c;
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    t *= xi.powi(k as i32);
                }
            }
            acc += t;
        }
        acc
    }

    /// Value at the cube point encoded by `idx` (leftmost variable most significant).
    pub fn evaluate_cube(&self, idx: usize) -> f64 {
        let m = self.m;
        let mut acc = 0.0;
        'terms: for (e, c) in &self.terms {
            for (i, &k) in e.iter().enumerate() {
                if k > 0 && (idx >> (m - 1 - i)) & 1 == 0 {
                    continue 'terms;
                }
            }
            acc += c;
        }
        acc
    }

    /// Replaces every `x_i^k` (k ≥ 1) with `x_i`.
    pub fn multilinearize(&self) -> MultiPoly {
        let mut out = Self::zero(self.m);
        for (e, c) in &self.terms {
            out.add_term(e.iter().map(|&k| k.min(1)).collect(), *c);
        }
        out
    }

    pub fn scale(&self, s: f64) -> MultiPoly {
        let mut out = Self::zero(self.m);
        if s != 0.0 {
            for (e, c) in &self.terms {
                out.add_term(e.clone(), c * s);
            }
        }
        out
    }

    pub fn add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.same_space(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), *c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.same_space(other)?;
        if self.terms.len().saturating_mul(other.terms.len()) > MAX_TERMS * 4 {
            return Err(Error::Resource("product would create too many terms".into()));
        }
        let mut out = Self::zero(self.m);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        if out.terms.len() > MAX_TERMS {
            return Err(Error::Resource("product has too many terms".into()));
        }
        Ok(out)
    }

    fn same_space(&self, other: &MultiPoly) -> Result<()> {
        if self.m != other.m {
            return input(format!(
                "variable counts differ: {} vs {}",
                self.m, other.m
            ));
        }
        Ok(())
    }

    /// Replaces variable `y_i` with `subs[i]`; all substitutes share one space.
    pub fn substitute(&self, subs: &[MultiPoly]) -> Result<MultiPoly> {
        if subs.len() != self.m {
            return input(format!(
                "{} substitutes for {} variables",
                subs.len(),
                self.m
            ));
        }
        let target = match subs.first() {
            Some(s) => s.m,
            None => return Ok(MultiPoly::constant(0, self.coefficient(&[]))),
        };
        if subs.iter().any(|s| s.m != target) {
            return input("substitutes live in different variable spaces");
        }
        // Cached powers per variable.
        let mut powers: Vec<Vec<MultiPoly>> = subs
            .iter()
            .map(|s| vec![MultiPoly::constant(target, 1.0), s.clone()])
            .collect();
        let mut out = MultiPoly::zero(target);
        for (e, c) in &self.terms {
            let mut t = MultiPoly::constant(target, *c);
            for (i, &k) in e.iter().enumerate() {
                let k = k as usize;
                while powers[i].len() <= k {
                    let next = powers[i].last().expect("nonempty").mul(&subs[i])?;
                    powers[i].push(next);
                }
                if k > 0 {
                    t = t.mul(&powers[i][k])?;
                }
            }
            out = out.add(&t)?;
        }
        Ok(out)
    }

    /// `q(z) = 2·p((z+1)/2) − 1`.
    pub fn to_pm_basis(&self) -> MultiPoly {
        let subs: Vec<MultiPoly> = (0..self.m)
            .map(|i| {
                MultiPoly::var(self.m, i)
                    .add(&MultiPoly::constant(self.m, 1.0))
                    .expect("same space")
                    .scale(0.5)
            })
            .collect();
        let shifted = self.substitute(&subs).expect("linear substitution is in range");
        shifted
            .scale(2.0)
            .add(&MultiPoly::constant(self.m, -1.0))
            .expect("same space")
    }

    /// Inverse of [`MultiPoly::to_pm_basis`]: `p(x) = (q(2x−1) + 1)/2`.
    pub fn from_pm_basis(&self) -> MultiPoly {
        let subs: Vec<MultiPoly> = (0..self.m)
            .map(|i| {
                MultiPoly::var(self.m, i)
                    .scale(2.0)
                    .add(&MultiPoly::constant(self.m, -1.0))
                    .expect("same space")
            })
            .collect();
        let shifted = self.substitute(&subs).expect("linear substitution is in range");
        shifted
            .add(&MultiPoly::constant(self.m, 1.0))
            .expect("same space")
            .scale(0.5)
    }

    /// Sum of absolute coefficient values.
    pub fn coeff_l1(&self) -> f64 {
        self.terms.values().map(|c| c.abs()).sum()
    }

    /// Largest absolute coefficient value.
    pub fn coeff_max(&self) -> f64 {
        self.terms.values().fold(0.0, |a, c| a.max(c.abs()))
    }

    /// Drops coefficients with magnitude at most `tol`.
    pub fn prune(&self, tol: f64) -> MultiPoly {
        MultiPoly {
            m: self.m,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.abs() > tol)
                .map(|(e, c)| (e.clone(), *c))
                .collect(),
        }
    }

    pub fn to_json(&self) -> PolyJson {
        PolyJson {
            m: self.m,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermJson {
                    exps: e.clone(),
                    coeff: *c,
                })
                .collect(),
        }
    }

    pub fn from_json(j: &PolyJson) -> Result<MultiPoly> {
        MultiPoly::from_terms(j.m, j.terms.iter().map(|t| (t.exps.clone(), t.coeff)))
    }
}

fn mask_to_exps(s: usize, m: usize) -> Vec<u32> {
    (0..m).map(|i| ((s >> (m - 1 - i)) & 1) as u32).collect()
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                f.write_str(if *c < 0.0 { " - " } else { " + " })?;
            } else if *c < 0.0 {
                f.write_str("-")?;
            }
            first = false;
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    if k == 1 {
                        format!("x{}", i + 1)
                    } else {
                        format!("x{}^{k}", i + 1)
                    }
                })
                .collect();
            if mono.is_empty() {
                write!(f, "{}", c.abs())?;
            } else if c.abs() == 1.0 {
                f.write_str(&mono.join("*"))?;
            } else {
                write!(f, "{}*{}", c.abs(), mono.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Polynomial JSON document: `{"m": .., "terms": [{"exps": [..], "coeff": ..}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyJson {
    pub m: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub exps: Vec<u32>,
    pub coeff: f64,
}

/// Dense univariate polynomial, coefficients from degree 0 upward.
#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly {
    coeffs: Vec<f64>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Compensated Horner evaluation. The amplifiers have large alternating
    /// coefficients, and plain Horner loses about 1e-8 to cancellation near
    /// `x = 1`.
    pub fn eval(&self, x: f64) -> f64 {
        let mut s = 0.0f64;
        let mut err = 0.0f64;
        for &c in self.coeffs.iter().rev() {
            // two_product(s, x) then two_sum(p, c)
            let p = s * x;
            let pe = s.mul_add(x, -p);
            let t = p + c;
            let z = t - p;
            let te = (p - (t - z)) + (c - z);
            s = t;
            err = err.mul_add(x, pe + te);
        }
        s + err
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return UniPoly::new(vec![]);
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        UniPoly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&0.0) + other.coeffs.get(i).unwrap_or(&0.0))
                .collect(),
        )
    }

    /// As a one-variable [`MultiPoly`].
    pub fn to_multi(&self) -> MultiPoly {
        let mut p = MultiPoly::zero(1);
        for (k, c) in self.coeffs.iter().enumerate() {
            p.add_term(vec![k as u32], *c);
        }
        p
    }

    /// `self(q(x))`.
    pub fn compose_with(&self, q: &MultiPoly) -> Result<MultiPoly> {
        self.to_multi().substitute(std::slice::from_ref(q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(m: usize, terms: &[(&[u32], f64)]) -> MultiPoly {
        MultiPoly::from_terms(m, terms.iter().map(|(e, c)| (e.to_vec(), *c))).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(p(2, &[(&[1, 1], 1.0)]).evaluate(&[1.0, 1.0]).unwrap(), 1.0);
        let a = p(2, &[(&[0, 0], -0.25), (&[1, 0], 0.5), (&[0, 1], 0.5)]);
        assert!((a.evaluate(&[1.0, 1.0]).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(p(1, &[(&[2], 1.0)]).evaluate(&[0.5]).unwrap(), 0.25);
        assert!(a.evaluate(&[1.0]).is_err());
    }

    #[test]
    fn multilinearize_examples() {
        assert_eq!(p(1, &[(&[2], 1.0)]).multilinearize(), p(1, &[(&[1], 1.0)]));
        let q = p(2, &[(&[2, 3], 1.0), (&[0, 1], 1.0)]);
        assert_eq!(q.multilinearize(), p(2, &[(&[1, 1], 1.0), (&[0, 1], 1.0)]));
        let or2 = p(2, &[(&[1, 0], 1.0), (&[0, 1], 1.0), (&[1, 1], -1.0)]);
        assert_eq!(or2.multilinearize(), or2);
    }

    #[test]
    fn pm_basis_examples() {
        assert_eq!(p(1, &[(&[1], 1.0)]).to_pm_basis(), p(1, &[(&[1], 1.0)]));
        let and = p(2, &[(&[1, 1], 1.0)]).to_pm_basis();
        let expect = p(2, &[(&[1, 1], 0.5), (&[1, 0], 0.5), (&[0, 1], 0.5), (&[0, 0], -0.5)]);
        assert_eq!(and, expect);
        assert_eq!(MultiPoly::constant(3, 1.0).to_pm_basis(), MultiPoly::constant(3, 1.0));
    }

    #[test]
    fn substitute_examples() {
        let y = p(2, &[(&[1, 0], 1.0), (&[0, 1], 1.0)]);
        let x = [MultiPoly::var(2, 0), MultiPoly::var(2, 1)];
        assert_eq!(y.substitute(&x).unwrap(), y);
        let yy = p(2, &[(&[1, 1], 1.0)]);
        let x1 = MultiPoly::var(1, 0);
        assert_eq!(
            yy.substitute(&[x1.clone(), x1.clone()]).unwrap(),
            p(1, &[(&[2], 1.0)])
        );
        let a3 = amplification_poly(0.26).unwrap();
        assert_eq!(a3.degree(), Some(3));
        let composed = a3.compose_with(&x1).unwrap().prune(1e-12);
        assert_eq!(composed, p(1, &[(&[2], 3.0), (&[3], -2.0)]));
        assert!(yy.substitute(&[x1]).is_err());
    }

    #[test]
    fn coefficient_norms() {
        let or2 = p(2, &[(&[1, 0], 1.0), (&[0, 1], 1.0), (&[1, 1], -1.0)]);
        assert_eq!((or2.coeff_l1(), or2.coeff_max()), (3.0, 1.0));
        assert_eq!((MultiPoly::zero(2).coeff_l1(), MultiPoly::zero(2).coeff_max()), (0.0, 0.0));
        let t2 = p(1, &[(&[2], 8.0), (&[1], -8.0), (&[0], 1.0)]);
        assert_eq!((t2.coeff_l1(), t2.coeff_max()), (17.0, 8.0));
    }

    #[test]
    fn cube_values_round_trip() {
        let vals = [0.0, 1.0, 1.0, 1.0];
        let q = MultiPoly::from_cube_values(2, &vals).unwrap();
        assert_eq!(q, p(2, &[(&[1, 0], 1.0), (&[0, 1], 1.0), (&[1, 1], -1.0)]));
        for (i, v) in vals.iter().enumerate() {
            assert_eq!(q.evaluate_cube(i), *v);
        }
    }

    #[test]
    fn json_round_trip() {
        let q = p(2, &[(&[1, 0], 1.5), (&[0, 2], -2.0)]);
        let s = serde_json::to_string(&q.to_json()).unwrap();
        let back: PolyJson = serde_json::from_str(&s).unwrap();
        assert_eq!(MultiPoly::from_json(&back).unwrap(), q);
    }
}
