//! Lagrange interpolation on the simplex grid and coefficient bounds for
//! polynomials bounded on the unit cube.
//!
//! The grid is `S = {α : dα ∈ {0,…,d}^n, Σα_i ≤ 1}`, of size `C(n+d, d)`.
//! For `α` with `Σ dα_i = k` the interpolator is
//!
//! ```text
//! q_α(x) = Π_{j=k+1}^{d} (Σ_i x_i − j/d) · Π_i Π_{j=0}^{dα_i−1} (x_i − j/d)
//! ```
//!
//! and `p_α = q_α / q_α(α)`. Both are built from `d^d q_α`, whose factors
//! `(dΣx_i − j)` and `(d x_i − j)` have integer coefficients, so the product
//! and the normalizer `d^d q_α(α)` are exact integers.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::poly::MultiPoly;

/// Largest grid the module will build.
pub const MAX_GRID: usize = 5000;
/// Tolerance for boundedness checks.
pub const BOUND_TOL: f64 = 1e-9;

/// `α = numerators / d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridPoint {
    pub numerators: Vec<u32>,
    pub d: u32,
}

impl GridPoint {
    pub fn to_f64(&self) -> Vec<f64> {
        self.numerators
            .iter()
            .map(|&j| j as f64 / self.d as f64)
            .collect()
    }

    pub fn level(&self) -> u32 {
        self.numerators.iter().sum()
    }
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn check_sizes(n: usize, d: usize) -> Result<()> {
    if n == 0 || d == 0 {
        return input("grid needs n ≥ 1 and d ≥ 1");
    }
    let size = binom(n + d, d);
    if size > MAX_GRID as f64 {
        return Err(Error::Resource(format!(
            "grid for n = {n}, d = {d} has {size:.0} points (limit {MAX_GRID})"
        )));
    }
    Ok(())
}

/// All grid points, ordered by level and then in decreasing lexicographic order.
pub fn grid(n: usize, d: usize) -> Result<Vec<GridPoint>> {
    check_sizes(n, d)?;
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fn rec(i: usize, left: u32, d: u32, cur: &mut Vec<u32>, out: &mut Vec<GridPoint>) {
        if i == cur.len() {
            out.push(GridPoint {
                numerators: cur.clone(),
                d,
            });
            return;
        }
        for j in 0..=left {
            cur[i] = j;
            rec(i + 1, left - j, d, cur, out);
        }
    }
    rec(0, d as u32, d as u32, &mut cur, &mut out);
    out.sort_by(|a, b| a.level().cmp(&b.level()).then_with(|| b.numerators.cmp(&a.numerators)));
    Ok(out)
}

type IntPoly = BTreeMap<Vec<u32>, i128>;

fn int_mul(a: &IntPoly, b: &IntPoly) -> Result<IntPoly> {
    let mut out = IntPoly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            let prod = ca
                .checked_mul(*cb)
                .ok_or_else(|| Error::Resource("integer overflow in interpolator".into()))?;
            let slot = out.entry(e).or_insert(0);
            *slot = slot
                .checked_add(prod)
                .ok_or_else(|| Error::Resource("integer overflow in interpolator".into()))?;
        }
    }
    out.retain(|_, c| *c != 0);
    Ok(out)
}

fn validate_point(alpha: &GridPoint, n: usize, d: usize) -> Result<()> {
    if alpha.numerators.len() != n || alpha.d as usize != d {
        return input(format!("point {:?} does not belong to the (n={n}, d={d}) grid", alpha));
    }
    if alpha.level() as usize > d {
        return input(format!("point {:?} lies outside the simplex", alpha.numerators));
    }
    Ok(())
}

/// `d^d q_α` with exact integer coefficients, and `d^d q_α(α)`.
fn scaled_q(alpha: &GridPoint, n: usize, d: usize) -> Result<(IntPoly, i128)> {
    validate_point(alpha, n, d)?;
    let zero = vec![0u32; n];
    let mut acc: IntPoly = IntPoly::from([(zero.clone(), 1i128)]);
    let mut norm: i128 = 1;
    let k = alpha.level() as i128;
    for j in (k + 1)..=(d as i128) {
        let mut f = IntPoly::new();
        for i in 0..n {
            let mut e = zero.clone();
            e[i] = 1;
            f.insert(e, d as i128);
        }
        f.insert(zero.clone(), -j);
        acc = int_mul(&acc, &f)?;
        norm *= k - j;
    }
    for (i, &a) in alpha.numerators.iter().enumerate() {
        for j in 0..a as i128 {
            let mut e = zero.clone();
            e[i] = 1;
            let mut f = IntPoly::from([(e, d as i128)]);
            if j != 0 {
                f.insert(zero.clone(), -j);
            }
            acc = int_mul(&acc, &f)?;
            norm *= a as i128 - j;
        }
    }
    Ok((acc, norm))
}

fn to_multi(p: &IntPoly, n: usize, scale: f64) -> MultiPoly {
    MultiPoly::from_terms(n, p.iter().map(|(e, c)| (e.clone(), *c as f64 / scale)))
        .expect("exponent vectors have length n")
}

/// The unnormalized interpolator `q_α`.
pub fn build_q(alpha: &GridPoint, n: usize, d: usize) -> Result<MultiPoly> {
    check_sizes(n, d)?;
    let (q, _) = scaled_q(alpha, n, d)?;
    Ok(to_multi(&q, n, (d as f64).powi(d as i32)))
}

/// The normalized interpolator `p_α`.
pub fn build_p(alpha: &GridPoint, n: usize, d: usize) -> Result<MultiPoly> {
    check_sizes(n, d)?;
    let (q, norm) = scaled_q(alpha, n, d)?;
    Ok(to_multi(&q, n, norm as f64))
}

/// `p_α(x)` from the product formula, each linear factor divided by its
/// value at `α`. Unlike the expanded basis this stays accurate at any `d`.
pub fn eval_p(alpha: &GridPoint, x: &[f64]) -> Result<f64> {
    let n = alpha.numerators.len();
    let d = alpha.d as usize;
    validate_point(alpha, n, d)?;
    if x.len() != n {
        return input(format!("point has {} coordinates, expected {n}", x.len()));
    }
    let df = d as f64;
    let k = alpha.level() as f64;
    let sum: f64 = x.iter().sum();
    let mut v = 1.0;
    for j in alpha.level() + 1..=alpha.d {
        v *= (df * sum - j as f64) / (k - j as f64);
    }
    for (&a, &xi) in alpha.numerators.iter().zip(x) {
        for j in 0..a {
            v *= (df * xi - j as f64) / (a - j) as f64;
        }
    }
    Ok(v)
}

/// `p_α(β)` for `β` on the grid, with every factor an exact integer ratio.
fn p_on_grid(alpha: &GridPoint, beta: &GridPoint) -> f64 {
    let (k, l) = (alpha.level() as i64, beta.level() as i64);
    let mut v = 1.0;
    for j in k + 1..=alpha.d as i64 {
        if l == j {
            return 0.0;
        }
        v *= (l - j) as f64 / (k - j) as f64;
    }
    for (&a, &b) in alpha.numerators.iter().zip(&beta.numerators) {
        for j in 0..a as i64 {
            if b as i64 == j {
                return 0.0;
            }
            v *= (b as i64 - j) as f64 / (a as i64 - j) as f64;
        }
    }
    v
}

/// `max_{α,β} |p_α(β) − [α=β]|` over the whole grid, using the product
/// formula. The expanded basis loses accuracy from about `d = 10` on (see
/// [`InterpBasis::kronecker_deviation`]); this check does not.
pub fn grid_kronecker_deviation(n: usize, d: usize) -> Result<f64> {
    let points = grid(n, d)?;
    Ok(points
        .par_iter()
        .enumerate()
        .map(|(a, alpha)| {
            points
                .iter()
                .enumerate()
                .map(|(b, beta)| {
                    let target = if a == b { 1.0 } else { 0.0 };
                    (p_on_grid(alpha, beta) - target).abs()
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max))
}

#[derive(Clone, Debug)]
pub struct InterpBasis {
    pub n: usize,
    pub d: usize,
    pub points: Vec<GridPoint>,
    pub basis: Vec<MultiPoly>,
}

impl InterpBasis {
    /// `max_{α,β} |p_α(β) − [α=β]|` evaluated on the expanded monomial
    /// form, so it includes the rounding of the coefficients.
    pub fn kronecker_deviation(&self) -> f64 {
        let pts: Vec<Vec<f64>> = self.points.iter().map(GridPoint::to_f64).collect();
        self.basis
            .par_iter()
            .enumerate()
            .map(|(a, p)| {
                pts.iter()
                    .enumerate()
                    .map(|(b, x)| {
                        let target = if a == b { 1.0 } else { 0.0 };
                        (p.eval_unchecked(x) - target).abs()
                    })
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    }

    /// `Σ_α r(α) p_α`.
    pub fn interpolate(&self, r: &MultiPoly) -> Result<MultiPoly> {
        if r.num_vars() != self.n {
            return input("polynomial lives in a different variable space");
        }
        let mut acc = MultiPoly::zero(self.n);
        for (alpha, p) in self.points.iter().zip(&self.basis) {
            let v = r.evaluate(&alpha.to_f64())?;
            acc = acc.add(&p.scale(v))?;
        }
        Ok(acc)
    }

    /// Coordinates of `r` in this basis, which are the grid values `r(α)`.
    pub fn coordinates(&self, r: &MultiPoly) -> Result<Vec<f64>> {
        self.points.iter().map(|a| r.evaluate(&a.to_f64())).collect()
    }
}

pub fn build_basis(n: usize, d: usize) -> Result<InterpBasis> {
    let points = grid(n, d)?;
    let basis = points
        .par_iter()
        .map(|a| build_p(a, n, d))
        .collect::<Result<Vec<_>>>()?;
    Ok(InterpBasis { n, d, points, basis })
}

/// Coefficient bounds for a polynomial bounded by 1 on `[0,1]^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoeffReport {
    pub n: usize,
    pub d: usize,
    pub coeff_max: f64,
    /// `(2d)^{3d}`.
    pub bound_thm: f64,
    pub coeff_l1: f64,
    /// `(2(n+d))^{3d}`.
    pub bound_l1: f64,
    /// Largest coefficient over the interpolators `p_α`.
    pub per_basis_max: f64,
    /// `d^d (2n)^d`.
    pub bound_prop: f64,
    /// `(2nd(n+d))^d`.
    pub bound_grid: f64,
    /// Largest `|p(α)|` over the grid: the basis coordinates of `p`.
    pub max_coordinate: f64,
    pub violations: Vec<String>,
}

/// Checks `|p| ≤ 1` on the cube: exactly at the vertices when `p` is
/// multilinear, otherwise on a uniform grid.
pub fn check_bounded(p: &MultiPoly) -> Result<()> {
    let n = p.num_vars();
    let points: Box<dyn Iterator<Item = Vec<f64>>> = if p.is_multilinear() {
        Box::new((0..1usize << n).map(move |x| {
            (0..n).map(|i| ((x >> (n - 1 - i)) & 1) as f64).collect()
        }))
    } else {
        // About 2·10^5 points in total.
        let per_axis = ((2e5f64).powf(1.0 / n as f64).floor() as usize).clamp(2, 401);
        let total = per_axis.pow(n as u32);
        Box::new((0..total).map(move |mut idx| {
            let mut x = vec![0.0; n];
            for xi in x.iter_mut() {
                *xi = (idx % per_axis) as f64 / (per_axis - 1) as f64;
                idx /= per_axis;
            }
            x
        }))
    };
    for x in points {
        let v = p.eval_unchecked(&x);
        if v.abs() > 1.0 + BOUND_TOL {
            return Err(Error::Precondition(format!(
                "|p| = {v} > 1 at {x:?}"
            )));
        }
    }
    Ok(())
}

pub fn check_coeff_bounds(p: &MultiPoly, n: usize, d: usize) -> Result<CoeffReport> {
    if p.num_vars() != n {
        return input(format!("polynomial has {} variables, expected {n}", p.num_vars()));
    }
    if let Some(deg) = p.degree() {
        if deg as usize > d {
            return input(format!("polynomial has degree {deg} > {d}"));
        }
    }
    check_bounded(p)?;
    let basis = build_basis(n, d)?;
    let (nf, df) = (n as f64, d as f64);
    let coeff_max = p.coeff_max();
    let coeff_l1 = p.coeff_l1();
    let per_basis_max = basis.basis.iter().map(MultiPoly::coeff_max).fold(0.0, f64::max);
    let coords = basis.coordinates(p)?;
    let max_coordinate = coords.iter().fold(0.0f64, |a, c| a.max(c.abs()));
    let mut report = CoeffReport {
        n,
        d,
        coeff_max,
        bound_thm: (2.0 * df).powf(3.0 * df),
        coeff_l1,
        bound_l1: (2.0 * (nf + df)).powf(3.0 * df),
        per_basis_max,
        bound_prop: df.powf(df) * (2.0 * nf).powf(df),
        bound_grid: (2.0 * nf * df * (nf + df)).powf(df),
        max_coordinate,
        violations: Vec::new(),
    };
    let mut flag = |ok: bool, what: String| {
        if !ok {
            report.violations.push(what);
        }
    };
    flag(
        coeff_max <= report.bound_thm,
        format!("coeff_max {coeff_max} > {}", report.bound_thm),
    );
    flag(
        coeff_l1 <= report.bound_l1,
        format!("coeff_l1 {coeff_l1} > {}", report.bound_l1),
    );
    flag(
        per_basis_max <= report.bound_prop,
        format!("per-basis max {per_basis_max} > {}", report.bound_prop),
    );
    flag(
        coeff_max <= report.bound_grid,
        format!("coeff_max {coeff_max} > grid bound {}", report.bound_grid),
    );
    flag(
        max_coordinate <= 1.0 + 1e-7,
        format!("basis coordinate {max_coordinate} > 1"),
    );
    Ok(report)
}

fn shifted_chebyshev(k: usize, n: usize, var: usize) -> MultiPoly {
    // T_k(2x − 1) by the three-term recurrence.
    let x = MultiPoly::var(n, var);
    let t = x.scale(2.0).add(&MultiPoly::constant(n, -1.0)).expect("same space");
    let mut prev = MultiPoly::constant(n, 1.0);
    if k == 0 {
        return prev;
    }
    let mut cur = t.clone();
    for _ in 1..k {
        let next = t
            .mul(&cur)
            .expect("small product")
            .scale(2.0)
            .sub(&prev)
            .expect("same space");
        prev = cur;
        cur = next;
    }
    cur
}

/// Random polynomials of degree ≤ `d` in `n` variables with `|p| ≤ 1` on
/// `[0,1]^n`: convex combinations of signed products of shifted Chebyshev
/// polynomials and of multilinear polynomials on at most `d` variables with
/// vertex values in `[−1,1]`.
pub fn bounded_corpus(n: usize, d: usize, count: usize, seed: u64) -> Result<Vec<MultiPoly>> {
    if n == 0 || d == 0 {
        return input("corpus needs n ≥ 1 and d ≥ 1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let parts = rng.random_range(1..=3);
        let weights: Vec<f64> = (0..parts).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = weights.iter().sum();
        let mut acc = MultiPoly::zero(n);
        for w in weights {
            let piece = if rng.random_bool(0.5) {
                let mut left = rng.random_range(1..=d);
                let mut prod = MultiPoly::constant(n, if rng.random_bool(0.5) { 1.0 } else { -1.0 });
                while left > 0 {
                    let var = rng.random_range(0..n);
                    let k = rng.random_range(1..=left);
                    prod = prod.mul(&shifted_chebyshev(k, n, var))?;
                    left -= k;
                }
                prod
            } else {
                let size = rng.random_range(1..=d.min(n));
                let mut vars: Vec<usize> = (0..n).collect();
                for i in 0..size {
                    let j = rng.random_range(i..n);
                    vars.swap(i, j);
                }
                vars.truncate(size);
                vars.sort_unstable();
                let values: Vec<f64> = (0..1usize << size).map(|_| rng.random_range(-1.0..=1.0)).collect();
                let local = MultiPoly::from_cube_values(size, &values)?;
                let embed: Vec<MultiPoly> = vars.iter().map(|&v| MultiPoly::var(n, v)).collect();
                local.substitute(&embed)?
            };
            acc = acc.add(&piece.scale(w / total))?;
        }
        out.push(acc);
    }
    Ok(out)
}

/// Random polynomial of degree ≤ `d` with coefficients uniform in `[−1,1]`.
pub fn random_poly(n: usize, d: usize, rng: &mut impl Rng) -> MultiPoly {
    let mut terms = Vec::new();
    let mut cur = vec![0u32; n];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for j in 0..=left {
            cur[i] = j;
            rec(i + 1, left - j, cur, out);
        }
    }
    let mut monos = Vec::new();
    rec(0, d as u32, &mut cur, &mut monos);
    for e in monos {
        terms.push((e, rng.random_range(-1.0..=1.0)));
    }
    MultiPoly::from_terms(n, terms).expect("exponent vectors have length n")
}
