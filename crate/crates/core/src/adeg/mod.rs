//! Exact bounded approximate degree by linear programming.
//!
//! For a fixed degree `d` the best error is the value of
//!
//! ```text
//! minimize ε  over multilinear p with deg p ≤ d
//!   |p(x) − f(x)| ≤ ε   on Dom(f)
//!   0 ≤ p(x) ≤ 1        on all of {0,1}^m   (bounded mode only)
//! ```
//!
//! The program is averaged over the symmetry group of `f`, so it suffices to
//! search symmetric `p`, one coefficient per monomial orbit and one
//! constraint family per point orbit. The engine solves the dual (one
//! nonnegative weight per orbit constraint, one equality row per monomial
//! orbit plus a normalization row); the simplex row multipliers give back
//! the primal polynomial and the weights give a certificate `φ` of pure high
//! degree that proves the error bound independently of the solver.

mod symmetry;
pub mod sweep;

use crate::boolfn::{PartialFn, Symmetry};
use crate::error::{Error, Result};
use crate::numerics::{solve_lp, LpProblem, LpStatus, Relation};
use crate::poly::MultiPoly;

pub use sweep::{composition_sweep, or_and_grid, FnSpec, Shape, SweepEntry, SweepRow};
pub use symmetry::validate_layout;
use symmetry::{Key, PointOrbits};

/// Largest arity accepted by the engine.
pub const MAX_ADEG_ARITY: usize = 14;
/// Default error threshold.
pub const DEFAULT_EPSILON: f64 = 1.0 / 3.0;
/// Slack with which `ε*(d) ≤ ε` is accepted, so exact ties count as success.
pub const TIE_TOL: f64 = 1e-7;
/// Tolerance for the pure-high-degree check on a normalized certificate.
pub const MOMENT_TOL: f64 = 1e-8;
/// Largest dense tableau (entries) the engine will build.
pub const MAX_TABLEAU: usize = 30_000_000;

#[derive(Clone, Debug)]
pub struct AdegOptions {
    /// Impose `0 ≤ p ≤ 1` on the whole cube.
    pub bounded: bool,
    /// Ignore symmetry and solve over all points and monomials.
    pub no_symmetry: bool,
}

impl Default for AdegOptions {
    fn default() -> Self {
        AdegOptions {
            bounded: true,
            no_symmetry: false,
        }
    }
}

impl AdegOptions {
    pub fn unbounded() -> Self {
        AdegOptions {
            bounded: false,
            ..Default::default()
        }
    }
}

/// Signed weights `φ` on `{0,1}^m` with `Σ|φ| = 1` proving a lower bound on
/// the best error at degree `d`.
#[derive(Clone, Debug)]
pub struct DualCertificate {
    pub degree: usize,
    pub bounded: bool,
    /// One weight per input, leftmost bit most significant.
    pub phi: Vec<f64>,
    /// `max |Σ_x φ(x) x^T|` over monomials with `|T| ≤ d`.
    pub max_moment: f64,
    /// Lower bound on the best error implied by `φ` alone.
    pub bound: f64,
    /// `Σ_{x∈Dom} φ(x)(−1)^{1−f(x)}`.
    pub correlation: f64,
    /// Mass of `φ` outside `Dom(f)`.
    pub mass_off_domain: f64,
}

impl DualCertificate {
    /// True when `φ` is orthogonal to every monomial of degree ≤ d.
    pub fn pure_high_degree(&self) -> bool {
        self.max_moment <= MOMENT_TOL
    }
}

/// Optimal error at a fixed degree with its primal and dual witnesses.
#[derive(Clone, Debug)]
pub struct BestError {
    pub degree: usize,
    pub bounded: bool,
    /// LP optimum `ε*`.
    pub epsilon: f64,
    pub witness: MultiPoly,
    /// `max_{Dom} |p − f|` of the witness evaluated on the cube.
    pub achieved_error: f64,
    /// `min_x p(x)` and `max_x p(x)` over the whole cube.
    pub range: (f64, f64),
    pub certificate: DualCertificate,
}

#[derive(Clone, Debug)]
pub struct ApproxDegreeResult {
    pub label: String,
    pub epsilon: f64,
    pub bounded: bool,
    pub degree: usize,
    pub witness: MultiPoly,
    pub achieved_error: f64,
    /// `ε*(0), …, ε*(degree)`.
    pub errors_by_degree: Vec<f64>,
    /// Certificate at `degree − 1` showing that lower degree fails.
    pub certificate: Option<DualCertificate>,
}

/// Which inequality a dual column belongs to: `σ·p(x) + τ·ε ≥ β`.
#[derive(Clone, Copy, Debug)]
struct Column {
    orbit: usize,
    sigma: f64,
    tau: f64,
    beta: f64,
}

fn target(v: bool) -> f64 {
    if v {
        1.0
    } else {
        0.0
    }
}

fn columns(orbits: &PointOrbits, bounded: bool) -> Vec<Column> {
    let mut cols = Vec::new();
    for (o, v) in orbits.values.iter().enumerate() {
        let approx_lower = |f: f64| Column {
            orbit: o,
            sigma: 1.0,
            tau: 1.0,
            beta: f,
        };
        let approx_upper = |f: f64| Column {
            orbit: o,
            sigma: -1.0,
            tau: 1.0,
            beta: -f,
        };
        match (v, bounded) {
            (Some(b), false) => {
                cols.push(approx_lower(target(*b)));
                cols.push(approx_upper(target(*b)));
            }
            (Some(b), true) => {
                // p ≥ 0 already implies p + ε ≥ 0, and p ≤ 1 implies p ≤ 1 + ε.
                if *b {
                    cols.push(approx_lower(1.0));
                } else {
                    cols.push(approx_upper(0.0));
                }
            }
            (None, _) => {}
        }
        if bounded {
            cols.push(Column {
                orbit: o,
                sigma: 1.0,
                tau: 0.0,
                beta: 0.0,
            });
            cols.push(Column {
                orbit: o,
                sigma: -1.0,
                tau: 0.0,
                beta: -1.0,
            });
        }
    }
    cols
}

fn orbits_for(f: &PartialFn, opts: &AdegOptions) -> Result<PointOrbits> {
    if opts.no_symmetry {
        Ok(PointOrbits::build(f, Symmetry::trivial(f.arity()))?.expect("trivial symmetry always holds"))
    } else {
        PointOrbits::for_function(f)
    }
}

/// `ε*` at degree `d` with witnesses, using the default options.
pub fn best_error(f: &PartialFn, d: usize) -> Result<BestError> {
    best_error_with(f, d, &AdegOptions::default())
}

pub fn best_error_with(f: &PartialFn, d: usize, opts: &AdegOptions) -> Result<BestError> {
    let m = f.arity();
    if m > MAX_ADEG_ARITY {
        return Err(Error::Resource(format!(
            "arity {m} exceeds the LP limit {MAX_ADEG_ARITY}"
        )));
    }
    let orbits = orbits_for(f, opts)?;
    solve_degree(f, &orbits, d, opts.bounded)
}

fn solve_degree(f: &PartialFn, orbits: &PointOrbits, d: usize, bounded: bool) -> Result<BestError> {
    let m = f.arity();
    let d = d.min(m);
    let mono = orbits.layout.monomial_keys(d);
    let cols = columns(orbits, bounded);
    let rows = mono.len() + 1;
    if rows.saturating_mul(cols.len() + rows) > MAX_TABLEAU {
        return Err(Error::Resource(format!(
            "LP with {rows} rows and {} columns exceeds the tableau limit",
            cols.len()
        )));
    }
    // incidence[θ][o]
    let incidence: Vec<Vec<f64>> = mono
        .iter()
        .map(|t| {
            orbits
                .rep_weights
                .iter()
                .map(|w| orbits.layout.incidence(t, w))
                .collect()
        })
        .collect();
    let mut lp = LpProblem::new(cols.iter().map(|c| -c.beta).collect());
    for inc in &incidence {
        lp.add(
            cols.iter().map(|c| c.sigma * inc[c.orbit]).collect(),
            Relation::Eq,
            0.0,
        );
    }
    lp.add(cols.iter().map(|c| c.tau).collect(), Relation::Eq, 1.0);
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Solver {
            message: format!("degree-{d} program for {} ended {:?}", f.name(), sol.status),
            best: None,
        });
    }
    let epsilon = (-sol.objective).max(0.0);

    // Primal polynomial from the row multipliers.
    let coeff_by_orbit: Vec<f64> = sol.duals[..mono.len()].iter().map(|y| -y).collect();
    let witness = expand(orbits, &mono, &coeff_by_orbit, d);
    let values = cube_values(&witness, m);
    let mut achieved_error: f64 = 0.0;
    let mut range = (f64::INFINITY, f64::NEG_INFINITY);
    for (x, v) in values.iter().enumerate() {
        if let Some(b) = f.value(x) {
            achieved_error = achieved_error.max((v - target(b)).abs());
        }
        range = (range.0.min(*v), range.1.max(*v));
    }

    // Certificate: spread each orbit's net weight evenly over its points.
    let mut net = vec![0.0; orbits.len()];
    for (c, w) in cols.iter().zip(&sol.point) {
        net[c.orbit] += c.sigma * w.max(0.0);
    }
    let phi: Vec<f64> = orbits
        .id_of
        .iter()
        .map(|&o| net[o as usize] / orbits.sizes[o as usize] as f64)
        .collect();
    let certificate = certify(f, phi, d, bounded);
    Ok(BestError {
        degree: d,
        bounded,
        epsilon,
        witness,
        achieved_error,
        range,
        certificate,
    })
}

/// Expands orbit coefficients into a multilinear polynomial.
fn expand(orbits: &PointOrbits, mono: &[Key], coeffs: &[f64], d: usize) -> MultiPoly {
    let m = orbits.layout.m;
    let index: std::collections::HashMap<&Key, usize> = mono.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let terms = (0..1usize << m)
        .filter(|t| t.count_ones() as usize <= d)
        .filter_map(|t| {
            let key = orbits.layout.key(t);
            let c = coeffs[*index.get(&key)?];
            let exps = (0..m).map(|i| ((t >> (m - 1 - i)) & 1) as u32).collect();
            Some((exps, c))
        });
    MultiPoly::from_terms(m, terms).expect("exponent vectors have length m")
}

/// Values of a multilinear polynomial at every cube point (subset-sum transform).
pub fn cube_values(p: &MultiPoly, m: usize) -> Vec<f64> {
    let mut v = vec![0.0; 1usize << m];
    for (e, c) in p.terms() {
        let mask = e
            .iter()
            .enumerate()
            .fold(0usize, |acc, (i, &k)| acc | ((k.min(1) as usize) << (m - 1 - i)));
        v[mask] += c;
    }
    for b in 0..m {
        let bit = 1usize << b;
        for s in 0..v.len() {
            if s & bit != 0 {
                v[s] += v[s ^ bit];
            }
        }
    }
    v
}

/// `Σ_{x ⊇ T} φ(x)` for every `T` (superset-sum transform).
fn moments(phi: &[f64], m: usize) -> Vec<f64> {
    let mut v = phi.to_vec();
    for b in 0..m {
        let bit = 1usize << b;
        for s in 0..v.len() {
            if s & bit == 0 {
                v[s] += v[s | bit];
            }
        }
    }
    v
}

/// Normalizes `φ` and computes the quantities it certifies.
pub fn certify(f: &PartialFn, mut phi: Vec<f64>, d: usize, bounded: bool) -> DualCertificate {
    let m = f.arity();
    let total: f64 = phi.iter().map(|v| v.abs()).sum();
    if total > 0.0 {
        phi.iter_mut().for_each(|v| *v /= total);
    }
    let mom = moments(&phi, m);
    let max_moment = mom
        .iter()
        .enumerate()
        .filter(|(t, _)| t.count_ones() as usize <= d)
        .fold(0.0f64, |a, (_, v)| a.max(v.abs()));
    // A: f=1, φ>0; B: f=1, φ<0; C⁻/C⁺: f=0 by sign; D: off the domain.
    let (mut a, mut b, mut c_neg, mut c_pos, mut d_neg, mut off) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    let mut correlation = 0.0;
    for (x, &w) in phi.iter().enumerate() {
        match f.value(x) {
            Some(true) => {
                correlation += w;
                if w > 0.0 {
                    a += w
                } else {
                    b -= w
                }
            }
            Some(false) => {
                correlation -= w;
                if w < 0.0 {
                    c_neg -= w
                } else {
                    c_pos += w
                }
            }
            None => {
                off += w.abs();
                if w < 0.0 {
                    d_neg -= w;
                }
            }
        }
    }
    let bound = if total == 0.0 {
        0.0
    } else if bounded {
        // Σφp = 0 with p ≥ 1−ε where φ>0 on f=1, p ≤ 1, p ≤ ε on f=0, p ≥ 0.
        if a + c_neg > 0.0 {
            (a - b - d_neg) / (a + c_neg)
        } else {
            0.0
        }
    } else if off > 0.0 {
        // Unbounded programs say nothing off the domain.
        0.0
    } else {
        let denom = a + b + c_neg + c_pos;
        if denom > 0.0 {
            (a - b) / denom
        } else {
            0.0
        }
    };
    DualCertificate {
        degree: d,
        bounded,
        phi,
        max_moment,
        bound: bound.max(0.0),
        correlation,
        mass_off_domain: off,
    }
}

/// Smallest degree with best error at most `ε`, using the default options.
pub fn approx_degree(f: &PartialFn, eps: f64) -> Result<ApproxDegreeResult> {
    approx_degree_with(f, eps, &AdegOptions::default())
}

pub fn approx_degree_with(f: &PartialFn, eps: f64, opts: &AdegOptions) -> Result<ApproxDegreeResult> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Input(format!("error threshold must lie in (0, 1/2), got {eps}")));
    }
    let m = f.arity();
    if m > MAX_ADEG_ARITY {
        return Err(Error::Resource(format!(
            "arity {m} exceeds the LP limit {MAX_ADEG_ARITY}"
        )));
    }
    let orbits = orbits_for(f, opts)?;
    let mut errors = Vec::new();
    let mut previous: Option<BestError> = None;
    for d in 0..=m {
        let best = solve_degree(f, &orbits, d, opts.bounded)?;
        if let Some(prev) = errors.last() {
            if best.epsilon > prev + 1e-7 {
                return Err(Error::Logic(format!(
                    "best error rose from {prev} to {} between degrees {} and {d}",
                    best.epsilon,
                    d - 1
                )));
            }
        }
        errors.push(best.epsilon);
        if best.epsilon <= eps + TIE_TOL {
            return Ok(ApproxDegreeResult {
                label: f.name().to_string(),
                epsilon: eps,
                bounded: opts.bounded,
                degree: d,
                witness: best.witness,
                achieved_error: best.achieved_error,
                errors_by_degree: errors,
                certificate: previous.map(|p| p.certificate),
            });
        }
        previous = Some(best);
    }
    Err(Error::Logic(format!(
        "no degree up to {m} reaches error {eps} for {}",
        f.name()
    )))
}

/// Certificate that degree `d` cannot reach error `ε`.
pub fn dual_witness(f: &PartialFn, d: usize, eps: f64) -> Result<DualCertificate> {
    dual_witness_with(f, d, eps, &AdegOptions::default())
}

pub fn dual_witness_with(f: &PartialFn, d: usize, eps: f64, opts: &AdegOptions) -> Result<DualCertificate> {
    let best = best_error_with(f, d, opts)?;
    if best.epsilon <= eps + TIE_TOL {
        return Err(Error::Logic(format!(
            "degree {d} already reaches error {} ≤ {eps} for {}",
            best.epsilon,
            f.name()
        )));
    }
    Ok(best.certificate)
}
