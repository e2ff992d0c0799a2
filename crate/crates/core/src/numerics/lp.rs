//! Dense two-phase simplex.
//!
//! Problems are given as `minimize cᵀx` subject to rows `aᵢᵀx {≤,≥,=} bᵢ`
//! and per-variable bounds `l ≤ x ≤ u` (either side may be infinite).
//! Internally every variable is shifted or split so that it is nonnegative,
//! finite upper bounds become extra rows, and a full tableau is pivoted with
//! Dantzig's rule, falling back to Bland's rule after a run of degenerate
//! pivots. Once a basis is optimal the basic solution and the row duals are
//! recomputed from the original data with an LU factorization of the basis.

use nalgebra::{DMatrix, DVector};

use crate::error::{input, Error, Result};

/// Primal feasibility tolerance.
pub const FEAS_TOL: f64 = 1e-9;
/// Optimality tolerance on the objective.
pub const OPT_TOL: f64 = 1e-8;

const PIVOT_TOL: f64 = 1e-10;
const COST_TOL: f64 = 1e-10;
const DEGENERATE_RUN: usize = 40;
/// Relative size of the phase-two right-hand-side perturbation.
const PERTURBATION: f64 = 1e-7;
/// Reinvert the tableau at least this often (and every `m` pivots).
const REINVERT_MIN: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Clone, Debug)]
pub struct LpProblem {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    /// `(lower, upper)` per variable; infinities allowed.
    pub bounds: Vec<(f64, f64)>,
}

impl LpProblem {
    /// A problem with `num_vars` nonnegative variables and no rows.
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        LpProblem {
            num_vars: n,
            objective,
            constraints: Vec::new(),
            bounds: vec![(0.0, f64::INFINITY); n],
        }
    }

    pub fn add(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        self
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) -> &mut Self {
        self.bounds[var] = (lower, upper);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.objective.len() != self.num_vars || self.bounds.len() != self.num_vars {
            return input("objective/bounds length differs from variable count");
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return input("non-finite objective coefficient");
        }
        for (i, row) in self.constraints.iter().enumerate() {
            if row.coeffs.len() != self.num_vars {
                return input(format!(
                    "row {i} has {} coefficients, expected {}",
                    row.coeffs.len(),
                    self.num_vars
                ));
            }
            if row.coeffs.iter().any(|c| !c.is_finite()) || !row.rhs.is_finite() {
                return input(format!("row {i} has a non-finite entry"));
            }
        }
        for (j, &(l, u)) in self.bounds.iter().enumerate() {
            if l.is_nan() || u.is_nan() || l == f64::INFINITY || u == f64::NEG_INFINITY {
                return input(format!("variable {j} has invalid bounds"));
            }
        }
        Ok(())
    }

    /// Largest violation of any row or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for row in &self.constraints {
            let lhs: f64 = row.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
            let v = match row.relation {
                Relation::Le => lhs - row.rhs,
                Relation::Ge => row.rhs - lhs,
                Relation::Eq => (lhs - row.rhs).abs(),
            };
            worst = worst.max(v);
        }
        for (&v, &(l, u)) in x.iter().zip(&self.bounds) {
            worst = worst.max(l - v).max(v - u);
        }
        worst
    }

    /// Checks a Farkas certificate: `y` has the sign pattern of the row
    /// relations and `max over the bound box of (Aᵀy)ᵀx < yᵀb`.
    pub fn farkas_holds(&self, y: &[f64]) -> bool {
        if y.len() != self.constraints.len() {
            return false;
        }
        let mut g = vec![0.0; self.num_vars];
        let mut rhs = 0.0;
        for (row, &yi) in self.constraints.iter().zip(y) {
            let ok = match row.relation {
                Relation::Le => yi <= 1e-12,
                Relation::Ge => yi >= -1e-12,
                Relation::Eq => true,
            };
            if !ok {
                return false;
            }
            for (gj, a) in g.iter_mut().zip(&row.coeffs) {
                *gj += yi * a;
            }
            rhs += yi * row.rhs;
        }
        let mut best = 0.0;
        for (gj, &(l, u)) in g.iter().zip(&self.bounds) {
            if gj.abs() <= 1e-12 {
                continue;
            }
            let end = if *gj > 0.0 { u } else { l };
            if !end.is_finite() {
                return false;
            }
            best += gj * end;
        }
        best < rhs - 1e-9
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub point: Vec<f64>,
    pub objective: f64,
    /// Row multipliers at the optimum (`c − Aᵀy` is dual feasible); `≥` rows
    /// carry nonnegative and `≤` rows nonpositive multipliers.
    pub duals: Vec<f64>,
    /// Present when `status == Infeasible`; see [`LpProblem::farkas_holds`].
    pub farkas: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug)]
enum VarMap {
    /// x = offset + x'
    Shift(usize, f64),
    /// x = offset − x'
    Flip(usize, f64),
    /// x = x⁺ − x⁻
    Split(usize, usize),
}

/// Solves the problem with the two-phase simplex method.
pub fn solve_lp(problem: &LpProblem) -> Result<LpSolution> {
    problem.validate()?;
    Standard::build(problem).solve(problem)
}

struct Standard {
    maps: Vec<VarMap>,
    ncols: usize,
    /// Standardized rows: (coefficients over internal columns, relation, rhs, source row).
    rows: Vec<(Vec<f64>, Relation, f64, Option<usize>)>,
    cost: Vec<f64>,
    cost_offset: f64,
}

impl Standard {
    fn build(p: &LpProblem) -> Standard {
        let mut maps = Vec::with_capacity(p.num_vars);
        let mut ncols = 0;
        for &(l, u) in &p.bounds {
            if l.is_finite() {
                maps.push(VarMap::Shift(ncols, l));
                ncols += 1;
            } else if u.is_finite() {
                maps.push(VarMap::Flip(ncols, u));
                ncols += 1;
            } else {
                maps.push(VarMap::Split(ncols, ncols + 1));
                ncols += 2;
            }
        }
        let expand = |coeffs: &[f64]| -> (Vec<f64>, f64) {
            let mut out = vec![0.0; ncols];
            let mut shift = 0.0;
            for (a, m) in coeffs.iter().zip(&maps) {
                match *m {
                    VarMap::Shift(c, off) => {
                        out[c] += a;
                        shift += a * off;
                    }
                    VarMap::Flip(c, off) => {
                        out[c] -= a;
                        shift += a * off;
                    }
                    VarMap::Split(c1, c2) => {
                        out[c1] += a;
                        out[c2] -= a;
                    }
                }
            }
            (out, shift)
        };
        let mut rows = Vec::new();
        for (i, r) in p.constraints.iter().enumerate() {
            let (coeffs, shift) = expand(&r.coeffs);
            rows.push((coeffs, r.relation, r.rhs - shift, Some(i)));
        }
        for (m, &(l, u)) in maps.iter().zip(&p.bounds) {
            if let VarMap::Shift(c, _) = *m {
                if u.is_finite() {
                    let mut coeffs = vec![0.0; ncols];
                    coeffs[c] = 1.0;
                    rows.push((coeffs, Relation::Le, u - l, None));
                }
            }
        }
        let (cost, cost_offset) = expand(&p.objective);
        Standard {
            maps,
            ncols,
            rows,
            cost,
            cost_offset,
        }
    }

    fn recover(&self, internal: &[f64]) -> Vec<f64> {
        self.maps
            .iter()
            .map(|m| match *m {
                VarMap::Shift(c, off) => off + internal[c],
                VarMap::Flip(c, off) => off - internal[c],
                VarMap::Split(a, b) => internal[a] - internal[b],
            })
            .collect()
    }

    fn solve(&self, original: &LpProblem) -> Result<LpSolution> {
        let m = self.rows.len();
        let n = self.ncols;
        // Column layout: structural | slack/surplus (one per inequality row) | artificial.
        let mut slack_col = vec![None; m];
        let mut next = n;
        for (i, row) in self.rows.iter().enumerate() {
            if row.1 != Relation::Eq {
                slack_col[i] = Some(next);
                next += 1;
            }
        }
        let mut negated = vec![false; m];
        let mut art_col = vec![None; m];
        for (i, row) in self.rows.iter().enumerate() {
            let rel = effective_relation(row.1, row.2 < 0.0);
            negated[i] = row.2 < 0.0;
            if rel != Relation::Le {
                art_col[i] = Some(next);
                next += 1;
            }
        }
        let total = next;
        let width = total + 1;
        let mut t = Tableau {
            m,
            width,
            data: vec![0.0; (m + 1) * width],
            basis: vec![0; m],
            orig: Vec::new(),
            cost: vec![0.0; total],
            since_reinvert: 0,
        };
        // Identity column per row (slack for ≤ after sign normalization, artificial otherwise).
        let mut ident = vec![0; m];
        for (i, row) in self.rows.iter().enumerate() {
            let sgn = if negated[i] { -1.0 } else { 1.0 };
            for (j, a) in row.0.iter().enumerate() {
                t.set(i, j, sgn * a);
            }
            if let Some(s) = slack_col[i] {
                let coef = if row.1 == Relation::Le { 1.0 } else { -1.0 };
                t.set(i, s, sgn * coef);
            }
            t.set(i, total, sgn * row.2);
            match art_col[i] {
                Some(a) => {
                    t.set(i, a, 1.0);
                    t.basis[i] = a;
                    ident[i] = a;
                }
                None => {
                    let s = slack_col[i].expect("≤ row has a slack");
                    t.basis[i] = s;
                    ident[i] = s;
                }
            }
        }
        t.orig = t.data[..m * width].to_vec();
        let is_art = {
            let mut v = vec![false; total];
            for a in art_col.iter().flatten() {
                v[*a] = true;
            }
            v
        };
        let budget = 50 * (m + total) + 1000;
        let mut pivots = 0usize;

        // Phase 1.
        let mut phase1_cost = vec![0.0; total];
        for a in art_col.iter().flatten() {
            phase1_cost[*a] = 1.0;
        }
        if art_col.iter().any(|a| a.is_some()) {
            t.load_costs(&phase1_cost);
            let scale = 1.0 + self.rows.iter().map(|r| r.2.abs()).fold(0.0, f64::max);
            let done = 1e-3 * FEAS_TOL * scale;
            match t.run(&|_| true, Some(done), budget, &mut pivots) {
                RunOutcome::Optimal => {}
                // Phase one is bounded below, so this only survives
                // reinversion when the basis itself is numerically broken.
                RunOutcome::Unbounded => {
                    return Err(Error::Solver {
                        message: "phase one reported an unbounded ray".into(),
                        best: None,
                    })
                }
                RunOutcome::Limit => {
                    return Err(Error::Solver {
                        message: "iteration limit in phase one".into(),
                        best: None,
                    })
                }
            }
            let infeas = -t.objective_value();
            if infeas > FEAS_TOL * scale {
                let y_std: Vec<f64> = (0..m)
                    .map(|i| {
                        let y = t.dual_from_tableau(&phase1_cost, ident[i]);
                        if negated[i] {
                            -y
                        } else {
                            y
                        }
                    })
                    .collect();
                let farkas = self.project_rows(&y_std, original.constraints.len());
                return Ok(LpSolution {
                    status: LpStatus::Infeasible,
                    point: Vec::new(),
                    objective: f64::NAN,
                    duals: Vec::new(),
                    farkas: Some(farkas),
                });
            }
            // Drive artificials out of the basis where possible.
            for r in 0..m {
                if is_art[t.basis[r]] {
                    if let Some(j) = (0..total).find(|&j| !is_art[j] && t.get(r, j).abs() > 1e-9) {
                        t.pivot(r, j);
                    }
                }
            }
        }

        // Phase 2, on a perturbed right-hand side so that degenerate
        // vertices do not stall the pivoting; the true one is restored and
        // any small infeasibility repaired by dual simplex pivots.
        let mut cost = vec![0.0; total];
        cost[..n].copy_from_slice(&self.cost);
        let true_rhs = t.rhs_of_orig();
        t.perturb();
        t.load_costs(&cost);
        let mut outcome = t.run(&|j| !is_art[j], None, budget, &mut pivots);
        if matches!(outcome, RunOutcome::Optimal) {
            t.set_orig_rhs(&true_rhs);
            t.reinvert();
            outcome = match t.dual_repair(&|j| !is_art[j], budget, &mut pivots) {
                RunOutcome::Optimal => t.run(&|j| !is_art[j], None, budget, &mut pivots),
                other => other,
            };
        }
        match outcome {
            RunOutcome::Optimal => {}
            RunOutcome::Unbounded => {
                return Ok(LpSolution {
                    status: LpStatus::Unbounded,
                    point: Vec::new(),
                    objective: f64::NEG_INFINITY,
                    duals: Vec::new(),
                    farkas: None,
                })
            }
            RunOutcome::Limit => {
                let internal = t.basic_solution(total);
                return Err(Error::Solver {
                    message: "iteration limit in phase two".into(),
                    best: Some(self.recover(&internal[..n])),
                });
            }
        }

        let mut internal = t.basic_solution(total);
        let mut y_std: Vec<f64> = (0..m)
            .map(|i| {
                let y = t.dual_from_tableau(&cost, ident[i]);
                if negated[i] {
                    -y
                } else {
                    y
                }
            })
            .collect();
        // One step of refinement from the original data.
        if let Some((x_ref, y_ref)) = self.refine(&t.basis, &slack_col, &art_col, &cost, total) {
            internal = x_ref;
            y_std = y_ref;
        }
        let point = self.recover(&internal[..n]);
        let objective: f64 = original
            .objective
            .iter()
            .zip(&point)
            .map(|(c, x)| c * x)
            .sum();
        let _ = self.cost_offset;
        let duals = self.project_rows(&y_std, original.constraints.len());
        Ok(LpSolution {
            status: LpStatus::Optimal,
            point,
            objective,
            duals,
            farkas: None,
        })
    }

    fn project_rows(&self, y_std: &[f64], count: usize) -> Vec<f64> {
        let mut out = vec![0.0; count];
        for (row, y) in self.rows.iter().zip(y_std) {
            if let Some(src) = row.3 {
                out[src] = *y;
            }
        }
        out
    }

    /// Recomputes `x_B = B⁻¹b` and `y = B⁻ᵀc_B` on the unnormalized rows.
    fn refine(
        &self,
        basis: &[usize],
        slack_col: &[Option<usize>],
        art_col: &[Option<usize>],
        cost: &[f64],
        total: usize,
    ) -> Option<(Vec<f64>, Vec<f64>)> {
        let m = self.rows.len();
        if m == 0 {
            return None;
        }
        let column = |j: usize, i: usize| -> f64 {
            let row = &self.rows[i];
            if j < self.ncols {
                row.0[j]
            } else if slack_col[i] == Some(j) {
                if row.1 == Relation::Le {
                    1.0
                } else {
                    -1.0
                }
            } else if art_col[i] == Some(j) {
                // Artificial columns were added after sign normalization.
                if row.2 < 0.0 {
                    -1.0
                } else {
                    1.0
                }
            } else {
                0.0
            }
        };
        let b = DMatrix::from_fn(m, m, |i, k| column(basis[k], i));
        let lu = b.clone().lu();
        let rhs = DVector::from_iterator(m, self.rows.iter().map(|r| r.2));
        let xb = lu.solve(&rhs)?;
        let cb = DVector::from_iterator(m, basis.iter().map(|&j| cost[j]));
        let y = b.transpose().lu().solve(&cb)?;
        if xb.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return None;
        }
        let mut x = vec![0.0; total];
        for (k, &j) in basis.iter().enumerate() {
            x[j] = xb[k].max(0.0);
        }
        Some((x, y.iter().copied().collect()))
    }
}

fn effective_relation(rel: Relation, negate: bool) -> Relation {
    match (rel, negate) {
        (Relation::Le, true) => Relation::Ge,
        (Relation::Ge, true) => Relation::Le,
        (r, _) => r,
    }
}

enum RunOutcome {
    Optimal,
    Unbounded,
    Limit,
}

struct Tableau {
    m: usize,
    width: usize,
    /// Rows `0..m` are constraints, row `m` holds reduced costs; the last
    /// column is the right-hand side (negated objective in the cost row).
    data: Vec<f64>,
    basis: Vec<usize>,
    /// Constraint rows as first loaded, for reinversion.
    orig: Vec<f64>,
    /// Costs of the current phase.
    cost: Vec<f64>,
    since_reinvert: usize,
}

impl Tableau {
    #[inline]
    fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width + c]
    }

    #[inline]
    fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.width + c] = v;
    }

    fn rhs_col(&self) -> usize {
        self.width - 1
    }

    fn load_costs(&mut self, cost: &[f64]) {
        self.cost = cost.to_vec();
        let w = self.width;
        let m = self.m;
        for c in 0..w {
            self.data[m * w + c] = 0.0;
        }
        for (c, v) in cost.iter().enumerate() {
            self.data[m * w + c] = *v;
        }
        for r in 0..m {
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                for c in 0..w {
                    let v = self.data[r * w + c];
                    self.data[m * w + c] -= cb * v;
                }
            }
        }
    }

    /// Rebuilds `B⁻¹[A | b]` and the reduced costs for the current basis
    /// from the original rows, discarding accumulated rounding. Returns false
    /// and leaves the tableau alone when the basis matrix is singular.
    fn reinvert(&mut self) -> bool {
        self.since_reinvert = 0;
        let (m, w) = (self.m, self.width);
        if m == 0 {
            return true;
        }
        let b = DMatrix::from_fn(m, m, |i, k| self.orig[i * w + self.basis[k]]);
        let lu = b.lu();
        let rhs = DMatrix::from_fn(m, w, |i, c| self.orig[i * w + c]);
        let Some(sol) = lu.solve(&rhs) else {
            return false;
        };
        if sol.iter().any(|v| !v.is_finite()) {
            return false;
        }
        for r in 0..m {
            for c in 0..w {
                self.data[r * w + c] = sol[(r, c)];
            }
            self.data[r * w + self.basis[r]] = 1.0;
        }
        let cost = std::mem::take(&mut self.cost);
        self.load_costs(&cost);
        true
    }

    fn rhs_of_orig(&self) -> Vec<f64> {
        let w = self.width;
        (0..self.m).map(|r| self.orig[r * w + w - 1]).collect()
    }

    fn set_orig_rhs(&mut self, rhs: &[f64]) {
        let w = self.width;
        for (r, v) in rhs.iter().enumerate() {
            self.orig[r * w + w - 1] = *v;
        }
    }

    /// Raises every basic value by a small deterministic amount, i.e.
    /// replaces `b` by `b + Bδ` with `δ > 0`, which keeps the basis feasible
    /// and makes the current vertex nondegenerate.
    fn perturb(&mut self) {
        let (m, w) = (self.m, self.width);
        let mut state = 0x9e37_79b9_7f4a_7c15u64;
        let delta: Vec<f64> = (0..m)
            .map(|r| {
                state = state.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1_442_695_040_888_963_407);
                let u = 1.0 + (state >> 11) as f64 / (1u64 << 53) as f64;
                PERTURBATION * u * (1.0 + self.get(r, w - 1).abs())
            })
            .collect();
        for (r, d) in delta.iter().enumerate() {
            self.data[r * w + w - 1] += d;
        }
        for i in 0..m {
            let shift: f64 = (0..m).map(|k| self.orig[i * w + self.basis[k]] * delta[k]).sum();
            self.orig[i * w + w - 1] += shift;
        }
    }

    /// Dual simplex pivots until every basic value is nonnegative, keeping
    /// the reduced costs dual feasible.
    fn dual_repair(&mut self, allowed: &dyn Fn(usize) -> bool, budget: usize, pivots: &mut usize) -> RunOutcome {
        let rhs = self.rhs_col();
        let scale = 1.0 + (0..self.m).map(|r| self.get(r, rhs).abs()).fold(0.0, f64::max);
        loop {
            if *pivots >= budget {
                return RunOutcome::Limit;
            }
            let leave = (0..self.m)
                .filter(|&r| self.get(r, rhs) < -FEAS_TOL * scale)
                .min_by(|&a, &b| self.get(a, rhs).total_cmp(&self.get(b, rhs)));
            let Some(pr) = leave else {
                return RunOutcome::Optimal;
            };
            let mut entering = None;
            let mut best = f64::INFINITY;
            for c in 0..rhs {
                let a = self.get(pr, c);
                if allowed(c) && a < -PIVOT_TOL {
                    let ratio = self.get(self.m, c).max(0.0) / -a;
                    if ratio < best {
                        best = ratio;
                        entering = Some(c);
                    }
                }
            }
            let Some(pc) = entering else {
                // No way to raise this row: clamp the rounding residue.
                self.set(pr, rhs, 0.0);
                continue;
            };
            self.pivot(pr, pc);
            *pivots += 1;
        }
    }

    fn objective_value(&self) -> f64 {
        self.get(self.m, self.rhs_col())
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width;
        let inv = 1.0 / self.get(pr, pc);
        for c in 0..w {
            self.data[pr * w + c] *= inv;
        }
        self.data[pr * w + pc] = 1.0;
        let (before, rest) = self.data.split_at_mut(pr * w);
        let (prow, after) = rest.split_at_mut(w);
        let eliminate = |row: &mut [f64]| {
            let f = row[pc];
            if f != 0.0 {
                for (v, p) in row.iter_mut().zip(prow.iter()) {
                    *v -= f * p;
                }
                row[pc] = 0.0;
            }
        };
        before.chunks_mut(w).for_each(eliminate);
        after.chunks_mut(w).for_each(eliminate);
        self.basis[pr] = pc;
        self.since_reinvert += 1;
    }

    /// Primal simplex. With `stop_below`, returns as soon as the objective
    /// drops to that value; phase one uses this to skip degenerate pivots
    /// once every artificial is already at zero.
    fn run(
        &mut self,
        allowed: &dyn Fn(usize) -> bool,
        stop_below: Option<f64>,
        budget: usize,
        pivots: &mut usize,
    ) -> RunOutcome {
        let rhs = self.rhs_col();
        let mut degenerate = 0usize;
        let period = self.m.max(REINVERT_MIN);
        loop {
            if *pivots >= budget {
                return RunOutcome::Limit;
            }
            if self.since_reinvert >= period {
                self.reinvert();
            }
            if stop_below.is_some_and(|v| -self.objective_value() <= v) {
                return RunOutcome::Optimal;
            }
            let bland = degenerate >= DEGENERATE_RUN;
            let mut entering = None;
            let mut best = -COST_TOL;
            for c in 0..rhs {
                if !allowed(c) {
                    continue;
                }
                let d = self.get(self.m, c);
                if d < -COST_TOL {
                    if bland {
                        entering = Some(c);
                        break;
                    }
                    if d < best {
                        best = d;
                        entering = Some(c);
                    }
                }
            }
            let Some(pc) = entering else {
                // Confirm on a freshly inverted tableau.
                if self.since_reinvert > 0 && self.reinvert() {
                    continue;
                }
                return RunOutcome::Optimal;
            };
            let mut leave: Option<usize> = None;
            let mut best_ratio = f64::INFINITY;
            for r in 0..self.m {
                let a = self.get(r, pc);
                if a > PIVOT_TOL {
                    let ratio = self.get(r, rhs).max(0.0) / a;
                    let better = match leave {
                        None => true,
                        Some(l) => {
                            if ratio < best_ratio - 1e-12 {
                                true
                            } else if ratio <= best_ratio + 1e-12 {
                                if bland {
                                    self.basis[r] < self.basis[l]
                                } else {
                                    a > self.get(l, pc)
                                }
                            } else {
                                false
                            }
                        }
                    };
                    if better {
                        best_ratio = ratio;
                        leave = Some(r);
                    }
                }
            }
            let Some(pr) = leave else {
                if self.since_reinvert > 0 && self.reinvert() {
                    continue;
                }
                return RunOutcome::Unbounded;
            };
            if best_ratio <= 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(pr, pc);
            *pivots += 1;
        }
    }

    fn basic_solution(&self, total: usize) -> Vec<f64> {
        let mut x = vec![0.0; total];
        for (r, &j) in self.basis.iter().enumerate() {
            x[j] = self.get(r, self.rhs_col()).max(0.0);
        }
        x
    }

    /// `c_Bᵀ B⁻¹ e_i`, reading `B⁻¹ e_i` from the column that started as `e_i`.
    fn dual_from_tableau(&self, cost: &[f64], ident_col: usize) -> f64 {
        (0..self.m)
            .map(|r| cost[self.basis[r]] * self.get(r, ident_col))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    #[test]
    fn bound_constrained_singleton() {
        let mut p = LpProblem::new(vec![1.0]);
        p.set_bounds(0, 0.0, 1.0);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!(close(s.point[0], 0.0));
        assert!(close(s.objective, 0.0));
    }

    #[test]
    fn symmetric_cover() {
        let mut p = LpProblem::new(vec![1.0, 1.0]);
        p.add(vec![1.0, 1.0], Relation::Ge, 1.0);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!(close(s.objective, 1.0));
        assert!(close(s.duals[0], 1.0));
    }

    #[test]
    fn contradictory_rows_give_certificate() {
        let mut p = LpProblem::new(vec![0.0]);
        p.set_bounds(0, f64::NEG_INFINITY, f64::INFINITY);
        p.add(vec![1.0], Relation::Ge, 1.0);
        p.add(vec![1.0], Relation::Le, 0.0);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Infeasible);
        assert!(p.farkas_holds(s.farkas.as_ref().unwrap()));
    }

    #[test]
    fn contradictory_bounds_and_row() {
        let mut p = LpProblem::new(vec![1.0]);
        p.set_bounds(0, 0.0, 0.5);
        p.add(vec![1.0], Relation::Ge, 1.0);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Infeasible);
        assert!(p.farkas_holds(s.farkas.as_ref().unwrap()));
    }

    #[test]
    fn unbounded_detected() {
        let mut p = LpProblem::new(vec![-1.0, 0.0]);
        p.add(vec![1.0, -1.0], Relation::Le, 1.0);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Unbounded);
    }

    #[test]
    fn free_variables_and_equalities() {
        // min |x - 3| via x - t <= 3, -x - t <= -3, free x.
        let mut p = LpProblem::new(vec![0.0, 1.0]);
        p.set_bounds(0, f64::NEG_INFINITY, f64::INFINITY);
        p.add(vec![1.0, -1.0], Relation::Le, 3.0);
        p.add(vec![-1.0, -1.0], Relation::Le, -3.0);
        p.add(vec![1.0, 0.0], Relation::Eq, 2.0);
        let s = solve_lp(&p).unwrap();
        assert!(close(s.objective, 1.0));
        assert!(close(s.point[0], 2.0));
        assert!(p.max_violation(&s.point) < FEAS_TOL);
    }

    #[test]
    fn upper_bounded_only_variable() {
        let mut p = LpProblem::new(vec![-1.0]);
        p.set_bounds(0, f64::NEG_INFINITY, 4.0);
        let s = solve_lp(&p).unwrap();
        assert!(close(s.point[0], 4.0));
    }

    #[test]
    fn dimension_mismatch_is_input_error() {
        let mut p = LpProblem::new(vec![1.0, 1.0]);
        p.add(vec![1.0], Relation::Ge, 1.0);
        assert!(matches!(solve_lp(&p), Err(Error::Input(_))));
    }

    #[test]
    fn weak_duality_on_a_transport_problem() {
        // 2 supplies, 3 demands.
        let cost = [4.0, 6.0, 9.0, 5.0, 3.0, 8.0];
        let mut p = LpProblem::new(cost.to_vec());
        p.add(vec![1.0, 1.0, 1.0, 0.0, 0.0, 0.0], Relation::Le, 5.0);
        p.add(vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0], Relation::Le, 6.0);
        p.add(vec![1.0, 0.0, 0.0, 1.0, 0.0, 0.0], Relation::Ge, 3.0);
        p.add(vec![0.0, 1.0, 0.0, 0.0, 1.0, 0.0], Relation::Ge, 4.0);
        p.add(vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0], Relation::Ge, 4.0);
        let s = solve_lp(&p).unwrap();
        let dual_obj: f64 = s
            .duals
            .iter()
            .zip(&p.constraints)
            .map(|(y, r)| y * r.rhs)
            .sum();
        assert!(s.objective >= dual_obj - OPT_TOL);
        assert!((s.objective - dual_obj).abs() < 1e-7);
        // reduced costs nonnegative
        for j in 0..6 {
            let rc = cost[j]
                - s.duals
                    .iter()
                    .zip(&p.constraints)
                    .map(|(y, r)| y * r.coeffs[j])
                    .sum::<f64>();
            assert!(rc > -1e-8);
        }
    }
}
