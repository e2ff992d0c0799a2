//! Small dense semidefinite programs.
//!
//! Problems are stated in the dual standard form
//!
//! ```text
//! maximize bᵀy   subject to   S = C − Σ_k y_k A_k,   S ⪰ 0,
//! ```
//!
//! where `S` is block diagonal with one dense PSD block and one diagonal
//! (linear) block. The paired primal is `minimize ⟨C, X⟩` subject to
//! `⟨A_k, X⟩ = b_k`, `X ⪰ 0`. The solver is an infeasible primal-dual
//! interior-point method using the HKM search direction with a Mehrotra
//! predictor-corrector step.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;

/// One constraint matrix `A_k`.
#[derive(Clone, Debug, Default)]
pub struct SdpTerm {
    /// Upper-triangle entries `(i, j, v)` with `i ≤ j`; off-diagonal entries
    /// stand for both `(i, j)` and `(j, i)`.
    pub psd: Vec<(usize, usize, f64)>,
    /// Entries `(l, v)` of the diagonal block.
    pub lin: Vec<(usize, f64)>,
}

#[derive(Clone, Debug)]
pub struct SdpProblem {
    /// PSD block of `C` (symmetric).
    pub c_psd: DenseMatrix,
    /// Diagonal block of `C`.
    pub c_lin: Vec<f64>,
    pub terms: Vec<SdpTerm>,
    pub b: Vec<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct SdpOptions {
    /// Target relative gap and infeasibility.
    pub tol: f64,
    /// Accept a stalled run if it got this close.
    pub loose_tol: f64,
    pub max_iter: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        SdpOptions {
            tol: 1e-9,
            loose_tol: 1e-6,
            max_iter: 120,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub y: Vec<f64>,
    pub s_psd: DenseMatrix,
    pub s_lin: Vec<f64>,
    pub x_psd: DenseMatrix,
    pub x_lin: Vec<f64>,
    /// `bᵀy`.
    pub dual_objective: f64,
    /// `⟨C, X⟩`.
    pub primal_objective: f64,
    /// Largest of relative gap, primal and dual infeasibility at exit.
    pub residual: f64,
    pub iterations: usize,
}

/// Directed entry list: `A = Σ v e_a e_bᵀ`.
fn directed(term: &SdpTerm) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::with_capacity(2 * term.psd.len());
    for &(i, j, v) in &term.psd {
        out.push((i, j, v));
        if i != j {
            out.push((j, i, v));
        }
    }
    out
}

impl SdpProblem {
    fn validate(&self) -> Result<()> {
        let n = self.c_psd.nrows();
        if self.c_psd.ncols() != n {
            return Err(Error::Input("C block is not square".into()));
        }
        if self.terms.len() != self.b.len() {
            return Err(Error::Input("term count differs from b length".into()));
        }
        for (k, t) in self.terms.iter().enumerate() {
            for &(i, j, v) in &t.psd {
                if i > j || j >= n || !v.is_finite() {
                    return Err(Error::Input(format!("term {k} has a bad PSD entry")));
                }
            }
            for &(l, v) in &t.lin {
                if l >= self.c_lin.len() || !v.is_finite() {
                    return Err(Error::Input(format!("term {k} has a bad linear entry")));
                }
            }
        }
        if self.c_psd.iter().chain(&self.c_lin).chain(&self.b).any(|v| !v.is_finite()) {
            return Err(Error::Input("non-finite problem data".into()));
        }
        Ok(())
    }

    /// `C − Σ y_k A_k`.
    pub fn slack(&self, y: &[f64]) -> (DenseMatrix, Vec<f64>) {
        let mut s = self.c_psd.clone();
        let mut sl = self.c_lin.clone();
        for (t, &yk) in self.terms.iter().zip(y) {
            for &(i, j, v) in &t.psd {
                s[(i, j)] -= yk * v;
                if i != j {
                    s[(j, i)] -= yk * v;
                }
            }
            for &(l, v) in &t.lin {
                sl[l] -= yk * v;
            }
        }
        (s, sl)
    }

    fn apply(&self, w: &DenseMatrix, wl: &[f64]) -> DVector<f64> {
        DVector::from_iterator(
            self.terms.len(),
            self.terms.iter().map(|t| {
                let mut acc = 0.0;
                for &(i, j, v) in &t.psd {
                    acc += if i == j {
                        v * w[(i, i)]
                    } else {
                        v * (w[(i, j)] + w[(j, i)])
                    };
                }
                for &(l, v) in &t.lin {
                    acc += v * wl[l];
                }
                acc
            }),
        )
    }
}

fn sym(m: &DenseMatrix) -> DenseMatrix {
    (m + m.transpose()) * 0.5
}

fn inner(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Largest `α ≤ 1/τ`-scaled step keeping `X + αΔX ≻ 0`.
fn max_step(x: &DenseMatrix, dx: &DenseMatrix, xl: &[f64], dxl: &[f64]) -> f64 {
    let mut alpha = f64::INFINITY;
    if x.nrows() > 0 {
        match x.clone().cholesky() {
            Some(ch) => {
                let l = ch.l();
                let linv = l
                    .clone()
                    .try_inverse()
                    .unwrap_or_else(|| DMatrix::identity(x.nrows(), x.nrows()));
                let t = sym(&(&linv * dx * linv.transpose()));
                let lmin = t
                    .symmetric_eigenvalues()
                    .iter()
                    .fold(f64::INFINITY, |a, &v| a.min(v));
                if lmin < 0.0 {
                    alpha = -1.0 / lmin;
                }
            }
            None => alpha = 0.0,
        }
    }
    for (&v, &d) in xl.iter().zip(dxl) {
        if d < 0.0 {
            alpha = alpha.min(-v / d);
        }
    }
    alpha
}

/// Solves the problem to the requested tolerance.
pub fn solve_sdp(problem: &SdpProblem, opts: &SdpOptions) -> Result<SdpSolution> {
    problem.validate()?;
    let n = problem.c_psd.nrows();
    let nl = problem.c_lin.len();
    let m = problem.terms.len();
    let dim = (n + nl) as f64;
    if n + nl == 0 {
        return Err(Error::Input("empty cone".into()));
    }
    let dirs: Vec<Vec<(usize, usize, f64)>> = problem.terms.iter().map(directed).collect();

    let b = DVector::from_column_slice(&problem.b);
    let norm_b = b.norm();
    let norm_c = (problem.c_psd.norm_squared() + problem.c_lin.iter().map(|v| v * v).sum::<f64>()).sqrt();
    let term_norm = |t: &SdpTerm| -> f64 {
        (t.psd
            .iter()
            .map(|&(i, j, v)| if i == j { v * v } else { 2.0 * v * v })
            .sum::<f64>()
            + t.lin.iter().map(|(_, v)| v * v).sum::<f64>())
        .sqrt()
    };
    let mut xi = 10f64.max(dim.sqrt());
    let mut eta = 10f64.max(dim.sqrt()).max(norm_c);
    for (t, bk) in problem.terms.iter().zip(&problem.b) {
        let an = term_norm(t);
        xi = xi.max(dim.sqrt() * (1.0 + bk.abs()) / (1.0 + an));
        eta = eta.max(an);
    }
    let mut x = DMatrix::identity(n, n) * xi;
    let mut xl = vec![xi; nl];
    let mut s = DMatrix::identity(n, n) * eta;
    let mut sl = vec![eta; nl];
    let mut y = DVector::zeros(m);

    let mut last_residual = f64::INFINITY;
    for iter in 0..opts.max_iter {
        // Residuals.
        let (s_of_y, sl_of_y) = problem.slack(y.as_slice());
        let rd = &s_of_y - &s;
        let rdl: Vec<f64> = sl_of_y.iter().zip(&sl).map(|(a, b)| a - b).collect();
        let ax = problem.apply(&x, &xl);
        let rp = &b - &ax;
        let pobj = inner(&problem.c_psd, &x) + problem.c_lin.iter().zip(&xl).map(|(a, b)| a * b).sum::<f64>();
        let dobj = b.dot(&y);
        let gap = inner(&x, &s) + xl.iter().zip(&sl).map(|(a, b)| a * b).sum::<f64>();
        let mu = gap / dim;
        let rel_gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        let pinf = rp.norm() / (1.0 + norm_b);
        let dinf = (rd.norm_squared() + rdl.iter().map(|v| v * v).sum::<f64>()).sqrt() / (1.0 + norm_c);
        let residual = rel_gap.max(pinf).max(dinf);
        last_residual = residual;
        if residual < opts.tol {
            return Ok(finish(problem, x, xl, y, residual, iter));
        }

        // Schur complement.
        let z = match s.clone().cholesky() {
            Some(ch) => ch.inverse(),
            None => break,
        };
        let zl: Vec<f64> = sl.iter().map(|v| 1.0 / v).collect();
        let mut mm = DMatrix::zeros(m, m);
        for k in 0..m {
            for l in k..m {
                let mut acc = 0.0;
                for &(a, bb, v) in &dirs[k] {
                    for &(c, d, w) in &dirs[l] {
                        acc += v * w * x[(bb, c)] * z[(d, a)];
                    }
                }
                for &(p, v) in &problem.terms[k].lin {
                    for &(q, w) in &problem.terms[l].lin {
                        if p == q {
                            acc += v * w * xl[p] * zl[p];
                        }
                    }
                }
                mm[(k, l)] = acc;
                mm[(l, k)] = acc;
            }
        }
        let diag_max = (0..m).fold(0.0f64, |a, k| a.max(mm[(k, k)]));
        let chol = match mm.clone().cholesky() {
            Some(c) => c,
            None => {
                let mut reg = mm.clone();
                for k in 0..m {
                    reg[(k, k)] += 1e-14 * diag_max.max(1.0);
                }
                match reg.cholesky() {
                    Some(c) => c,
                    None => break,
                }
            }
        };
        let x_rd_z = &x * &rd * &z;
        let x_rdl_z: Vec<f64> = (0..nl).map(|i| xl[i] * rdl[i] * zl[i]).collect();
        let base = problem.apply(&x_rd_z, &x_rdl_z);

        let direction = |r: &DenseMatrix, rl: &[f64]| {
            let rz = r * &z;
            let rzl: Vec<f64> = (0..nl).map(|i| rl[i] * zl[i]).collect();
            let rhs = &rp - problem.apply(&rz, &rzl) + &base;
            let dy = chol.solve(&rhs);
            let (atdy, atdyl) = {
                let mut a = DMatrix::zeros(n, n);
                let mut al = vec![0.0; nl];
                for (t, &v) in problem.terms.iter().zip(dy.iter()) {
                    for &(i, j, w) in &t.psd {
                        a[(i, j)] += v * w;
                        if i != j {
                            a[(j, i)] += v * w;
                        }
                    }
                    for &(l, w) in &t.lin {
                        al[l] += v * w;
                    }
                }
                (a, al)
            };
            let ds = &rd - atdy;
            let dsl: Vec<f64> = (0..nl).map(|i| rdl[i] - atdyl[i]).collect();
            let dx = sym(&(rz - &x * &ds * &z));
            let dxl: Vec<f64> = (0..nl).map(|i| (rl[i] - xl[i] * dsl[i]) * zl[i]).collect();
            (dx, dxl, dy, ds, dsl)
        };

        // Predictor.
        let xs = &x * &s;
        let r_aff = -&xs;
        let rl_aff: Vec<f64> = (0..nl).map(|i| -xl[i] * sl[i]).collect();
        let (dxa, dxla, _, dsa, dsla) = direction(&r_aff, &rl_aff);
        let ap = max_step(&x, &dxa, &xl, &dxla).min(1.0);
        let ad = max_step(&s, &dsa, &sl, &dsla).min(1.0);
        let gap_aff = inner(&(&x + &dxa * ap), &(&s + &dsa * ad))
            + (0..nl)
                .map(|i| (xl[i] + ap * dxla[i]) * (sl[i] + ad * dsla[i]))
                .sum::<f64>();
        let sigma = ((gap_aff / gap).max(0.0)).powi(3).min(1.0);

        // Corrector.
        let r = DMatrix::identity(n, n) * (sigma * mu) - &xs - &dxa * &dsa;
        let rl: Vec<f64> = (0..nl)
            .map(|i| sigma * mu - xl[i] * sl[i] - dxla[i] * dsla[i])
            .collect();
        let (dx, dxl, dy, ds, dsl) = direction(&r, &rl);
        let tau = if iter < 5 { 0.9 } else { 0.98 };
        let ap = (tau * max_step(&x, &dx, &xl, &dxl)).min(1.0);
        let ad = (tau * max_step(&s, &ds, &sl, &dsl)).min(1.0);
        if ap < 1e-12 && ad < 1e-12 {
            break;
        }
        x = sym(&(&x + &dx * ap));
        for i in 0..nl {
            xl[i] += ap * dxl[i];
        }
        y += &dy * ad;
        s = sym(&(&s + &ds * ad));
        for i in 0..nl {
            sl[i] += ad * dsl[i];
        }
    }
    if last_residual < opts.loose_tol {
        return Ok(finish(problem, x, xl, y, last_residual, opts.max_iter));
    }
    Err(Error::Solver {
        message: format!("interior point stalled with residual {last_residual:.3e}"),
        best: Some(y.iter().copied().collect()),
    })
}

fn finish(
    problem: &SdpProblem,
    x: DenseMatrix,
    xl: Vec<f64>,
    y: DVector<f64>,
    residual: f64,
    iterations: usize,
) -> SdpSolution {
    let y: Vec<f64> = y.iter().copied().collect();
    let (s_psd, s_lin) = problem.slack(&y);
    let dual_objective = problem.b.iter().zip(&y).map(|(a, b)| a * b).sum();
    let primal_objective =
        inner(&problem.c_psd, &x) + problem.c_lin.iter().zip(&xl).map(|(a, b)| a * b).sum::<f64>();
    SdpSolution {
        y,
        s_psd,
        s_lin,
        x_psd: x,
        x_lin: xl,
        dual_objective,
        primal_objective,
        residual,
        iterations,
    }
}
