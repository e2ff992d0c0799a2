//! Dense numerical kernel: LP, SDP, symmetric eigenvalues, Beta values and
//! adaptive quadrature.

pub mod lp;
pub mod quad;
pub mod sdp;

use nalgebra::DMatrix;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

pub use lp::{solve_lp, LpProblem, LpSolution, LpStatus, Relation};
pub use quad::{integrate, integrate_split};

/// Row/column matrix of `f64`, used for every dense matrix in the crate.
pub type DenseMatrix = DMatrix<f64>;

/// Relative tolerance for the symmetry check in eigenvalue routines.
pub const SYM_TOL: f64 = 1e-9;

/// Eigenvalues sorted ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
}

impl Spectrum {
    pub fn min(&self) -> Option<f64> {
        self.eigenvalues.first().copied()
    }

    pub fn max(&self) -> Option<f64> {
        self.eigenvalues.last().copied()
    }
}

/// Frobenius norm.
pub fn frobenius(m: &DenseMatrix) -> f64 {
    m.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Eigenvalue tolerance for `m`: `1e-10 · ‖m‖_F`.
pub fn eig_tol(m: &DenseMatrix) -> f64 {
    1e-10 * frobenius(m)
}

fn check_symmetric(m: &DenseMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::Input(format!(
            "matrix is {}x{}, expected square",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::Input("matrix has non-finite entries".into()));
    }
    let scale = 1.0 + m.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    for i in 0..m.nrows() {
        for j in 0..i {
            if (m[(i, j)] - m[(j, i)]).abs() > SYM_TOL * scale {
                return Err(Error::Input(format!(
                    "matrix not symmetric at ({i},{j})"
                )));
            }
        }
    }
    Ok(())
}

/// Full spectrum of a symmetric matrix.
pub fn spectrum(m: &DenseMatrix) -> Result<Spectrum> {
    check_symmetric(m)?;
    if m.nrows() == 0 {
        return Ok(Spectrum {
            eigenvalues: Vec::new(),
        });
    }
    let sym = (m + m.transpose()) * 0.5;
    let mut eigenvalues: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    eigenvalues.sort_by(|a, b| a.total_cmp(b));
    Ok(Spectrum { eigenvalues })
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &DenseMatrix) -> Result<f64> {
    spectrum(m)?
        .min()
        .ok_or_else(|| Error::Input("empty matrix has no eigenvalues".into()))
}

/// `ln B(a, b)`.
pub fn log_beta(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!(
            "log_beta needs positive finite arguments, got ({a}, {b})"
        )));
    }
    // Sort so that the two orders share one evaluation path.
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    Ok(ln_gamma(lo) + ln_gamma(hi) - ln_gamma(lo + hi))
}

/// Cyclic Jacobi eigenvalues, kept as an independent reference for the
/// tridiagonal QR route used by [`spectrum`].
pub fn jacobi_eigenvalues(m: &DenseMatrix) -> Result<Vec<f64>> {
    check_symmetric(m)?;
    let n = m.nrows();
    let mut a = (m + m.transpose()) * 0.5;
    let total = frobenius(&a).max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..i {
                off += 2.0 * a[(i, j)] * a[(i, j)];
            }
        }
        if off.sqrt() <= 1e-15 * total {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    ev.sort_by(|x, y| x.total_cmp(y));
    Ok(ev)
}
