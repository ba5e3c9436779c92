use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Par, Side};
use serde::{Deserialize, Serialize};
use std::sync::Once;

use super::sparse::CsrMatrix;
use super::system::ReducedSystem;
use crate::error::{Result, VemError};
use crate::vemlocal::MethodKind;

/// Relative residual accepted after a solve.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Relative tolerance of the conjugate gradient fallback.
pub const CG_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    /// Nothing to solve (no free DOFs).
    Empty,
    SparseCholesky,
    ConjugateGradient,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    /// Full global DOF vector, boundary values included.
    pub solution: Vec<f64>,
    pub solver: SolverKind,
    pub iterations: Option<usize>,
    /// `||A x - b|| / ||b||` on the free DOFs (absolute when `b = 0`).
    pub residual: f64,
    /// Whether the sparse Cholesky factorization succeeded.
    pub spd: bool,
}

fn sequential() {
    static ONCE: Once = Once::new();
    ONCE.call_once(|| faer::set_global_parallelism(Par::Seq));
}

/// Solve the reduced SPD system by sparse Cholesky, falling back to Jacobi-preconditioned CG.
pub fn solve(system: &ReducedSystem) -> Result<SolveReport> {
    let n = system.free.len();
    if n == 0 {
        return Ok(SolveReport {
            solution: system.expand(&[]),
            solver: SolverKind::Empty,
            iterations: None,
            residual: 0.0,
            spd: true,
        });
    }
    let (x, solver, iterations, spd) = match cholesky(&system.a, &system.b) {
        Some(x) => (x, SolverKind::SparseCholesky, None, true),
        None => match conjugate_gradient(&system.a, &system.b, CG_TOL, 20 * n) {
            Some((x, it)) => (x, SolverKind::ConjugateGradient, Some(it), false),
            None => return Err(singular(system, "Cholesky factorization failed and conjugate gradients did not converge")),
        },
    };
    let residual = relative_residual(&system.a, &x, &system.b);
    if residual.is_nan() || residual > RESIDUAL_TOL {
        return Err(singular(system, &format!("relative residual {residual:e} exceeds {RESIDUAL_TOL:e}")));
    }
    Ok(SolveReport { solution: system.expand(&x), solver, iterations, residual, spd })
}

fn singular(system: &ReducedSystem, what: &str) -> VemError {
    let mut msg = format!("reduced system of size {} appears singular: {what}", system.free.len());
    if system.method == MethodKind::E2vem && system.k > 1 {
        msg.push_str(&format!(
            "; note that well-posedness of the stabilization-free method is only proven for k=1 (here k={})",
            system.k
        ));
    }
    VemError::Solver(msg)
}

fn cholesky(a: &CsrMatrix, b: &[f64]) -> Option<Vec<f64>> {
    sequential();
    let n = a.n();
    let triplets: Vec<_> = a.triplets().filter(|&(r, c, _)| r >= c).map(|(r, c, v)| Triplet::new(r, c, v)).collect();
    let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets).ok()?;
    let llt = mat.sp_cholesky(Side::Lower).ok()?;
    let mut rhs = Mat::<f64>::from_fn(n, 1, |i, _| b[i]);
    llt.solve_in_place(rhs.as_mut());
    let x: Vec<f64> = (0..n).map(|i| rhs[(i, 0)]).collect();
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Jacobi-preconditioned conjugate gradients. Returns the solution and iteration count,
/// or `None` without convergence.
pub fn conjugate_gradient(a: &CsrMatrix, b: &[f64], tol: f64, max_iter: usize) -> Option<(Vec<f64>, usize)> {
    let n = a.n();
    let dinv: Vec<f64> = a.diagonal().iter().map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 }).collect();
    let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
    let bnorm = dot(b, b).sqrt();
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Some((x, 0));
    }
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&dinv).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    for it in 1..=max_iter {
        let ap = a.matvec(&p);
        let pap = dot(&p, &ap);
        if pap.is_nan() || pap <= 0.0 {
            return None;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if dot(&r, &r).sqrt() <= tol * bnorm {
            return Some((x, it));
        }
        for i in 0..n {
            z[i] = r[i] * dinv[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    None
}

fn relative_residual(a: &CsrMatrix, x: &[f64], b: &[f64]) -> f64 {
    let ax = a.matvec(x);
    let r = ax.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
    let bn = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if bn > 0.0 {
        r / bn
    } else {
        r
    }
}
