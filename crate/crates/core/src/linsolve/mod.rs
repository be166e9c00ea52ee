//! Hand-rolled linear algebra: dense LU for element blocks and small global
//! systems, CSR storage for the skeleton operator, and Krylov solvers.

mod dense;
mod krylov;
mod sparse;

pub use dense::{DenseMatrix, LuFactors};
pub use krylov::{cg, tfqmr, KrylovSolution};
pub use sparse::CsrMatrix;

use crate::Result;

/// Systems with fewer unknowns are solved by dense LU.
pub const DENSE_LIMIT: usize = 3000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum SolverKind {
    DenseLu,
    Cg,
    Tfqmr,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SolveStats {
    pub kind: SolverKind,
    pub dofs: usize,
    pub iterations: usize,
    /// Relative residual `‖b - Ax‖ / ‖b‖` of the returned solution.
    pub residual: f64,
    /// `‖b - Ax‖ / (‖A‖ ‖x‖ + ‖b‖)`.
    pub backward_error: f64,
}

/// Iteration budget `20·√n` of the Krylov solvers.
pub fn max_iterations(n: usize) -> usize {
    (20.0 * (n as f64).sqrt()).ceil() as usize
}

/// `(‖b - Ax‖ / ‖b‖, ‖b - Ax‖ / (‖A‖ ‖x‖ + ‖b‖))`
fn residuals(op: &CsrMatrix, rhs: &[f64], x: &[f64]) -> (f64, f64) {
    let norm = |v: &[f64]| v.iter().map(|q| q * q).sum::<f64>().sqrt();
    let ax = op.matvec(x);
    let r = ax
        .iter()
        .zip(rhs)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    let b = norm(rhs);
    let scale = op.norm_bound() * norm(x) + b;
    (
        if b == 0.0 { r } else { r / b },
        if scale == 0.0 { r } else { r / scale },
    )
}

/// Solves `op x = rhs`: dense LU below [`DENSE_LIMIT`] unknowns, otherwise CG
/// when `spd` holds and TFQMR when it does not.
pub fn solve_system(
    op: &CsrMatrix,
    rhs: &[f64],
    spd: bool,
    tol: f64,
) -> Result<(Vec<f64>, SolveStats)> {
    let n = rhs.len();
    if n == 0 {
        let stats = SolveStats {
            kind: SolverKind::DenseLu,
            dofs: 0,
            iterations: 0,
            residual: 0.0,
            backward_error: 0.0,
        };
        return Ok((Vec::new(), stats));
    }
    if n < DENSE_LIMIT {
        let x = op.to_dense().lu()?.solve(rhs);
        let (residual, backward_error) = residuals(op, rhs, &x);
        return Ok((
            x,
            SolveStats {
                kind: SolverKind::DenseLu,
                dofs: n,
                iterations: 0,
                residual,
                backward_error,
            },
        ));
    }
    let maxiter = max_iterations(n);
    let (sol, kind) = if spd {
        (cg(op, rhs, tol, maxiter)?, SolverKind::Cg)
    } else {
        (tfqmr(op, rhs, tol, maxiter)?, SolverKind::Tfqmr)
    };
    Ok((
        sol.x,
        SolveStats {
            kind,
            dofs: n,
            iterations: sol.iterations,
            residual: sol.residual,
            backward_error: sol.backward_error,
        },
    ))
}
