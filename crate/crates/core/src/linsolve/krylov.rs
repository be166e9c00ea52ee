//! Jacobi-preconditioned Krylov solvers.

use super::CsrMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct KrylovSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// True relative residual `‖b - Ax‖ / ‖b‖`, recomputed at exit.
    pub residual: f64,
    /// `‖b - Ax‖ / (‖A‖ ‖x‖ + ‖b‖)`, with `‖A‖` bounded by `(‖A‖₁ ‖A‖∞)^{1/2}`.
    pub backward_error: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn inverse_diagonal(op: &CsrMatrix) -> Vec<f64> {
    op.diagonal()
        .into_iter()
        .map(|d| if d != 0.0 { 1.0 / d.abs() } else { 1.0 })
        .collect()
}

fn true_residual(op: &CsrMatrix, rhs: &[f64], x: &[f64], r: &mut [f64]) -> f64 {
    op.matvec_into(x, r);
    for (ri, bi) in r.iter_mut().zip(rhs) {
        *ri = bi - *ri;
    }
    norm(r)
}

enum Verdict {
    Converged,
    Restart,
}

/// Stopping test shared by the solvers.
///
/// Converged once `‖b - Ax‖ ≤ tol ‖b‖`. When the true residual sits at the
/// rounding floor of the stored iterate, `‖b - Ax‖ ≤ tol (‖A‖ ‖x‖ + ‖b‖)` and
/// a restart from the true residual no longer halves it, the iterate is
/// accepted as well.
struct Monitor<'a> {
    op: &'a CsrMatrix,
    rhs: &'a [f64],
    tol: f64,
    bnorm: f64,
    anorm: f64,
    last_check: f64,
    scratch: Vec<f64>,
}

impl<'a> Monitor<'a> {
    fn new(op: &'a CsrMatrix, rhs: &'a [f64], tol: f64) -> Self {
        Self {
            op,
            rhs,
            tol,
            bnorm: norm(rhs),
            anorm: op.norm_bound(),
            last_check: f64::INFINITY,
            scratch: vec![0.0; rhs.len()],
        }
    }

    /// Recomputes `b - Ax` into the scratch buffer and decides.
    fn check(&mut self, x: &[f64]) -> Verdict {
        let res = true_residual(self.op, self.rhs, x, &mut self.scratch);
        let floor = self.tol * (self.anorm * norm(x) + self.bnorm);
        let stalled = res <= floor && res > 0.5 * self.last_check;
        self.last_check = res;
        if res <= self.tol * self.bnorm || stalled {
            Verdict::Converged
        } else {
            Verdict::Restart
        }
    }

    fn residual(&self) -> &[f64] {
        &self.scratch
    }

    fn finish(mut self, x: Vec<f64>, iterations: usize) -> KrylovSolution {
        let res = true_residual(self.op, self.rhs, &x, &mut self.scratch);
        let backward_error = res / (self.anorm * norm(&x) + self.bnorm);
        KrylovSolution {
            residual: res / self.bnorm,
            backward_error,
            x,
            iterations,
        }
    }

    fn fail(mut self, x: &[f64], iterations: usize) -> Error {
        let res = true_residual(self.op, self.rhs, x, &mut self.scratch);
        Error::NoConvergence {
            iterations,
            residual: res / self.bnorm,
        }
    }
}

/// Preconditioned conjugate gradients for symmetric positive definite `op`.
///
/// Fails with [`Error::NegativeCurvature`] as soon as a search direction has
/// `pᵀAp ≤ 0`. Whenever the recursive residual passes the tolerance the true
/// residual is recomputed; if it has not, iteration restarts from it.
pub fn cg(op: &CsrMatrix, rhs: &[f64], tol: f64, maxiter: usize) -> Result<KrylovSolution> {
    let n = rhs.len();
    let mut x = vec![0.0; n];
    if norm(rhs) == 0.0 {
        return Ok(KrylovSolution {
            x,
            iterations: 0,
            residual: 0.0,
            backward_error: 0.0,
        });
    }
    let mut monitor = Monitor::new(op, rhs, tol);
    let minv = inverse_diagonal(op);
    let mut r = rhs.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&minv).map(|(a, b)| a * b).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut iterations = 0;
    while iterations < maxiter {
        op.matvec_into(&p, &mut ap);
        let curvature = dot(&p, &ap);
        if curvature <= 0.0 {
            return Err(Error::NegativeCurvature {
                iteration: iterations,
            });
        }
        let alpha = rz / curvature;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        iterations += 1;
        let mut restart = false;
        if norm(&r) <= tol * monitor.bnorm {
            match monitor.check(&x) {
                Verdict::Converged => return Ok(monitor.finish(x, iterations)),
                Verdict::Restart => {
                    r.copy_from_slice(monitor.residual());
                    restart = true;
                }
            }
        }
        for i in 0..n {
            z[i] = r[i] * minv[i];
        }
        let rz_next = dot(&r, &z);
        let beta = if restart { 0.0 } else { rz_next / rz };
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(monitor.fail(&x, iterations))
}

/// Transpose-free QMR with right Jacobi preconditioning, for general
/// nonsingular `op`. Restarts from the true residual after a breakdown or a
/// failed convergence check.
pub fn tfqmr(op: &CsrMatrix, rhs: &[f64], tol: f64, maxiter: usize) -> Result<KrylovSolution> {
    let n = rhs.len();
    let mut x = vec![0.0; n];
    if norm(rhs) == 0.0 {
        return Ok(KrylovSolution {
            x,
            iterations: 0,
            residual: 0.0,
            backward_error: 0.0,
        });
    }
    let mut monitor = Monitor::new(op, rhs, tol);
    let bnorm = monitor.bnorm;
    let minv = inverse_diagonal(op);
    let precond_apply = |v: &[f64], out: &mut [f64], tmp: &mut [f64]| {
        for i in 0..n {
            tmp[i] = v[i] * minv[i];
        }
        op.matvec_into(tmp, out);
    };
    let mut tmp = vec![0.0; n];
    let mut r = rhs.to_vec();
    let mut iterations = 0;
    while iterations < maxiter {
        let r0norm = norm(&r);
        let rstar = r.clone();
        let mut u = r.clone();
        let mut w = r.clone();
        let mut v = vec![0.0; n];
        precond_apply(&u, &mut v, &mut tmp);
        let mut uhat = v.clone();
        let mut u_next = vec![0.0; n];
        let mut d = vec![0.0; n];
        let (mut theta, mut eta) = (0.0f64, 0.0f64);
        let mut rho = dot(&rstar, &r);
        let mut rho_last = rho;
        let mut tau = r0norm;
        let mut alpha = 0.0;
        let mut local = 0usize;
        while iterations < maxiter {
            let even = local.is_multiple_of(2);
            if even {
                let vr = dot(&rstar, &v);
                if vr == 0.0 {
                    break;
                }
                alpha = rho / vr;
                for i in 0..n {
                    u_next[i] = u[i] - alpha * v[i];
                }
            }
            let coef = theta * theta / alpha * eta;
            for i in 0..n {
                w[i] -= alpha * uhat[i];
                d[i] = u[i] + coef * d[i];
            }
            theta = norm(&w) / tau;
            let c = 1.0 / (1.0 + theta * theta).sqrt();
            tau *= theta * c;
            eta = c * c * alpha;
            for i in 0..n {
                x[i] += eta * d[i] * minv[i];
            }
            iterations += 1;
            local += 1;
            if tau * (local as f64).sqrt() <= tol * bnorm {
                match monitor.check(&x) {
                    Verdict::Converged => return Ok(monitor.finish(x, iterations)),
                    Verdict::Restart => break,
                }
            }
            if !even {
                rho = dot(&rstar, &w);
                if rho == 0.0 {
                    break;
                }
                let beta = rho / rho_last;
                for i in 0..n {
                    u[i] = w[i] + beta * u[i];
                    v[i] = beta * uhat[i] + beta * beta * v[i];
                }
                precond_apply(&u, &mut uhat, &mut tmp);
                for i in 0..n {
                    v[i] += uhat[i];
                }
            } else {
                precond_apply(&u_next, &mut uhat, &mut tmp);
                std::mem::swap(&mut u, &mut u_next);
                rho_last = rho;
            }
        }
        true_residual(op, rhs, &x, &mut r);
    }
    Err(monitor.fail(&x, iterations))
}
