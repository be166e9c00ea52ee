//! Error norms of a discrete pair against a smooth exact solution, and
//! convergence orders.

use rayon::prelude::*;
use serde::Serialize;

use crate::basis::{gauss_legendre, project_edge, tri_quadrature, AffineMap};
use crate::hdg::HdgSolution;
use crate::mesh::{Mesh, Point};
use crate::Result;

/// Exact solution with first and second derivatives.
pub trait ExactSolution: Send + Sync {
    fn value(&self, p: Point) -> f64;
    fn gradient(&self, p: Point) -> [f64; 2];
    /// `[u_xx, u_xy, u_yy]`
    fn hessian(&self, p: Point) -> [f64; 3];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorReport {
    /// `‖u - u_h‖_0`
    pub l2: f64,
    /// Broken `H¹` seminorm `|u - u_h|_{1,h}`.
    pub h1: f64,
    /// `(Σ_K h_K² |u - u_h|²_{2,K})^{1/2}`
    pub h2_weighted: f64,
    /// `(Σ_K Σ_{e⊂∂K} h_e⁻¹ ‖P_{k-1}(û_h - u_h)‖²_{0,e})^{1/2}`; the exact
    /// solution cancels from the jump.
    pub jump: f64,
    /// `(h1² + h2_weighted² + jump²)^{1/2}`
    pub energy: f64,
    /// Largest `|mean_e(û_h) - mean_e(u)|` over boundary edges.
    pub boundary_mean: f64,
    pub h: f64,
    pub skeleton_dofs: usize,
}

/// Errors with triangle quadrature of exactness `2k + 6`.
pub fn error_report(
    solution: &HdgSolution,
    exact: &dyn ExactSolution,
    mesh: &Mesh,
) -> Result<ErrorReport> {
    error_report_with_degree(solution, exact, mesh, 2 * solution.config.k + 6)
}

pub fn error_report_with_degree(
    solution: &HdgSolution,
    exact: &dyn ExactSolution,
    mesh: &Mesh,
    degree: usize,
) -> Result<ErrorReport> {
    let k = solution.config.k;
    let rule = tri_quadrature(degree)?;
    let edge_rule = gauss_legendre(k + 2)?;
    let basis = &solution.basis;
    let tables: Vec<(f64, [f64; 2], Vec<f64>, Vec<[f64; 2]>, Vec<[f64; 3]>)> = rule
        .points
        .iter()
        .zip(&rule.weights)
        .map(|(&p, &w)| (w, p, basis.values(p), basis.gradients(p), basis.hessians(p)))
        .collect();

    let sums = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            let map = AffineMap::new(mesh.vertices(t));
            let c = &solution.element[t];
            let hk = mesh.diameter(t);
            let (mut l2, mut h1, mut h2) = (0.0, 0.0, 0.0);
            for (w, p, vals, grads, hess) in &tables {
                let x = map.map(*p);
                let wd = w * map.det;
                let mut uh = 0.0;
                let mut guh = [0.0; 2];
                let mut huh = [0.0; 3];
                for i in 0..c.len() {
                    uh += c[i] * vals[i];
                    let g = map.grad(grads[i]);
                    let h = map.hessian(hess[i]);
                    for q in 0..2 {
                        guh[q] += c[i] * g[q];
                    }
                    for q in 0..3 {
                        huh[q] += c[i] * h[q];
                    }
                }
                let gu = exact.gradient(x);
                let hu = exact.hessian(x);
                l2 += wd * (exact.value(x) - uh).powi(2);
                h1 += wd * ((gu[0] - guh[0]).powi(2) + (gu[1] - guh[1]).powi(2));
                h2 += wd * hk * hk * (0..3).map(|q| (hu[q] - huh[q]).powi(2)).sum::<f64>();
            }
            let mut jump = 0.0;
            for &e in &mesh.triangle_edges(t) {
                let diff: Vec<f64> = edge_rule
                    .points
                    .iter()
                    .map(|&s| {
                        let x = mesh.edge_point(e, s);
                        let uh: f64 = basis
                            .values(map.inverse(x))
                            .iter()
                            .zip(c)
                            .map(|(v, ci)| v * ci)
                            .sum();
                        solution.hybrid_value(e, s) - uh
                    })
                    .collect();
                let coeffs = project_edge(&diff, &edge_rule, k - 1);
                // h_e⁻¹ ‖P d‖² with ds = h_e/2 dt and orthonormal coefficients
                jump += 0.5 * coeffs.iter().map(|v| v * v).sum::<f64>();
            }
            [l2, h1, h2, jump]
        })
        .reduce(
            || [0.0; 4],
            |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]],
        );

    let mut boundary_mean: f64 = 0.0;
    for e in (0..mesh.num_edges()).filter(|&e| mesh.edges()[e].boundary) {
        let mean_u = 0.5 * edge_rule.integrate(|s| exact.value(mesh.edge_point(e, s)));
        boundary_mean = boundary_mean.max((solution.edge_mean(e) - mean_u).abs());
    }

    let [l2, h1, h2, jump] = sums.map(|v: f64| v.max(0.0).sqrt());
    Ok(ErrorReport {
        l2,
        h1,
        h2_weighted: h2,
        jump,
        energy: (h1 * h1 + h2 * h2 + jump * jump).sqrt(),
        boundary_mean,
        h: mesh.h(),
        skeleton_dofs: solution.skeleton_dofs,
    })
}

/// Order `log(e_{l-1}/e_l) / log(h_{l-1}/h_l)` of each refinement step;
/// `None` where an error is not positive.
pub fn fit_orders(data: &[(f64, f64)]) -> Vec<Option<f64>> {
    data.windows(2)
        .map(|w| {
            let ((h0, e0), (h1, e1)) = (w[0], w[1]);
            (e0 > 0.0 && e1 > 0.0 && h0 > 0.0 && h1 > 0.0 && h0 != h1)
                .then(|| (e0 / e1).ln() / (h0 / h1).ln())
        })
        .collect()
}

/// Least-squares slope of `log e` against `log h`; `None` with fewer than two
/// positive points.
pub fn least_squares_order(data: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = data
        .iter()
        .filter(|(h, e)| *h > 0.0 && *e > 0.0)
        .map(|(h, e)| (h.ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
