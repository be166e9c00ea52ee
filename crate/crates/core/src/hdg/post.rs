use rayon::prelude::*;

use super::global::HybridDofs;
use super::local::LocalAssembler;
use super::SchemeConfig;
use crate::basis::{gauss_legendre, tri_quadrature, AffineMap, EdgeSpace, TriBasis};
use crate::linsolve::SolveStats;
use crate::mesh::{Mesh, Point};
use crate::{Error, Result};

/// Discrete solution pair: element coefficients in the orthonormal element
/// basis and hybrid coefficients per edge (Dirichlet edges included).
#[derive(Debug, Clone)]
pub struct HdgSolution {
    pub config: SchemeConfig,
    pub basis: TriBasis,
    pub edge_space: EdgeSpace,
    pub element: Vec<Vec<f64>>,
    pub hybrid: Vec<Vec<f64>>,
    /// Size of the condensed global system.
    pub skeleton_dofs: usize,
    pub stats: SolveStats,
}

impl HdgSolution {
    pub fn element_value(&self, mesh: &Mesh, t: usize, x: Point) -> f64 {
        let map = AffineMap::new(mesh.vertices(t));
        dot(&self.basis.values(map.inverse(x)), &self.element[t])
    }

    pub fn element_gradient(&self, mesh: &Mesh, t: usize, x: Point) -> [f64; 2] {
        let map = AffineMap::new(mesh.vertices(t));
        let mut g = [0.0; 2];
        for (gr, c) in self
            .basis
            .gradients(map.inverse(x))
            .into_iter()
            .zip(&self.element[t])
        {
            let gp = map.grad(gr);
            g[0] += c * gp[0];
            g[1] += c * gp[1];
        }
        g
    }

    /// `û` on edge `e` at parameter `t ∈ [-1, 1]` of the global orientation.
    pub fn hybrid_value(&self, e: usize, t: f64) -> f64 {
        self.edge_space.eval_coeffs(&self.hybrid[e], t)
    }

    /// `|e|⁻¹ ∫_e û ds`.
    pub fn edge_mean(&self, e: usize) -> f64 {
        let rule = gauss_legendre(self.edge_space.degree() + 1).expect("small rule");
        0.5 * rule.integrate(|t| self.hybrid_value(e, t))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Parameter of `x` on edge `e`, or an error when `x` is off the segment.
fn edge_parameter(mesh: &Mesh, e: usize, x: Point) -> Result<f64> {
    let [a, b] = mesh.edge_endpoints(e);
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let r = [x[0] - a[0], x[1] - a[1]];
    let s = (r[0] * d[0] + r[1] * d[1]) / len2;
    let off = (r[0] * d[1] - r[1] * d[0]).abs() / len2.sqrt();
    let tol = 1e-10;
    if off > tol * len2.sqrt() || !(-tol..=1.0 + tol).contains(&s) {
        return Err(Error::PointOffEdge {
            edge: e,
            x: x[0],
            y: x[1],
        });
    }
    Ok(2.0 * s.clamp(0.0, 1.0) - 1.0)
}

/// `σ̂ = ∇u_h + τ (û_h - u_h) n` on edge `edge` of `element`, with `n` the
/// outward normal of `element` and `τ = tau0 / h_e`.
pub fn numerical_flux(
    solution: &HdgSolution,
    mesh: &Mesh,
    element: usize,
    edge: usize,
    x: Point,
) -> Result<[f64; 2]> {
    let side = mesh
        .local_side(element, edge)
        .ok_or(Error::EdgeNotOnElement { element, edge })?;
    let t = edge_parameter(mesh, edge, x)?;
    let n = mesh.outward_normal(element, side);
    let tau = solution.config.tau0 / mesh.edge_length(edge);
    let g = solution.element_gradient(mesh, element, x);
    let jump = solution.hybrid_value(edge, t) - solution.element_value(mesh, element, x);
    Ok([g[0] + tau * jump * n[0], g[1] + tau * jump * n[1]])
}

/// `|∫_∂K σ̂·n ds + ∫_K f dx| / (1 + |∫_K f dx|)`.
///
/// `∫_K f` uses the load quadrature of the solve, so the balance is exact up
/// to round-off.
pub fn local_conservation_residual(
    solution: &HdgSolution,
    mesh: &Mesh,
    element: usize,
) -> Result<f64> {
    let config = &solution.config;
    let map = AffineMap::new(mesh.vertices(element));
    let load_rule = tri_quadrature(config.load_degree)?;
    let source = &config.source;
    let f_int = map.det * load_rule.integrate(|p| source(map.map(p)));
    let rule = gauss_legendre(config.k + 1)?;
    let mut flux = 0.0;
    for (side, &e) in mesh.triangle_edges(element).iter().enumerate() {
        let n = mesh.outward_normal(element, side);
        let jac = 0.5 * mesh.edge_length(e);
        for (&t, &w) in rule.points.iter().zip(&rule.weights) {
            let sigma = numerical_flux(solution, mesh, element, e, mesh.edge_point(e, t))?;
            flux += w * jac * (sigma[0] * n[0] + sigma[1] * n[1]);
        }
    }
    Ok((flux + f_int).abs() / (1.0 + f_int.abs()))
}

/// Largest [`local_conservation_residual`] over all elements.
pub fn max_conservation_residual(solution: &HdgSolution, mesh: &Mesh) -> Result<f64> {
    (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| local_conservation_residual(solution, mesh, t))
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// Relative residual `‖b - M x‖ / ‖b‖` of the pair in the uncondensed
/// system `M x = b` (element rows and free hybrid rows).
pub fn full_residual(solution: &HdgSolution, mesh: &Mesh) -> Result<f64> {
    let config = &solution.config;
    let assembler = LocalAssembler::new(config)?;
    let dofs = HybridDofs::new(config, mesh);
    let mut full = vec![0.0; dofs.num_total()];
    for (e, coeffs) in solution.hybrid.iter().enumerate() {
        for (&g, &v) in dofs.edge_dofs(e).iter().zip(coeffs) {
            full[g] = v;
        }
    }
    let nk = assembler.element_dim();
    let per_element: Vec<(f64, f64, Vec<(usize, f64, f64)>)> = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| -> Result<_> {
            let local = assembler.assemble(mesh, t)?;
            let m = local.matrix();
            let hybrid = dofs.local_dofs(local.edges);
            let x: Vec<f64> = solution.element[t]
                .iter()
                .copied()
                .chain(hybrid.iter().map(|&g| full[g]))
                .collect();
            let fixed_part = |row: usize| -> f64 {
                hybrid
                    .iter()
                    .enumerate()
                    .filter(|(_, &g)| dofs.free_index(g).is_none())
                    .map(|(q, &g)| m[(row, nk + q)] * full[g])
                    .sum()
            };
            let y = m.matvec(&x);
            let (mut r2, mut b2) = (0.0, 0.0);
            for i in 0..nk {
                r2 += (y[i] - local.f[i]).powi(2);
                b2 += (local.f[i] - fixed_part(i)).powi(2);
            }
            let rows = hybrid
                .iter()
                .enumerate()
                .filter_map(|(q, &g)| {
                    dofs.free_index(g)
                        .map(|f| (f, y[nk + q], -fixed_part(nk + q)))
                })
                .collect();
            Ok((r2, b2, rows))
        })
        .collect::<Result<_>>()?;
    let (mut r2, mut b2) = (0.0, 0.0);
    let mut hyb_r = vec![0.0; dofs.num_free()];
    let mut hyb_b = vec![0.0; dofs.num_free()];
    for (r, b, rows) in per_element {
        r2 += r;
        b2 += b;
        for (f, y, bf) in rows {
            hyb_r[f] += y;
            hyb_b[f] += bf;
        }
    }
    r2 += hyb_r.iter().map(|v| v * v).sum::<f64>();
    b2 += hyb_b.iter().map(|v| v * v).sum::<f64>();
    Ok(if b2 > 0.0 {
        (r2 / b2).sqrt()
    } else {
        r2.sqrt()
    })
}
