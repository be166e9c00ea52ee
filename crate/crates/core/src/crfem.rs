//! Crouzeix–Raviart nonconforming `P1` elements for `-Δu = f`, `u = 0` on
//! the boundary, and the edge-mean comparison with the lowest-order reduced
//! HDG scheme.

use crate::basis::tri_quadrature;
use crate::hdg::HdgSolution;
use crate::linsolve::{solve_system, CsrMatrix, SolveStats};
use crate::mesh::{Mesh, Point};
use crate::{Error, Result};

/// Edge means (equivalently midpoint values) of the discrete solution, zero on
/// boundary edges.
#[derive(Debug, Clone)]
pub struct CrSolution {
    pub values: Vec<f64>,
    pub stats: SolveStats,
}

/// Barycentric coordinates of triangle `t` as affine functions `[a, b, c]`,
/// `λ_i(x, y) = a + b x + c y`.
fn barycentric(mesh: &Mesh, t: usize) -> [[f64; 3]; 3] {
    let v = mesh.vertices(t);
    let det = (v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]);
    let mut out = [[0.0; 3]; 3];
    for (i, o) in out.iter_mut().enumerate() {
        let (p, q) = (v[(i + 1) % 3], v[(i + 2) % 3]);
        *o = [
            (p[0] * q[1] - q[0] * p[1]) / det,
            (p[1] - q[1]) / det,
            (q[0] - p[0]) / det,
        ];
    }
    out
}

/// Solves with load quadrature of exactness 4.
pub fn solve_cr(mesh: &Mesh, f: &(dyn Fn(Point) -> f64 + Sync)) -> Result<CrSolution> {
    solve_cr_with(mesh, f, 4)
}

/// Local basis `ψ_i = 1 - 2λ_i` belongs to side `i` (opposite vertex `i`).
pub fn solve_cr_with(
    mesh: &Mesh,
    f: &(dyn Fn(Point) -> f64 + Sync),
    load_degree: usize,
) -> Result<CrSolution> {
    let rule = tri_quadrature(load_degree)?;
    let mut free = vec![None; mesh.num_edges()];
    let mut n = 0;
    for (e, edge) in mesh.edges().iter().enumerate() {
        if !edge.boundary {
            free[e] = Some(n);
            n += 1;
        }
    }
    let mut triplets = Vec::with_capacity(9 * mesh.num_triangles());
    let mut rhs = vec![0.0; n];
    for t in 0..mesh.num_triangles() {
        let lam = barycentric(mesh, t);
        let area = mesh.area(t);
        let v = mesh.vertices(t);
        let edges = mesh.triangle_edges(t);
        let mut load = [0.0; 3];
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            let x = [
                v[0][0] + (v[1][0] - v[0][0]) * p[0] + (v[2][0] - v[0][0]) * p[1],
                v[0][1] + (v[1][1] - v[0][1]) * p[0] + (v[2][1] - v[0][1]) * p[1],
            ];
            let fx = f(x) * w * 2.0 * area;
            for (i, l) in lam.iter().enumerate() {
                load[i] += fx * (1.0 - 2.0 * (l[0] + l[1] * x[0] + l[2] * x[1]));
            }
        }
        for i in 0..3 {
            let Some(r) = free[edges[i]] else { continue };
            rhs[r] += load[i];
            for j in 0..3 {
                if let Some(c) = free[edges[j]] {
                    let k = 4.0 * area * (lam[i][1] * lam[j][1] + lam[i][2] * lam[j][2]);
                    triplets.push((r, c, k));
                }
            }
        }
    }
    let op = CsrMatrix::from_triplets(n, n, triplets);
    let (x, stats) = solve_system(&op, &rhs, true, 1e-12)?;
    let values = free.iter().map(|d| d.map_or(0.0, |i| x[i])).collect();
    Ok(CrSolution { values, stats })
}

/// Per-triangle affine coefficients `[a, b, c]` (`u = a + b x + c y`) of the
/// function whose edge means are `means`.
pub fn cr_interpolate(mesh: &Mesh, means: &[f64]) -> Result<Vec<[f64; 3]>> {
    if means.len() != mesh.num_edges() {
        return Err(Error::MeshMismatch(format!(
            "{} edge values for {} edges",
            means.len(),
            mesh.num_edges()
        )));
    }
    Ok((0..mesh.num_triangles())
        .map(|t| {
            let lam = barycentric(mesh, t);
            let mut c = [0.0; 3];
            for (i, &e) in mesh.triangle_edges(t).iter().enumerate() {
                let m = means[e];
                c[0] += m * (1.0 - 2.0 * lam[i][0]);
                c[1] -= 2.0 * m * lam[i][1];
                c[2] -= 2.0 * m * lam[i][2];
            }
            c
        })
        .collect())
}

/// `max_e |mean_e(û_h) - mean_e(u_CR)| / (1 + |mean_e(u_CR)|)`.
pub fn compare_edge_means(hdg: &HdgSolution, cr: &CrSolution, mesh: &Mesh) -> Result<f64> {
    if hdg.hybrid.len() != mesh.num_edges() || cr.values.len() != mesh.num_edges() {
        return Err(Error::MeshMismatch(format!(
            "hdg has {} edges, cr has {}, mesh has {}",
            hdg.hybrid.len(),
            cr.values.len(),
            mesh.num_edges()
        )));
    }
    Ok((0..mesh.num_edges())
        .map(|e| (hdg.edge_mean(e) - cr.values[e]).abs() / (1.0 + cr.values[e].abs()))
        .fold(0.0, f64::max))
}
