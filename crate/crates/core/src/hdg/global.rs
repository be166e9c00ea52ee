use rayon::prelude::*;

use super::local::{condense, Condensed, LocalAssembler};
use super::post::HdgSolution;
use super::{HybridContinuity, SchemeConfig};
use crate::basis::{gauss_legendre, project_edge, EdgeSpace, TriBasis};
use crate::linsolve::{solve_system, CsrMatrix, DenseMatrix};
use crate::mesh::Mesh;
use crate::{Error, Result};

/// Numbering of the hybrid unknowns.
///
/// Every hybrid unknown, Dirichlet ones included, has a "full" index; the
/// unknowns of the global system (the free ones) additionally get a compact
/// index in increasing full order.
#[derive(Debug, Clone)]
pub struct HybridDofs {
    edge_dofs: Vec<Vec<usize>>,
    free: Vec<Option<usize>>,
    num_free: usize,
}

impl HybridDofs {
    /// Discontinuous: edge `e` owns full indices `e·(l+1) .. (e+1)·(l+1)`.
    /// Continuous: vertex values are indexed by node, interior Lagrange nodes
    /// of edge `e` follow after all mesh nodes.
    pub fn new(config: &SchemeConfig, mesh: &Mesh) -> Self {
        let ne = config.hybrid_degree() + 1;
        let edges = mesh.edges();
        let mut fixed: Vec<bool>;
        let edge_dofs: Vec<Vec<usize>> = match config.hybrid {
            HybridContinuity::Discontinuous => {
                fixed = vec![false; edges.len() * ne];
                edges
                    .iter()
                    .enumerate()
                    .map(|(e, edge)| {
                        let dofs: Vec<usize> = (e * ne..(e + 1) * ne).collect();
                        if edge.boundary {
                            dofs.iter().for_each(|&g| fixed[g] = true);
                        }
                        dofs
                    })
                    .collect()
            }
            HybridContinuity::Continuous => {
                let interior = ne - 2;
                let nn = mesh.num_nodes();
                fixed = mesh.is_boundary_node();
                fixed.resize(nn + edges.len() * interior, false);
                edges
                    .iter()
                    .enumerate()
                    .map(|(e, edge)| {
                        let mut dofs = vec![edge.nodes[0], edge.nodes[1]];
                        dofs.extend((0..interior).map(|m| nn + e * interior + m));
                        if edge.boundary {
                            dofs[2..].iter().for_each(|&g| fixed[g] = true);
                        }
                        dofs
                    })
                    .collect()
            }
        };
        let mut num_free = 0;
        let free = fixed
            .iter()
            .map(|&f| {
                (!f).then(|| {
                    num_free += 1;
                    num_free - 1
                })
            })
            .collect();
        Self {
            edge_dofs,
            free,
            num_free,
        }
    }

    pub fn edge_dofs(&self, edge: usize) -> &[usize] {
        &self.edge_dofs[edge]
    }

    pub fn num_total(&self) -> usize {
        self.free.len()
    }

    pub fn num_free(&self) -> usize {
        self.num_free
    }

    pub fn free_index(&self, full: usize) -> Option<usize> {
        self.free[full]
    }

    /// Full indices of the local hybrid unknowns of an element, side by side.
    pub fn local_dofs(&self, edges: [usize; 3]) -> Vec<usize> {
        edges
            .iter()
            .flat_map(|&e| self.edge_dofs[e].iter().copied())
            .collect()
    }
}

/// Full-length vector holding the Dirichlet values on fixed unknowns, zero
/// elsewhere: `P_l(g)` on modal edges, nodal interpolation of `g` otherwise.
fn boundary_values(config: &SchemeConfig, mesh: &Mesh, dofs: &HybridDofs) -> Result<Vec<f64>> {
    let mut values = vec![0.0; dofs.num_total()];
    let g = &config.dirichlet;
    let space = config.edge_space();
    let rule = gauss_legendre(
        (config.hybrid_degree() + config.k + 4).min(crate::basis::MAX_GAUSS_POINTS),
    )?;
    for e in (0..mesh.num_edges()).filter(|&e| mesh.edges()[e].boundary) {
        let local: Vec<f64> = match &space {
            EdgeSpace::Modal(b) => {
                let samples: Vec<f64> = rule
                    .points
                    .iter()
                    .map(|&t| g(mesh.edge_point(e, t)))
                    .collect();
                project_edge(&samples, &rule, b.degree)
            }
            EdgeSpace::Nodal(b) => b
                .nodes()
                .into_iter()
                .map(|t| g(mesh.edge_point(e, t)))
                .collect(),
        };
        for (&full, v) in dofs.edge_dofs(e).iter().zip(local) {
            values[full] = v;
        }
    }
    Ok(values)
}

/// Condensed global system over the free hybrid unknowns.
#[derive(Debug, Clone)]
pub struct SkeletonSystem {
    pub operator: CsrMatrix,
    pub rhs: Vec<f64>,
    pub dofs: HybridDofs,
    /// Full-length hybrid vector with the Dirichlet values filled in.
    pub boundary: Vec<f64>,
    /// Per-element recovery data, indexed by element.
    pub elements: Vec<Condensed>,
}

impl SkeletonSystem {
    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    /// Full-length hybrid vector from the free unknowns.
    pub fn expand(&self, free: &[f64]) -> Vec<f64> {
        let mut full = self.boundary.clone();
        for (g, v) in full.iter_mut().enumerate() {
            if let Some(i) = self.dofs.free_index(g) {
                *v = free[i];
            }
        }
        full
    }
}

pub fn assemble_skeleton(config: &SchemeConfig, mesh: &Mesh) -> Result<SkeletonSystem> {
    let assembler = LocalAssembler::new(config)?;
    let dofs = HybridDofs::new(config, mesh);
    let boundary = boundary_values(config, mesh, &dofs)?;
    let elements: Vec<Condensed> = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            assembler
                .assemble(mesh, t)
                .and_then(|local| condense(&local))
        })
        .collect::<Result<_>>()?;

    let contributions: Vec<(Vec<(usize, usize, f64)>, Vec<(usize, f64)>)> = elements
        .par_iter()
        .enumerate()
        .map(|(t, c)| {
            let local = dofs.local_dofs(mesh.triangle_edges(t));
            let mut triplets = Vec::with_capacity(local.len() * local.len());
            let mut loads = Vec::with_capacity(local.len());
            for (r, &gr) in local.iter().enumerate() {
                let Some(row) = dofs.free_index(gr) else {
                    continue;
                };
                let mut load = c.load[r];
                for (q, &gc) in local.iter().enumerate() {
                    match dofs.free_index(gc) {
                        Some(col) => triplets.push((row, col, c.schur[(r, q)])),
                        None => load -= c.schur[(r, q)] * boundary[gc],
                    }
                }
                loads.push((row, load));
            }
            (triplets, loads)
        })
        .collect();

    let n = dofs.num_free();
    let mut rhs = vec![0.0; n];
    let mut triplets = Vec::with_capacity(contributions.iter().map(|c| c.0.len()).sum());
    for (t, l) in contributions {
        triplets.extend(t);
        for (row, v) in l {
            rhs[row] += v;
        }
    }
    let operator = CsrMatrix::from_triplets(n, n, triplets);
    Ok(SkeletonSystem {
        operator,
        rhs,
        dofs,
        boundary,
        elements,
    })
}

/// Solves with relative tolerance `1e-12` on the condensed system.
pub fn solve(config: &SchemeConfig, mesh: &Mesh) -> Result<HdgSolution> {
    solve_with(config, mesh, 1e-12)
}

pub fn solve_with(config: &SchemeConfig, mesh: &Mesh, tol: f64) -> Result<HdgSolution> {
    let system = assemble_skeleton(config, mesh)?;
    let spd = config.s == 1.0;
    let (free, stats) = solve_system(&system.operator, &system.rhs, spd, tol).map_err(|err| {
        let hint = match (&err, spd) {
            (Error::NegativeCurvature { .. } | Error::Singular { .. }, true) => "increase tau0",
            (Error::NoConvergence { .. }, _) => "increase tau0 or reduce the mesh size",
            _ => "check the scheme parameters",
        };
        Error::Solve {
            params: config.describe(),
            hint,
            source: Box::new(err),
        }
    })?;
    let full = system.expand(&free);
    let hybrid: Vec<Vec<f64>> = (0..mesh.num_edges())
        .map(|e| system.dofs.edge_dofs(e).iter().map(|&g| full[g]).collect())
        .collect();
    let element = system
        .elements
        .par_iter()
        .enumerate()
        .map(|(t, c)| {
            let local: Vec<f64> = system
                .dofs
                .local_dofs(mesh.triangle_edges(t))
                .iter()
                .map(|&g| full[g])
                .collect();
            c.recover(&local)
        })
        .collect();
    Ok(HdgSolution {
        config: config.clone(),
        basis: TriBasis::new(config.k),
        edge_space: config.edge_space(),
        element,
        hybrid,
        skeleton_dofs: system.dim(),
        stats,
    })
}

/// Uncondensed system with all element unknowns first, then the free hybrid
/// unknowns. Dense, for small meshes only.
#[derive(Debug, Clone)]
pub struct FullSystem {
    pub matrix: DenseMatrix,
    pub rhs: Vec<f64>,
    pub element_dim: usize,
    pub dofs: HybridDofs,
    pub boundary: Vec<f64>,
}

pub fn assemble_full_dense(config: &SchemeConfig, mesh: &Mesh) -> Result<FullSystem> {
    let assembler = LocalAssembler::new(config)?;
    let dofs = HybridDofs::new(config, mesh);
    let boundary = boundary_values(config, mesh, &dofs)?;
    let nk = assembler.element_dim();
    let ne_total = nk * mesh.num_triangles();
    let n = ne_total + dofs.num_free();
    let mut matrix = DenseMatrix::zeros(n, n);
    let mut rhs = vec![0.0; n];
    for t in 0..mesh.num_triangles() {
        let local = assembler.assemble(mesh, t)?;
        let m = local.matrix();
        let hybrid = dofs.local_dofs(local.edges);
        // local index -> Ok(global row/col) or Err(full hybrid index of a fixed unknown)
        let map: Vec<std::result::Result<usize, usize>> = (0..nk)
            .map(|i| Ok(t * nk + i))
            .chain(
                hybrid
                    .iter()
                    .map(|&g| dofs.free_index(g).map(|f| ne_total + f).ok_or(g)),
            )
            .collect();
        for (r, gr) in map.iter().enumerate() {
            let Ok(row) = *gr else { continue };
            if r < nk {
                rhs[row] += local.f[r];
            }
            for (q, gc) in map.iter().enumerate() {
                match *gc {
                    Ok(col) => matrix[(row, col)] += m[(r, q)],
                    Err(full) => rhs[row] -= m[(r, q)] * boundary[full],
                }
            }
        }
    }
    Ok(FullSystem {
        matrix,
        rhs,
        element_dim: nk,
        dofs,
        boundary,
    })
}

impl FullSystem {
    /// Solves by dense LU and splits into per-element and per-edge coefficients.
    pub fn solve(&self, mesh: &Mesh) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
        let x = self.matrix.lu()?.solve(&self.rhs);
        let nk = self.element_dim;
        let ne_total = nk * mesh.num_triangles();
        let element = x[..ne_total].chunks(nk).map(<[f64]>::to_vec).collect();
        let mut full = self.boundary.clone();
        for (g, v) in full.iter_mut().enumerate() {
            if let Some(f) = self.dofs.free_index(g) {
                *v = x[ne_total + f];
            }
        }
        let hybrid = (0..mesh.num_edges())
            .map(|e| self.dofs.edge_dofs(e).iter().map(|&g| full[g]).collect())
            .collect();
        Ok((element, hybrid))
    }
}
