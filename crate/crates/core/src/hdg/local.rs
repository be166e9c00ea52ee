use super::{Scheme, SchemeConfig, StabilizationRoute};
use crate::basis::{
    gauss_legendre, orthonormal_legendre, tri_quadrature, AffineMap, EdgeRule, EdgeSpace, TriBasis,
};
use crate::linsolve::DenseMatrix;
use crate::mesh::{Mesh, Point};
use crate::{Error, Result};

/// Element blocks of the bilinear form on one triangle.
///
/// Rows are test functions, columns trial functions. Edge unknowns are laid out
/// side by side in local side order, `edges[i]` being the global index of side
/// `i`.
#[derive(Debug, Clone)]
pub struct LocalSystem {
    pub element: usize,
    pub edges: [usize; 3],
    /// Element trial, element test.
    pub a: DenseMatrix,
    /// Edge trial, element test.
    pub b: DenseMatrix,
    /// Element trial, edge test.
    pub bt: DenseMatrix,
    /// Edge trial, edge test.
    pub d: DenseMatrix,
    /// `(f, φ_i)_K`.
    pub f: Vec<f64>,
}

impl LocalSystem {
    /// The full local matrix `[[A, B], [Bt, D]]`.
    pub fn matrix(&self) -> DenseMatrix {
        let (nk, nh) = (self.a.rows(), self.d.rows());
        let mut m = DenseMatrix::zeros(nk + nh, nk + nh);
        for i in 0..nk {
            for j in 0..nk {
                m[(i, j)] = self.a[(i, j)];
            }
            for j in 0..nh {
                m[(i, nk + j)] = self.b[(i, j)];
                m[(nk + j, i)] = self.bt[(j, i)];
            }
        }
        for i in 0..nh {
            for j in 0..nh {
                m[(nk + i, nk + j)] = self.d[(i, j)];
            }
        }
        m
    }
}

/// Result of eliminating the element unknowns of one [`LocalSystem`].
#[derive(Debug, Clone)]
pub struct Condensed {
    /// `D - Bt A⁻¹ B`
    pub schur: DenseMatrix,
    /// `-Bt A⁻¹ F`
    pub load: Vec<f64>,
    /// `A⁻¹ B`, for recovery.
    pub a_inv_b: DenseMatrix,
    /// `A⁻¹ F`, for recovery.
    pub a_inv_f: Vec<f64>,
}

impl Condensed {
    /// Element coefficients `u = A⁻¹F - A⁻¹B û` for local hybrid values `uhat`.
    pub fn recover(&self, uhat: &[f64]) -> Vec<f64> {
        let corr = self.a_inv_b.matvec(uhat);
        self.a_inv_f.iter().zip(corr).map(|(a, c)| a - c).collect()
    }
}

pub fn condense(local: &LocalSystem) -> Result<Condensed> {
    let lu = local.a.lu().map_err(|err| match err {
        Error::Singular { pivot, .. } => Error::SingularElement {
            element: local.element,
            pivot,
        },
        other => other,
    })?;
    let a_inv_b = lu.solve_matrix(&local.b);
    let a_inv_f = lu.solve(&local.f);
    let schur = local.d.sub(&local.bt.matmul(&a_inv_b));
    let load = local.bt.matvec(&a_inv_f).into_iter().map(|v| -v).collect();
    Ok(Condensed {
        schur,
        load,
        a_inv_b,
        a_inv_f,
    })
}

/// Reference-element data shared by every element of one configuration.
#[derive(Clone)]
pub struct LocalAssembler {
    config: SchemeConfig,
    basis: TriBasis,
    edge_space: EdgeSpace,
    /// `(weight, reference gradients)` at the stiffness quadrature points.
    stiffness: Vec<(f64, Vec<[f64; 2]>)>,
    /// `(reference point, weight, basis values)` at the load quadrature points.
    load: Vec<([f64; 2], f64, Vec<f64>)>,
    /// Exact for all edge products up to degree `2k + 1`.
    edge_rule: EdgeRule,
    /// `k`-point rule, seeing only the `P^{k-1}` part of degree-`k` traces.
    reduced_rule: EdgeRule,
}

/// One weighted sample `(W, φ-samples, ψ-samples)` of the stabilization form.
type StabSample = (f64, Vec<f64>, Vec<f64>);

impl LocalAssembler {
    pub fn new(config: &SchemeConfig) -> Result<Self> {
        config.validate()?;
        let k = config.k;
        let basis = TriBasis::new(k);
        let stiff_rule = tri_quadrature(2 * k)?;
        let stiffness = stiff_rule
            .points
            .iter()
            .zip(&stiff_rule.weights)
            .map(|(&p, &w)| (w, basis.gradients(p)))
            .collect();
        let load_rule = tri_quadrature(config.load_degree)?;
        let load = load_rule
            .points
            .iter()
            .zip(&load_rule.weights)
            .map(|(&p, &w)| (p, w, basis.values(p)))
            .collect();
        Ok(Self {
            config: config.clone(),
            basis,
            edge_space: config.edge_space(),
            stiffness,
            load,
            edge_rule: gauss_legendre(k + 1)?,
            reduced_rule: gauss_legendre(k)?,
        })
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.config
    }

    pub fn basis(&self) -> &TriBasis {
        &self.basis
    }

    pub fn edge_space(&self) -> &EdgeSpace {
        &self.edge_space
    }

    pub fn element_dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn edge_dim(&self) -> usize {
        self.edge_space.dim()
    }

    /// Element basis values at edge parameter `t` of `edge`, seen from `map`.
    fn trace(&self, map: &AffineMap, mesh: &Mesh, edge: usize, t: f64) -> (Point, [f64; 2]) {
        let x = mesh.edge_point(edge, t);
        (x, map.inverse(x))
    }

    /// Samples realizing `S(a, b) = Σ W a_r b_r` for the stabilization on one
    /// edge (without the factor `τ`).
    fn stabilization_samples(&self, map: &AffineMap, mesh: &Mesh, edge: usize) -> Vec<StabSample> {
        let jac = 0.5 * mesh.edge_length(edge);
        let pointwise = |rule: &EdgeRule| -> Vec<StabSample> {
            rule.points
                .iter()
                .zip(&rule.weights)
                .map(|(&t, &w)| {
                    let (_, xi) = self.trace(map, mesh, edge, t);
                    (w * jac, self.basis.values(xi), self.edge_space.eval(t))
                })
                .collect()
        };
        match (self.config.scheme, self.config.route) {
            (Scheme::Standard, _) => pointwise(&self.edge_rule),
            (Scheme::Reduced, StabilizationRoute::GaussLegendre) => pointwise(&self.reduced_rule),
            (Scheme::Reduced, StabilizationRoute::ExplicitProjection) => {
                let samples = pointwise(&self.edge_rule);
                let (nk, ne) = (self.basis.dim(), self.edge_space.dim());
                (0..self.config.k)
                    .map(|m| {
                        let mut phi = vec![0.0; nk];
                        let mut psi = vec![0.0; ne];
                        for ((w, pv, sv), &t) in samples.iter().zip(&self.edge_rule.points) {
                            let lm = orthonormal_legendre(m, t) * w / jac;
                            for (c, v) in phi.iter_mut().zip(pv) {
                                *c += lm * v;
                            }
                            for (c, v) in psi.iter_mut().zip(sv) {
                                *c += lm * v;
                            }
                        }
                        (jac, phi, psi)
                    })
                    .collect()
            }
        }
    }

    pub fn assemble(&self, mesh: &Mesh, element: usize) -> Result<LocalSystem> {
        let verts = mesh.vertices(element);
        let map = AffineMap::new(verts);
        if map.det.is_nan() || map.det <= 0.0 {
            return Err(Error::DegenerateTriangle(element));
        }
        let (nk, ne) = (self.basis.dim(), self.edge_space.dim());
        let nh = 3 * ne;
        let s = self.config.s;
        let mut a = DenseMatrix::zeros(nk, nk);
        let mut b = DenseMatrix::zeros(nk, nh);
        let mut bt = DenseMatrix::zeros(nh, nk);
        let mut d = DenseMatrix::zeros(nh, nh);

        for (w, grads) in &self.stiffness {
            let g: Vec<[f64; 2]> = grads.iter().map(|&g| map.grad(g)).collect();
            let wd = w * map.det;
            for i in 0..nk {
                for j in 0..nk {
                    a[(i, j)] += wd * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
                }
            }
        }

        let source = &self.config.source;
        let mut f = vec![0.0; nk];
        for (p, w, vals) in &self.load {
            let fx = source(map.map(*p)) * w * map.det;
            for (fi, v) in f.iter_mut().zip(vals) {
                *fi += fx * v;
            }
        }

        let edges = mesh.triangle_edges(element);
        for (side, &edge) in edges.iter().enumerate() {
            let n = mesh.outward_normal(element, side);
            let he = mesh.edge_length(edge);
            let jac = 0.5 * he;
            let off = side * ne;
            for (&t, &w) in self.edge_rule.points.iter().zip(&self.edge_rule.weights) {
                let (_, xi) = self.trace(&map, mesh, edge, t);
                let phi = self.basis.values(xi);
                let dn: Vec<f64> = self
                    .basis
                    .gradients(xi)
                    .into_iter()
                    .map(|g| {
                        let g = map.grad(g);
                        g[0] * n[0] + g[1] * n[1]
                    })
                    .collect();
                let psi = self.edge_space.eval(t);
                let wj = w * jac;
                for i in 0..nk {
                    for j in 0..nk {
                        a[(i, j)] -= wj * (dn[j] * phi[i] + s * dn[i] * phi[j]);
                    }
                    for m in 0..ne {
                        b[(i, off + m)] += s * wj * dn[i] * psi[m];
                        bt[(off + m, i)] += wj * dn[i] * psi[m];
                    }
                }
            }

            let tau = self.config.tau0 / he;
            for (wr, phi, psi) in self.stabilization_samples(&map, mesh, edge) {
                let c = tau * wr;
                for i in 0..nk {
                    for j in 0..nk {
                        a[(i, j)] += c * phi[i] * phi[j];
                    }
                    for m in 0..ne {
                        b[(i, off + m)] -= c * phi[i] * psi[m];
                        bt[(off + m, i)] -= c * psi[m] * phi[i];
                    }
                }
                for m in 0..ne {
                    for q in 0..ne {
                        d[(off + m, off + q)] += c * psi[m] * psi[q];
                    }
                }
            }
        }

        Ok(LocalSystem {
            element,
            edges,
            a,
            b,
            bt,
            d,
            f,
        })
    }
}

/// Assembles the blocks of one element for `config`.
///
/// Builds the reference tables on every call; loops over many elements should
/// go through a shared [`LocalAssembler`].
pub fn local_assemble(config: &SchemeConfig, mesh: &Mesh, element: usize) -> Result<LocalSystem> {
    if element >= mesh.num_triangles() {
        return Err(Error::OutOfRange {
            what: "element index",
            value: element,
        });
    }
    LocalAssembler::new(config)?.assemble(mesh, element)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hdg::{scalar_fn, Scheme};
    use crate::mesh::{generate_unit_square, Mesh};

    fn reference_triangle() -> Mesh {
        Mesh::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 1, 2]]).unwrap()
    }

    fn matched_constant(local: &LocalSystem, c: f64) -> Vec<f64> {
        // φ_0 = √2 on the reference triangle, scaled by the affine map it stays constant
        let nk = local.a.rows();
        let nh = local.d.rows();
        let mut x = vec![0.0; nk + nh];
        x[0] = c / 2f64.sqrt();
        // constant c on every edge: modal coefficient c·√2 on mode 0
        let ne = nh / 3;
        for side in 0..3 {
            x[nk + side * ne] = c * 2f64.sqrt();
        }
        x
    }

    #[test]
    fn symmetric_for_s_one() {
        for k in 1..=3 {
            for scheme in [Scheme::Reduced, Scheme::Standard] {
                let cfg = SchemeConfig::new(k).with_scheme(scheme);
                let local = local_assemble(&cfg, &reference_triangle(), 0).unwrap();
                let m = local.matrix();
                assert!(
                    m.max_asymmetry() <= 1e-13 * m.max_abs(),
                    "k = {k}, {scheme}"
                );
            }
        }
    }

    #[test]
    fn matched_constants_are_in_the_kernel() {
        let mesh = generate_unit_square(2, 0.1, 3).unwrap();
        for k in 1..=3 {
            for s in [1.0, -1.0, 0.0] {
                let cfg = SchemeConfig::new(k).with_s(s);
                let local = local_assemble(&cfg, &mesh, 5).unwrap();
                let y = local.matrix().matvec(&matched_constant(&local, 1.7));
                assert!(y.iter().all(|v| v.abs() < 1e-11), "k = {k}, s = {s}: {y:?}");
            }
        }
    }

    #[test]
    fn quadrature_and_projection_routes_agree() {
        let mesh = generate_unit_square(3, 0.2, 11).unwrap();
        for k in 1..=3 {
            let gl = SchemeConfig::new(k);
            let ep = SchemeConfig::new(k).with_route(StabilizationRoute::ExplicitProjection);
            for t in [0, 7, 12] {
                let a = local_assemble(&gl, &mesh, t).unwrap().matrix();
                let b = local_assemble(&ep, &mesh, t).unwrap().matrix();
                assert!(
                    a.sub(&b).max_abs() <= 1e-12 * a.max_abs(),
                    "k = {k}, element {t}"
                );
            }
        }
    }

    #[test]
    fn load_integrates_source() {
        let cfg = SchemeConfig::new(2).with_source(|p| p[0] * p[1]);
        let local = local_assemble(&cfg, &reference_triangle(), 0).unwrap();
        // (f, φ_0) = √2 ∫ xy = √2 / 24
        assert!((local.f[0] - 2f64.sqrt() / 24.0).abs() < 1e-14);
    }

    #[test]
    fn condensation_recovers_first_block_row() {
        let mesh = generate_unit_square(2, 0.15, 1).unwrap();
        let cfg = SchemeConfig::new(2)
            .with_s(-1.0)
            .with_source(|p| (p[0] - p[1]).exp());
        let local = local_assemble(&cfg, &mesh, 3).unwrap();
        let c = condense(&local).unwrap();
        let uhat: Vec<f64> = (0..local.d.rows())
            .map(|i| (i as f64 * 0.7).sin())
            .collect();
        let u = c.recover(&uhat);
        let au = local.a.matvec(&u);
        let bu = local.b.matvec(&uhat);
        for i in 0..u.len() {
            assert!((au[i] + bu[i] - local.f[i]).abs() < 1e-12 * (1.0 + local.f[i].abs()));
        }
        // condensed rows equal the second block row after elimination
        let lhs = c.schur.matvec(&uhat);
        let direct: Vec<f64> = local
            .bt
            .matvec(&u)
            .iter()
            .zip(local.d.matvec(&uhat))
            .map(|(a, b)| a + b)
            .collect();
        for i in 0..lhs.len() {
            assert!((lhs[i] - c.load[i] - direct[i]).abs() < 1e-10 * (1.0 + direct[i].abs()));
        }
    }

    #[test]
    fn schur_block_symmetric_for_s_one() {
        let mesh = generate_unit_square(2, 0.15, 1).unwrap();
        let c = condense(&local_assemble(&SchemeConfig::new(3), &mesh, 2).unwrap()).unwrap();
        assert!(c.schur.max_asymmetry() <= 1e-12 * c.schur.max_abs());
    }

    #[test]
    fn tiny_tau_with_zero_stiffness_kernel_still_condenses() {
        let cfg = SchemeConfig {
            source: scalar_fn(|_| 1.0),
            ..SchemeConfig::new(1).with_tau0(1e-3)
        };
        assert!(condense(&local_assemble(&cfg, &reference_triangle(), 0).unwrap()).is_ok());
    }

    #[test]
    fn element_index_is_checked() {
        assert!(matches!(
            local_assemble(&SchemeConfig::new(1), &reference_triangle(), 4),
            Err(Error::OutOfRange { .. })
        ));
    }
}
