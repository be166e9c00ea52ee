//! Named invariant suites with measured values and tolerances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::basis::{
    gauss_legendre, project_edge, reduced_edge_mass, tri_quadrature, AffineMap, EdgeBasis,
    EdgeSpace,
};
use crate::crfem::{compare_edge_means, solve_cr};
use crate::hdg::{
    assemble_skeleton, max_conservation_residual, solve, HybridDofs, LocalAssembler, ScalarFn,
    Scheme, SchemeConfig,
};
use crate::linsolve::{cg, max_iterations, DenseMatrix};
use crate::mesh::Mesh;
use crate::problems::Problem;
use crate::study::study_meshes;
use crate::{Error, Result};

pub const SUITES: [&str; 6] = [
    "quadrature-identity",
    "conservation",
    "cr-equivalence",
    "symmetry",
    "coercivity-s-neg",
    "patch-exactness",
];

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckResult {
    /// Passes when `value <= tolerance`.
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            passed: value <= tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Largest `|G_k[f g] - ∫ P_{k-1} f · P_{k-1} g| / (1 + |∫ P_{k-1} f · P_{k-1} g|)`
/// over random `f, g ∈ P^k`; the reference uses a `(k+2)`-point rule and
/// explicit projection.
pub fn quadrature_identity_deviation(k: usize, pairs: usize, seed: u64) -> Result<f64> {
    let rule = gauss_legendre(k + 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let f = random_vec(&mut rng, k + 1);
        let g = random_vec(&mut rng, k + 1);
        let sample = |c: &[f64]| -> Vec<f64> {
            rule.points
                .iter()
                .map(|&t| EdgeBasis::eval_coeffs(c, t))
                .collect()
        };
        let pf = project_edge(&sample(&f), &rule, k - 1);
        let pg = project_edge(&sample(&g), &rule, k - 1);
        let exact =
            rule.integrate(|t| EdgeBasis::eval_coeffs(&pf, t) * EdgeBasis::eval_coeffs(&pg, t));
        worst = worst.max((reduced_edge_mass(k, &f, &g) - exact).abs() / (1.0 + exact.abs()));
    }
    Ok(worst)
}

/// `B_h(v, v)` from the assembled local blocks against
/// `|v_h|²_{1,h} + Σ_K Σ_{e⊂∂K} τ ‖P_{k-1}(v̂ - v_h)‖²_{0,e}` evaluated by
/// quadrature, for random pairs; returns the largest relative deviation.
///
/// Requires a reduced scheme with discontinuous hybrid space.
pub fn coercivity_identity_deviation(
    config: &SchemeConfig,
    mesh: &Mesh,
    pairs: usize,
    seed: u64,
) -> Result<f64> {
    if config.scheme != Scheme::Reduced || !matches!(config.edge_space(), EdgeSpace::Modal(_)) {
        return Err(Error::InvalidConfig(
            "the identity is stated for the reduced discontinuous scheme".into(),
        ));
    }
    let k = config.k;
    let assembler = LocalAssembler::new(config)?;
    let dofs = HybridDofs::new(config, mesh);
    let basis = assembler.basis();
    let nk = basis.dim();
    let locals = (0..mesh.num_triangles())
        .map(|t| assembler.assemble(mesh, t).map(|l| l.matrix()))
        .collect::<Result<Vec<DenseMatrix>>>()?;
    let vol = tri_quadrature(2 * k)?;
    let edge_rule = gauss_legendre(k + 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let elem: Vec<Vec<f64>> = (0..mesh.num_triangles())
            .map(|_| random_vec(&mut rng, nk))
            .collect();
        let hybrid = random_vec(&mut rng, dofs.num_total());
        let (mut lhs, mut rhs) = (0.0, 0.0);
        for t in 0..mesh.num_triangles() {
            let edges = mesh.triangle_edges(t);
            let x: Vec<f64> = elem[t]
                .iter()
                .copied()
                .chain(dofs.local_dofs(edges).iter().map(|&g| hybrid[g]))
                .collect();
            lhs += x
                .iter()
                .zip(locals[t].matvec(&x))
                .map(|(a, b)| a * b)
                .sum::<f64>();

            let map = AffineMap::new(mesh.vertices(t));
            for (p, w) in vol.points.iter().zip(&vol.weights) {
                let mut g = [0.0; 2];
                for (gr, c) in basis.gradients(*p).into_iter().zip(&elem[t]) {
                    let gp = map.grad(gr);
                    g[0] += c * gp[0];
                    g[1] += c * gp[1];
                }
                rhs += w * map.det * (g[0] * g[0] + g[1] * g[1]);
            }
            for &e in &edges {
                let coeffs: Vec<f64> = dofs.edge_dofs(e).iter().map(|&g| hybrid[g]).collect();
                let diff: Vec<f64> = edge_rule
                    .points
                    .iter()
                    .map(|&s| {
                        let xi = map.inverse(mesh.edge_point(e, s));
                        let v: f64 = basis
                            .values(xi)
                            .iter()
                            .zip(&elem[t])
                            .map(|(a, b)| a * b)
                            .sum();
                        EdgeBasis::eval_coeffs(&coeffs, s) - v
                    })
                    .collect();
                let c = project_edge(&diff, &edge_rule, k - 1);
                let he = mesh.edge_length(e);
                rhs += config.tau0 / he * 0.5 * he * c.iter().map(|v| v * v).sum::<f64>();
            }
        }
        worst = worst.max((lhs - rhs).abs() / rhs.abs());
    }
    Ok(worst)
}

/// `max|S - Sᵀ| / max|S|` of the condensed operator.
pub fn condensed_asymmetry(config: &SchemeConfig, mesh: &Mesh) -> Result<f64> {
    let sys = assemble_skeleton(config, mesh)?;
    let scale = sys.operator.max_abs();
    Ok(if scale > 0.0 {
        sys.operator.max_asymmetry() / scale
    } else {
        0.0
    })
}

/// Largest coefficient deviation of the discrete pair from the exact
/// polynomial solution of `problem`: element coefficients against the
/// element `L²` projection, hybrid coefficients against the edge projection.
pub fn polynomial_deviation(config: &SchemeConfig, mesh: &Mesh, problem: &Problem) -> Result<f64> {
    let config = problem.apply(config.clone());
    let sol = solve(&config, mesh)?;
    let basis = &sol.basis;
    let nk = basis.dim();
    let rule = tri_quadrature(2 * config.k + 2)?;
    let mut gram = DenseMatrix::zeros(nk, nk);
    let tables: Vec<(f64, [f64; 2], Vec<f64>)> = rule
        .points
        .iter()
        .zip(&rule.weights)
        .map(|(&p, &w)| (w, p, basis.values(p)))
        .collect();
    for (w, _, v) in &tables {
        for i in 0..nk {
            for j in 0..nk {
                gram[(i, j)] += w * v[i] * v[j];
            }
        }
    }
    let lu = gram.lu()?;
    let mut worst: f64 = 0.0;
    for t in 0..mesh.num_triangles() {
        let map = AffineMap::new(mesh.vertices(t));
        let mut r = vec![0.0; nk];
        for (w, p, v) in &tables {
            let u = problem.exact.value(map.map(*p));
            for (ri, vi) in r.iter_mut().zip(v) {
                *ri += w * u * vi;
            }
        }
        for (a, b) in lu.solve(&r).iter().zip(&sol.element[t]) {
            worst = worst.max((a - b).abs());
        }
    }
    if let EdgeSpace::Modal(b) = &sol.edge_space {
        let edge_rule = gauss_legendre(config.k + 2)?;
        for e in 0..mesh.num_edges() {
            let samples: Vec<f64> = edge_rule
                .points
                .iter()
                .map(|&s| problem.exact.value(mesh.edge_point(e, s)))
                .collect();
            for (a, c) in project_edge(&samples, &edge_rule, b.dim() - 1)
                .iter()
                .zip(&sol.hybrid[e])
            {
                worst = worst.max((a - c).abs());
            }
        }
    }
    Ok(worst)
}

/// Edge-mean discrepancy between the lowest-order reduced scheme (`s = 1`)
/// and the Crouzeix–Raviart solution for load `f` and zero boundary data.
pub fn cr_discrepancy(mesh: &Mesh, f: &ScalarFn, tau0: f64) -> Result<f64> {
    let config = SchemeConfig {
        source: f.clone(),
        ..SchemeConfig::new(1).with_tau0(tau0)
    };
    let hdg = solve(&config, mesh)?;
    let cr = solve_cr(mesh, f.as_ref())?;
    compare_edge_means(&hdg, &cr, mesh)
}

fn default_meshes(levels: usize) -> Result<Vec<Mesh>> {
    study_meshes(14, 0.15, 42, levels)
}

pub fn run_checks(suite: &str) -> Result<SuiteReport> {
    let checks = match suite {
        "quadrature-identity" => (1..=5)
            .map(|k| {
                Ok(CheckResult::at_most(
                    format!("k={k}"),
                    quadrature_identity_deviation(k, 1000, k as u64)?,
                    1e-12,
                ))
            })
            .collect::<Result<Vec<_>>>()?,
        "conservation" => {
            let mesh = default_meshes(3)?.pop().expect("three levels");
            let problem = Problem::sinsin();
            (1..=3)
                .map(|k| {
                    let sol = solve(&problem.apply(SchemeConfig::new(k)), &mesh)?;
                    Ok(CheckResult::at_most(
                        format!("k={k}, level 3"),
                        max_conservation_residual(&sol, &mesh)?,
                        1e-10,
                    ))
                })
                .collect::<Result<Vec<_>>>()?
        }
        "cr-equivalence" => {
            let meshes = default_meshes(3)?;
            let loads: [(&str, ScalarFn); 2] = [
                ("f=1", std::sync::Arc::new(|_| 1.0)),
                ("sinsin", Problem::sinsin().source),
            ];
            let mut out = Vec::new();
            for (name, f) in &loads {
                for (l, mesh) in meshes.iter().enumerate() {
                    for tau0 in [1.0, 10.0, 100.0] {
                        let d = cr_discrepancy(mesh, f, tau0)?;
                        out.push(CheckResult::at_most(
                            format!("{name}, level {}, tau0={tau0}", l + 1),
                            d,
                            1e-9,
                        ));
                    }
                }
            }
            out
        }
        "symmetry" => {
            let mesh = default_meshes(2)?.pop().expect("two levels");
            let problem = Problem::sinsin();
            let mut out = Vec::new();
            for k in 1..=3 {
                let config = problem.apply(SchemeConfig::new(k));
                out.push(CheckResult::at_most(
                    format!("asymmetry k={k}"),
                    condensed_asymmetry(&config, &mesh)?,
                    1e-12,
                ));
                let sys = assemble_skeleton(&config, &mesh)?;
                let budget = max_iterations(sys.dim());
                let iterations = match cg(&sys.operator, &sys.rhs, 1e-12, budget) {
                    Ok(s) => s.iterations as f64,
                    Err(_) => f64::INFINITY,
                };
                out.push(CheckResult::at_most(
                    format!("cg iterations k={k}"),
                    iterations,
                    budget as f64,
                ));
            }
            out
        }
        "coercivity-s-neg" => {
            let mesh = default_meshes(1)?.pop().expect("one level");
            let mut out = Vec::new();
            for k in 1..=3 {
                let config = SchemeConfig::new(k).with_s(-1.0).with_tau0(0.1);
                let d = coercivity_identity_deviation(&config, &mesh, 100, 7 + k as u64)?;
                out.push(CheckResult::at_most(format!("identity k={k}"), d, 1e-11));
            }
            let config = Problem::sinsin().apply(SchemeConfig::new(1).with_s(-1.0).with_tau0(0.1));
            let residual = solve(&config, &mesh).map_or(f64::INFINITY, |s| s.stats.backward_error);
            out.push(CheckResult::at_most(
                "solve k=1, tau0=0.1 (backward error)",
                residual,
                1e-12,
            ));
            out
        }
        "patch-exactness" => {
            let mesh = default_meshes(1)?.pop().expect("one level");
            let mut out = Vec::new();
            for scheme in [Scheme::Reduced, Scheme::Standard] {
                for k in 1..=3 {
                    let config = SchemeConfig::new(k).with_scheme(scheme);
                    let d = polynomial_deviation(&config, &mesh, &Problem::linear())?;
                    out.push(CheckResult::at_most(format!("x+y {scheme} k={k}"), d, 1e-9));
                    if k >= 2 {
                        let d = polynomial_deviation(&config, &mesh, &Problem::quadratic())?;
                        out.push(CheckResult::at_most(
                            format!("x^2+y^2 {scheme} k={k}"),
                            d,
                            1e-9,
                        ));
                    }
                }
            }
            out
        }
        other => return Err(Error::UnknownSuite(other.to_string())),
    };
    Ok(SuiteReport {
        suite: suite.to_string(),
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}
