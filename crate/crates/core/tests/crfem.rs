use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;
use rhdg::basis::{tri_quadrature, AffineMap};
use rhdg::checks::cr_discrepancy;
use rhdg::crfem::{compare_edge_means, cr_interpolate, solve_cr};
use rhdg::hdg::{solve, ScalarFn, SchemeConfig};
use rhdg::linsolve::DenseMatrix;
use rhdg::mesh::{generate_unit_square, refine_uniform, Mesh};
use rhdg::norms::fit_orders;
use rhdg::problems::Problem;

fn sinsin_load() -> ScalarFn {
    Problem::sinsin().source
}

/// Affine function on triangle `t` with value 1 at the midpoint of `edge` and 0
/// at the other two midpoints, from a 3x3 solve.
fn hat(mesh: &Mesh, t: usize, edge: usize) -> [f64; 3] {
    let rows: Vec<Vec<f64>> = mesh
        .triangle_edges(t)
        .iter()
        .map(|&e| {
            let m = mesh.edge_point(e, 0.0);
            vec![1.0, m[0], m[1]]
        })
        .collect();
    let rhs: Vec<f64> = mesh
        .triangle_edges(t)
        .iter()
        .map(|&e| f64::from(u8::from(e == edge)))
        .collect();
    let c = DenseMatrix::from_rows(&rows).lu().unwrap().solve(&rhs);
    [c[0], c[1], c[2]]
}

#[test]
fn single_interior_dof_galerkin() {
    let mesh = generate_unit_square(1, 0.0, 0).unwrap();
    let interior = (0..mesh.num_edges())
        .find(|&e| !mesh.edges()[e].boundary)
        .unwrap();
    let (mut stiff, mut load) = (0.0, 0.0);
    for t in 0..2 {
        let c = hat(&mesh, t, interior);
        stiff += mesh.area(t) * (c[1] * c[1] + c[2] * c[2]);
        // an affine function integrates to area times its centroid value
        load += mesh.area(t) / 3.0;
    }
    let cr = solve_cr(&mesh, &|_| 1.0).unwrap();
    assert!((cr.values[interior] - load / stiff).abs() < 1e-14);
    assert_eq!(cr.values.iter().filter(|v| **v != 0.0).count(), 1);
}

#[test]
fn cr_converges_at_second_order() {
    let f = sinsin_load();
    let rule = tri_quadrature(8).unwrap();
    let mut mesh = generate_unit_square(6, 0.15, 42).unwrap();
    let mut data = Vec::new();
    for _ in 0..3 {
        let cr = solve_cr(&mesh, f.as_ref()).unwrap();
        let coeffs = cr_interpolate(&mesh, &cr.values).unwrap();
        let mut err = 0.0;
        for (t, c) in coeffs.iter().enumerate() {
            let map = AffineMap::new(mesh.vertices(t));
            err += map.det
                * rule.integrate(|p| {
                    let x = map.map(p);
                    ((PI * x[0]).sin() * (PI * x[1]).sin() - c[0] - c[1] * x[0] - c[2] * x[1])
                        .powi(2)
                });
        }
        data.push((mesh.h(), err.sqrt()));
        mesh = refine_uniform(&mesh);
    }
    for o in fit_orders(&data) {
        assert!((o.unwrap() - 2.0).abs() < 0.2, "{data:?}");
    }
}

#[test]
fn equivalence_on_study_levels() {
    let mut mesh = generate_unit_square(14, 0.15, 42).unwrap();
    let loads: [ScalarFn; 2] = [Arc::new(|_| 1.0), sinsin_load()];
    for _ in 0..2 {
        for f in &loads {
            for tau0 in [1.0, 10.0, 100.0] {
                assert!(cr_discrepancy(&mesh, f, tau0).unwrap() <= 1e-9);
            }
        }
        mesh = refine_uniform(&mesh);
    }
}

#[test]
fn zero_load_matches_trivially() {
    let mesh = generate_unit_square(3, 0.1, 1).unwrap();
    let hdg = solve(&SchemeConfig::new(1), &mesh).unwrap();
    let cr = solve_cr(&mesh, &|_| 0.0).unwrap();
    assert_eq!(compare_edge_means(&hdg, &cr, &mesh).unwrap(), 0.0);
}

#[test]
fn mismatched_meshes_are_rejected() {
    let a = generate_unit_square(2, 0.0, 0).unwrap();
    let b = generate_unit_square(3, 0.0, 0).unwrap();
    let hdg = solve(&SchemeConfig::new(1), &a).unwrap();
    let cr = solve_cr(&b, &|_| 1.0).unwrap();
    assert!(compare_edge_means(&hdg, &cr, &a).is_err());
    assert!(compare_edge_means(&hdg, &cr, &b).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn equivalence_for_any_penalty(n in 2usize..6, perturb in 0.0f64..0.25, seed in any::<u64>(), tau0 in 0.5f64..200.0) {
        let mesh = generate_unit_square(n, perturb, seed).unwrap();
        let f: ScalarFn = Arc::new(|p| (3.0 * p[0]).cos() + p[1] * p[1]);
        prop_assert!(cr_discrepancy(&mesh, &f, tau0).unwrap() <= 1e-9);
    }

    #[test]
    fn interpolation_roundtrip(seed in any::<u64>(), means in prop::collection::vec(-5.0f64..5.0, 56)) {
        let mesh = generate_unit_square(4, 0.2, seed).unwrap();
        prop_assert_eq!(mesh.num_edges(), 56);
        let coeffs = cr_interpolate(&mesh, &means).unwrap();
        for (t, c) in coeffs.iter().enumerate() {
            for &e in &mesh.triangle_edges(t) {
                let m = mesh.edge_point(e, 0.0);
                prop_assert!((c[0] + c[1] * m[0] + c[2] * m[1] - means[e]).abs() < 1e-13);
            }
        }
    }
}
