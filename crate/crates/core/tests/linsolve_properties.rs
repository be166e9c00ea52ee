use proptest::prelude::*;
use rhdg::linsolve::{cg, solve_system, tfqmr, CsrMatrix, DenseMatrix};

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Random sparse matrix with a dominant positive diagonal; symmetric when asked.
fn random_matrix(n: usize, entries: &[(usize, usize, f64)], symmetric: bool) -> CsrMatrix {
    let mut trip = Vec::new();
    let mut row_sum = vec![0.0; n];
    for &(i, j, v) in entries {
        let (i, j) = (i % n, j % n);
        if i == j {
            continue;
        }
        trip.push((i, j, v));
        row_sum[i] += v.abs();
        if symmetric {
            trip.push((j, i, v));
            row_sum[j] += v.abs();
        }
    }
    for (i, s) in row_sum.iter().enumerate() {
        trip.push((i, i, s + 1.0));
    }
    CsrMatrix::from_triplets(n, n, trip)
}

fn entries() -> impl Strategy<Value = Vec<(usize, usize, f64)>> {
    prop::collection::vec((0usize..400, 0usize..400, -2.0f64..2.0), 0..600)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cg_matches_dense(n in 1usize..60, e in entries(), b in prop::collection::vec(-1.0f64..1.0, 60)) {
        let a = random_matrix(n, &e, true);
        let rhs = &b[..n];
        let x = cg(&a, rhs, 1e-12, 10 * n + 10).unwrap().x;
        let y = a.to_dense().lu().unwrap().solve(rhs);
        prop_assert!(norm(&x.iter().zip(&y).map(|(p, q)| p - q).collect::<Vec<_>>()) <= 1e-9 * (1.0 + norm(&y)));
    }

    #[test]
    fn tfqmr_matches_dense(n in 1usize..60, e in entries(), b in prop::collection::vec(-1.0f64..1.0, 60)) {
        let a = random_matrix(n, &e, false);
        let rhs = &b[..n];
        let x = tfqmr(&a, rhs, 1e-12, 20 * n + 20).unwrap().x;
        let y = a.to_dense().lu().unwrap().solve(rhs);
        prop_assert!(norm(&x.iter().zip(&y).map(|(p, q)| p - q).collect::<Vec<_>>()) <= 1e-9 * (1.0 + norm(&y)));
    }

    #[test]
    fn dense_residual_is_backward_stable(n in 1usize..40, vals in prop::collection::vec(-1.0f64..1.0, 1600)) {
        let rows: Vec<Vec<f64>> = (0..n).map(|i| {
            let mut r = vals[i * 40..i * 40 + n].to_vec();
            r[i] += 3.0;
            r
        }).collect();
        let a = DenseMatrix::from_rows(&rows);
        let b: Vec<f64> = (0..n).map(|i| (i as f64).cos()).collect();
        let x = a.lu().unwrap().solve(&b);
        let r: Vec<f64> = a.matvec(&x).iter().zip(&b).map(|(p, q)| p - q).collect();
        let anorm = (0..n).map(|i| a.row(i).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
        prop_assert!(norm(&r) <= 1e-12 * (anorm * norm(&x) + norm(&b)));
    }

    #[test]
    fn csr_matvec_matches_dense(n in 1usize..50, e in entries(), x in prop::collection::vec(-1.0f64..1.0, 50)) {
        let a = random_matrix(n, &e, false);
        let y = a.matvec(&x[..n]);
        let z = a.to_dense().matvec(&x[..n]);
        for (p, q) in y.iter().zip(&z) {
            prop_assert!((p - q).abs() <= 1e-13 * (1.0 + q.abs()));
        }
    }
}

#[test]
fn policy_solution_meets_reported_residual() {
    let n = 5000;
    let e: Vec<(usize, usize, f64)> = (0..n).map(|i| (i, (i * 7 + 3) % n, 0.4)).collect();
    for symmetric in [true, false] {
        let a = random_matrix(n, &e, symmetric);
        let b: Vec<f64> = (0..n).map(|i| ((i * 13) as f64).sin()).collect();
        let (x, stats) = solve_system(&a, &b, symmetric, 1e-12).unwrap();
        let r: Vec<f64> = a.matvec(&x).iter().zip(&b).map(|(p, q)| p - q).collect();
        assert!((norm(&r) / norm(&b) - stats.residual).abs() <= 1e-3 * stats.residual + 1e-16);
        assert!(stats.residual <= 1e-12, "{stats:?}");
    }
}
