//! Acceptance criteria 1-10. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::process::ExitCode;
use std::thread;
use std::time::Instant;

use rhdg::checks::{run_checks, SuiteReport};
use rhdg::hdg::{HybridContinuity, Scheme};
use rhdg::linsolve::SolverKind;
use rhdg::mesh::Mesh;
use rhdg::norms::{error_report_with_degree, ErrorReport};
use rhdg::study::{run_degree_with, study_meshes, summarize, OrderSummary, StudyConfig, StudyRow};
use rhdg::Result;

struct Run {
    rows: Vec<StudyRow>,
    orders: OrderSummary,
    /// Largest relative change of l2, h1, energy under the `2k+10` rule.
    quad_shift: f64,
}

struct Outcome {
    id: usize,
    title: &'static str,
    passed: bool,
    detail: String,
}

fn run(config: &StudyConfig, k: usize, meshes: &[Mesh]) -> Result<Run> {
    let mut upgraded: Vec<ErrorReport> = Vec::new();
    let rows = run_degree_with(config, k, meshes, |_, mesh, sol| {
        upgraded.push(error_report_with_degree(
            sol,
            config.problem.exact.as_ref(),
            mesh,
            2 * k + 10,
        )?);
        Ok(())
    })?;
    let quad_shift = rows
        .iter()
        .zip(&upgraded)
        .flat_map(|(r, u)| [(r.l2, u.l2), (r.h1, u.h1), (r.energy, u.energy)])
        .map(|(a, b)| (a - b).abs() / b)
        .fold(0.0, f64::max);
    Ok(Run {
        orders: summarize(&rows),
        rows,
        quad_shift,
    })
}

fn within(v: Option<f64>, lo: f64, hi: f64) -> bool {
    v.is_some_and(|v| (lo..=hi).contains(&v))
}

fn fmt(v: Option<f64>) -> String {
    v.map_or("n/a".into(), |v| format!("{v:.3}"))
}

fn pythagoras(r: &ErrorReport) -> f64 {
    let sum = r.h1 * r.h1 + r.h2_weighted * r.h2_weighted + r.jump * r.jump;
    (r.energy * r.energy - sum).abs() / sum
}

fn suite_max(report: &SuiteReport, prefix: &str) -> (bool, f64) {
    let picked: Vec<_> = report
        .checks
        .iter()
        .filter(|c| c.name.starts_with(prefix))
        .collect();
    (
        !picked.is_empty() && picked.iter().all(|c| c.passed),
        picked.iter().map(|c| c.value).fold(0.0, f64::max),
    )
}

fn order_windows(runs: &[Result<Run>]) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, r) in runs.iter().enumerate() {
        let k = (i + 1) as f64;
        match r {
            Ok(r) => {
                let o = r.orders;
                ok &= within(o.l2, k + 0.8, k + 1.3)
                    && within(o.h1, k - 0.2, k + 0.3)
                    && within(o.energy, k - 0.2, k + 0.3);
                parts.push(format!(
                    "k={k}: L2 {} H1 {} energy {}",
                    fmt(o.l2),
                    fmt(o.h1),
                    fmt(o.energy)
                ));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("k={k}: {e}"));
            }
        }
    }
    (ok, parts.join("; "))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let base = StudyConfig::default();
    let meshes = match study_meshes(base.base_n, base.perturb, base.seed, base.levels) {
        Ok(m) => m,
        Err(e) => {
            println!("[FAIL] mesh generation: {e}");
            return ExitCode::FAILURE;
        }
    };
    let standard = StudyConfig {
        scheme: Scheme::Standard,
        ..base.clone()
    };
    let continuous = StudyConfig {
        hybrid: HybridContinuity::Continuous,
        ..base.clone()
    };
    let negative = StudyConfig {
        s: -1.0,
        tau0: Some(0.1),
        ..base.clone()
    };

    let (reduced, standard, continuous, negative, suites) = thread::scope(|scope| {
        let spawn_runs = |cfg: &StudyConfig, ks: &[usize]| {
            ks.iter()
                .map(|&k| {
                    let cfg = cfg.clone();
                    let meshes = &meshes;
                    scope.spawn(move || run(&cfg, k, meshes))
                })
                .collect::<Vec<_>>()
        };
        let r = spawn_runs(&base, &[1, 2, 3]);
        let s = spawn_runs(&standard, &[1, 2, 3]);
        let c = spawn_runs(&continuous, &[2, 3]);
        let n = spawn_runs(&negative, &[1]);
        let suites: Vec<_> = [
            "quadrature-identity",
            "cr-equivalence",
            "patch-exactness",
            "symmetry",
            "coercivity-s-neg",
        ]
        .into_iter()
        .map(|name| scope.spawn(move || run_checks(name)))
        .collect();
        let join = |hs: Vec<thread::ScopedJoinHandle<'_, Result<Run>>>| -> Vec<Result<Run>> {
            hs.into_iter()
                .map(|h| h.join().expect("study thread panicked"))
                .collect()
        };
        let suites: Vec<Result<SuiteReport>> = suites
            .into_iter()
            .map(|h| h.join().expect("check thread panicked"))
            .collect();
        (join(r), join(s), join(c), join(n), suites)
    });

    let mut out = Vec::new();

    let (passed, detail) = order_windows(&reduced);
    out.push(Outcome {
        id: 1,
        title: "reduced-scheme orders",
        passed,
        detail,
    });

    let (mut passed, mut detail) = order_windows(&standard);
    let mut worst_ratio: f64 = 0.0;
    for (r, s) in reduced.iter().zip(&standard) {
        match (r, s) {
            (Ok(r), Ok(s)) => {
                for (a, b) in r.rows.iter().zip(&s.rows) {
                    worst_ratio = worst_ratio.max((a.l2 / b.l2).max(b.l2 / a.l2));
                }
            }
            _ => passed = false,
        }
    }
    passed &= worst_ratio <= 3.0;
    detail.push_str(&format!("; max L2 ratio reduced/standard {worst_ratio:.3}"));
    out.push(Outcome {
        id: 2,
        title: "standard-scheme parity",
        passed,
        detail,
    });

    let (passed, detail) = match (&continuous[0], &continuous[1]) {
        (Ok(p2), Ok(p3)) => (
            within(p2.orders.l2, 1.8, 2.3)
                && within(p2.orders.h1, 0.8, 1.3)
                && within(p3.orders.l2, 2.8, 3.3),
            format!(
                "P2P1: L2 {} H1 {}; P3P2: L2 {} H1 {}",
                fmt(p2.orders.l2),
                fmt(p2.orders.h1),
                fmt(p3.orders.l2),
                fmt(p3.orders.h1)
            ),
        ),
        (a, b) => (
            false,
            format!("{:?} {:?}", a.as_ref().err(), b.as_ref().err()),
        ),
    };
    out.push(Outcome {
        id: 3,
        title: "continuous-hybrid sub-optimality",
        passed,
        detail,
    });

    let (passed, detail) = match &negative[0] {
        Ok(n) => {
            let solvers: Vec<String> = n
                .rows
                .iter()
                .map(|r| format!("{:?}/{}", r.solver.kind, r.solver.iterations))
                .collect();
            (
                within(n.orders.h1, 0.8, 1.3),
                format!(
                    "s=-1, tau0=0.1, k=1: H1 {} (L2 recorded {}); solver {}",
                    fmt(n.orders.h1),
                    fmt(n.orders.l2),
                    solvers.join(", ")
                ),
            )
        }
        Err(e) => (false, format!("solve failed: {e}")),
    };
    out.push(Outcome {
        id: 4,
        title: "nonsymmetric variant",
        passed,
        detail,
    });

    let suite = |i: usize| suites[i].as_ref();
    let (passed, detail) = match suite(0) {
        Ok(r) => {
            let (ok, max) = suite_max(r, "k=");
            (
                ok && r.checks.len() == 5,
                format!("k=1..5, 1000 pairs each: max deviation {max:.2e}"),
            )
        }
        Err(e) => (false, e.to_string()),
    };
    out.push(Outcome {
        id: 5,
        title: "Gauss-Legendre identity",
        passed,
        detail,
    });

    let (passed, detail) = match suite(1) {
        Ok(r) => {
            let (ok, max) = suite_max(r, "");
            (
                ok && r.checks.len() == 18,
                format!("f in {{1, sinsin}}, levels 1-3, tau0 in {{1,10,100}}: max {max:.2e}"),
            )
        }
        Err(e) => (false, e.to_string()),
    };
    out.push(Outcome {
        id: 6,
        title: "Crouzeix-Raviart equivalence",
        passed,
        detail,
    });

    let (passed, detail) = {
        let rows: Vec<&StudyRow> = reduced
            .iter()
            .filter_map(|r| r.as_ref().ok())
            .flat_map(|r| &r.rows)
            .collect();
        let max = rows.iter().map(|r| r.conservation).fold(0.0, f64::max);
        (
            rows.len() == 12 && max <= 1e-10,
            format!(
                "{} solves, every element: max residual {max:.2e}",
                rows.len()
            ),
        )
    };
    out.push(Outcome {
        id: 7,
        title: "local conservation",
        passed,
        detail,
    });

    let (passed, detail) = match suite(2) {
        Ok(r) => {
            let (ok, max) = suite_max(r, "");
            (
                ok,
                format!(
                    "x+y (k>=1), x^2+y^2 (k>=2), both schemes: max coefficient error {max:.2e}"
                ),
            )
        }
        Err(e) => (false, e.to_string()),
    };
    out.push(Outcome {
        id: 8,
        title: "polynomial exactness",
        passed,
        detail,
    });

    let (passed, detail) = match (suite(3), suite(4)) {
        (Ok(sym), Ok(coer)) => {
            let (a_ok, a) = suite_max(sym, "asymmetry");
            let (c_ok, _) = suite_max(sym, "cg");
            let (i_ok, i) = suite_max(coer, "identity");
            let cg_levels = reduced
                .iter()
                .filter_map(|r| r.as_ref().ok())
                .flat_map(|r| &r.rows)
                .filter(|r| r.solver.kind == SolverKind::Cg)
                .count();
            (
                a_ok && c_ok && i_ok,
                format!("asymmetry {a:.2e}; CG without negative curvature ({cg_levels} study levels by CG); s=-1 identity {i:.2e}"),
            )
        }
        (a, b) => (false, format!("{:?} {:?}", a.err(), b.err())),
    };
    out.push(Outcome {
        id: 9,
        title: "symmetry and coercivity",
        passed,
        detail,
    });

    let (passed, detail) = {
        let all: Vec<&Run> = reduced
            .iter()
            .chain(&standard)
            .chain(&continuous)
            .chain(&negative)
            .filter_map(|r| r.as_ref().ok())
            .collect();
        let pyth = all
            .iter()
            .flat_map(|r| &r.rows)
            .map(|r| pythagoras(&r.report))
            .fold(0.0, f64::max);
        let shift = all.iter().map(|r| r.quad_shift).fold(0.0, f64::max);
        (
            all.len() == 9 && pyth <= 1e-12 && shift < 1e-3,
            format!(
                "{} levels: Pythagoras {pyth:.2e}; quadrature shift {:.2e}%",
                all.len() * 4,
                shift * 100.0
            ),
        )
    };
    out.push(Outcome {
        id: 10,
        title: "energy Pythagoras and quadrature stability",
        passed,
        detail,
    });

    let mut failed = 0;
    for o in &out {
        println!(
            "[{}] {:>2} {}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.id,
            o.title,
            o.detail
        );
        failed += usize::from(!o.passed);
    }
    println!(
        "{} of {} criteria passed in {:.1} s",
        out.len() - failed,
        out.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
