//! Convergence studies over a sequence of uniformly refined meshes.

use std::fmt::Write as _;

use serde::Serialize;

use crate::hdg::{
    default_tau0, max_conservation_residual, solve, HdgSolution, HybridContinuity, Scheme,
    SchemeConfig,
};
use crate::linsolve::SolveStats;
use crate::mesh::{generate_unit_square, refine_uniform, Mesh};
use crate::norms::{error_report, fit_orders, least_squares_order, ErrorReport};
use crate::problems::Problem;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub ks: Vec<usize>,
    pub scheme: Scheme,
    pub hybrid: HybridContinuity,
    pub s: f64,
    /// `None` selects `10 k²` for each `k`.
    pub tau0: Option<f64>,
    pub levels: usize,
    pub base_n: usize,
    pub perturb: f64,
    pub seed: u64,
    pub problem: Problem,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            ks: vec![1, 2, 3],
            scheme: Scheme::Reduced,
            hybrid: HybridContinuity::Discontinuous,
            s: 1.0,
            tau0: None,
            levels: 4,
            base_n: 14,
            perturb: 0.15,
            seed: 42,
            problem: Problem::sinsin(),
        }
    }
}

impl StudyConfig {
    pub fn scheme_config(&self, k: usize) -> SchemeConfig {
        let cfg = SchemeConfig::new(k)
            .with_scheme(self.scheme)
            .with_hybrid(self.hybrid)
            .with_s(self.s)
            .with_tau0(self.tau0.unwrap_or_else(|| default_tau0(k)));
        self.problem.apply(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ks.is_empty() {
            return Err(Error::InvalidConfig("no element degree requested".into()));
        }
        if self.levels < 2 {
            return Err(Error::InvalidConfig(
                "a study needs at least 2 levels".into(),
            ));
        }
        if self.base_n == 0 {
            return Err(Error::InvalidConfig("base mesh needs n >= 1".into()));
        }
        for &k in &self.ks {
            self.scheme_config(k).validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StudyRow {
    pub k: usize,
    pub scheme: &'static str,
    pub level: usize,
    pub h: f64,
    pub dofs_skeleton: usize,
    pub l2: f64,
    pub l2_order: Option<f64>,
    pub h1: f64,
    pub h1_order: Option<f64>,
    pub energy: f64,
    pub energy_order: Option<f64>,
    pub report: ErrorReport,
    pub solver: SolveStats,
    /// Largest local conservation residual over all elements.
    pub conservation: f64,
}

/// Base mesh and its uniform refinements, `levels` meshes in total.
pub fn study_meshes(base_n: usize, perturb: f64, seed: u64, levels: usize) -> Result<Vec<Mesh>> {
    let mut meshes = vec![generate_unit_square(base_n, perturb, seed)?];
    while meshes.len() < levels {
        let next = refine_uniform(meshes.last().expect("non-empty"));
        meshes.push(next);
    }
    Ok(meshes)
}

pub fn run_study(config: &StudyConfig) -> Result<Vec<StudyRow>> {
    config.validate()?;
    let meshes = study_meshes(config.base_n, config.perturb, config.seed, config.levels)?;
    let mut rows = Vec::new();
    for &k in &config.ks {
        rows.extend(run_degree(config, k, &meshes)?);
    }
    Ok(rows)
}

/// Rows of a single degree on the given meshes.
pub fn run_degree(config: &StudyConfig, k: usize, meshes: &[Mesh]) -> Result<Vec<StudyRow>> {
    run_degree_with(config, k, meshes, |_, _, _| Ok(()))
}

/// [`run_degree`], handing every level's solution to `inspect`.
pub fn run_degree_with<F>(
    config: &StudyConfig,
    k: usize,
    meshes: &[Mesh],
    mut inspect: F,
) -> Result<Vec<StudyRow>>
where
    F: FnMut(usize, &Mesh, &HdgSolution) -> Result<()>,
{
    let scheme_config = config.scheme_config(k);
    let mut rows: Vec<StudyRow> = Vec::with_capacity(meshes.len());
    for (i, mesh) in meshes.iter().enumerate() {
        let level = i + 1;
        let wrap = |e: Error| Error::Level {
            level,
            source: Box::new(e),
        };
        let sol = solve(&scheme_config, mesh).map_err(wrap)?;
        let report = error_report(&sol, config.problem.exact.as_ref(), mesh).map_err(wrap)?;
        let conservation = max_conservation_residual(&sol, mesh).map_err(wrap)?;
        inspect(level, mesh, &sol).map_err(wrap)?;
        rows.push(StudyRow {
            k,
            scheme: config.scheme.name(),
            level,
            h: report.h,
            dofs_skeleton: sol.skeleton_dofs,
            l2: report.l2,
            l2_order: None,
            h1: report.h1,
            h1_order: None,
            energy: report.energy,
            energy_order: None,
            report,
            solver: sol.stats,
            conservation,
        });
    }
    let orders =
        |f: fn(&StudyRow) -> f64| fit_orders(&rows.iter().map(|r| (r.h, f(r))).collect::<Vec<_>>());
    let (l2, h1, en) = (orders(|r| r.l2), orders(|r| r.h1), orders(|r| r.energy));
    for (i, row) in rows.iter_mut().enumerate().skip(1) {
        row.l2_order = l2[i - 1];
        row.h1_order = h1[i - 1];
        row.energy_order = en[i - 1];
    }
    Ok(rows)
}

/// Least-squares orders of one degree's rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderSummary {
    pub l2: Option<f64>,
    pub h1: Option<f64>,
    pub energy: Option<f64>,
}

pub fn summarize(rows: &[StudyRow]) -> OrderSummary {
    let fit = |f: fn(&StudyRow) -> f64| {
        least_squares_order(&rows.iter().map(|r| (r.h, f(r))).collect::<Vec<_>>())
    };
    OrderSummary {
        l2: fit(|r| r.l2),
        h1: fit(|r| r.h1),
        energy: fit(|r| r.energy),
    }
}

pub const CSV_HEADER: &str =
    "k,scheme,level,h,dofs_skeleton,l2,l2_order,h1,h1_order,energy,energy_order";

fn order_cell(o: Option<f64>, missing: &str) -> String {
    o.map_or_else(|| missing.to_string(), |v| format!("{v:.2}"))
}

pub fn to_csv(rows: &[StudyRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{:.6e},{},{:.6e},{},{:.6e},{},{:.6e},{}",
            r.k,
            r.scheme,
            r.level,
            r.h,
            r.dofs_skeleton,
            r.l2,
            order_cell(r.l2_order, ""),
            r.h1,
            order_cell(r.h1_order, ""),
            r.energy,
            order_cell(r.energy_order, ""),
        )
        .expect("writing to a String");
    }
    out
}

/// One table per degree, laid out like a convergence-history table.
pub fn to_markdown(rows: &[StudyRow], hybrid: HybridContinuity) -> String {
    let mut out = String::new();
    let mut ks: Vec<usize> = rows.iter().map(|r| r.k).collect();
    ks.dedup();
    for k in ks {
        let block: Vec<&StudyRow> = rows.iter().filter(|r| r.k == k).collect();
        let Some(first) = block.first() else { continue };
        let l = if first.scheme == "reduced" { k - 1 } else { k };
        let cont = match hybrid {
            HybridContinuity::Discontinuous => "discontinuous",
            HybridContinuity::Continuous => "continuous",
        };
        writeln!(out, "### P{k}P{l} ({}, {cont})\n", first.scheme).unwrap();
        out.push_str(
            "| l | h | DOFs | L2 error | order | H1 error | order | energy error | order |\n",
        );
        out.push_str("|---|---|---|---|---|---|---|---|---|\n");
        for r in block {
            writeln!(
                out,
                "| {} | {:.4e} | {} | {:.4E} | {} | {:.4E} | {} | {:.4E} | {} |",
                r.level,
                r.h,
                r.dofs_skeleton,
                r.l2,
                order_cell(r.l2_order, "--"),
                r.h1,
                order_cell(r.h1_order, "--"),
                r.energy,
                order_cell(r.energy_order, "--"),
            )
            .unwrap();
        }
        out.push('\n');
    }
    out
}
