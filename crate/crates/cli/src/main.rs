use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rhdg::checks::{run_checks, SUITES};
use rhdg::hdg::{HybridContinuity, Scheme};
use rhdg::mesh::{generate_unit_square, quality_report, read_mesh, refine_uniform, write_mesh};
use rhdg::problems::Problem;
use rhdg::study::{run_study, summarize, to_csv, to_markdown, StudyConfig};

/// Reduced-stabilization HDG for the Poisson problem on the unit square.
#[derive(Parser)]
#[command(name = "rhdg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convergence study over uniformly refined meshes.
    Study(StudyArgs),
    /// Run a named invariant suite; exits nonzero if any check fails.
    Check {
        /// Suite name, or `all`.
        #[arg(long)]
        suite: String,
    },
    /// Mesh utilities on the text mesh format.
    #[command(subcommand)]
    Mesh(MeshCommand),
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Reduced,
    Standard,
}

#[derive(Clone, Copy, ValueEnum)]
enum HybridArg {
    Disc,
    Cont,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Md,
}

#[derive(Args)]
struct StudyArgs {
    /// Element degrees, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    k: Vec<usize>,
    #[arg(long, value_enum, default_value = "reduced")]
    scheme: SchemeArg,
    #[arg(long, value_enum, default_value = "disc")]
    hybrid: HybridArg,
    /// Adjoint parameter.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    s: f64,
    /// Penalty scale, `τ = tau0 / h_e`; defaults to `10 k²`.
    #[arg(long)]
    tau0: Option<f64>,
    #[arg(long, default_value_t = 4)]
    levels: usize,
    #[arg(long, default_value_t = 14)]
    base_n: usize,
    #[arg(long, default_value_t = 0.15)]
    perturb: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// sinsin, poly-patch or linear.
    #[arg(long, default_value = "sinsin")]
    problem: String,
    #[arg(long, value_enum, default_value = "csv")]
    out: Format,
    /// Write the table here instead of stdout.
    #[arg(long)]
    outfile: Option<PathBuf>,
}

#[derive(Subcommand)]
enum MeshCommand {
    /// Perturbed criss-cross mesh of the unit square.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        perturb: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        outfile: Option<PathBuf>,
    },
    /// Uniform red refinement.
    Refine {
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        times: usize,
        #[arg(long)]
        outfile: Option<PathBuf>,
    },
    /// Diameters, inradii and the chunkiness estimate.
    Quality {
        input: PathBuf,
        /// Print the full per-triangle report as JSON.
        #[arg(long)]
        json: bool,
    },
}

fn emit(text: &str, outfile: Option<&PathBuf>) -> Result<()> {
    match outfile {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_mesh(path: &PathBuf) -> Result<rhdg::mesh::Mesh> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    read_mesh(&text).with_context(|| format!("parsing {}", path.display()))
}

fn study(args: StudyArgs) -> Result<()> {
    let hybrid = match args.hybrid {
        HybridArg::Disc => HybridContinuity::Discontinuous,
        HybridArg::Cont => HybridContinuity::Continuous,
    };
    let config = StudyConfig {
        ks: args.k,
        scheme: match args.scheme {
            SchemeArg::Reduced => Scheme::Reduced,
            SchemeArg::Standard => Scheme::Standard,
        },
        hybrid,
        s: args.s,
        tau0: args.tau0,
        levels: args.levels,
        base_n: args.base_n,
        perturb: args.perturb,
        seed: args.seed,
        problem: Problem::by_name(&args.problem)?,
    };
    let rows = run_study(&config)?;
    let text = match args.out {
        Format::Csv => to_csv(&rows),
        Format::Md => to_markdown(&rows, hybrid),
    };
    emit(&text, args.outfile.as_ref())?;
    for &k in &config.ks {
        let block: Vec<_> = rows.iter().filter(|r| r.k == k).cloned().collect();
        let o = summarize(&block);
        let fmt = |v: Option<f64>| v.map_or("--".to_string(), |v| format!("{v:.2}"));
        eprintln!(
            "k={k} least-squares orders: L2 {}, H1 {}, energy {}",
            fmt(o.l2),
            fmt(o.h1),
            fmt(o.energy)
        );
    }
    Ok(())
}

fn check(suite: &str) -> Result<bool> {
    let names: Vec<&str> = if suite == "all" {
        SUITES.to_vec()
    } else {
        vec![suite]
    };
    let reports = names
        .iter()
        .map(|s| run_checks(s))
        .collect::<rhdg::Result<Vec<_>>>()?;
    let passed = reports.iter().all(|r| r.passed);
    let json = if reports.len() == 1 {
        serde_json::to_string_pretty(&reports[0])
    } else {
        serde_json::to_string_pretty(&reports)
    };
    println!("{}", json?);
    Ok(passed)
}

fn mesh(cmd: MeshCommand) -> Result<()> {
    match cmd {
        MeshCommand::Gen {
            n,
            perturb,
            seed,
            outfile,
        } => {
            let mesh = generate_unit_square(n, perturb, seed)?;
            emit(&write_mesh(&mesh), outfile.as_ref())
        }
        MeshCommand::Refine {
            input,
            times,
            outfile,
        } => {
            let mut mesh = load_mesh(&input)?;
            for _ in 0..times {
                mesh = refine_uniform(&mesh);
            }
            emit(&write_mesh(&mesh), outfile.as_ref())
        }
        MeshCommand::Quality { input, json } => {
            let mesh = load_mesh(&input)?;
            let report = quality_report(&mesh)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                let min = report
                    .triangles
                    .iter()
                    .map(|q| q.ratio)
                    .fold(f64::INFINITY, f64::min);
                println!(
                    "nodes {}, triangles {}, edges {}",
                    mesh.num_nodes(),
                    mesh.num_triangles(),
                    mesh.num_edges()
                );
                println!("h {:.6e}", report.h);
                println!("h_K/rho_K min {min:.4}, max (gamma) {:.4}", report.gamma);
            }
            Ok(())
        }
    }
}

fn run() -> Result<bool> {
    match Cli::parse().command {
        Command::Study(args) => study(args).map(|_| true),
        Command::Check { suite } => {
            if suite != "all" && !SUITES.contains(&suite.as_str()) {
                bail!(
                    "unknown suite `{suite}` (expected one of {}, or all)",
                    SUITES.join(", ")
                );
            }
            check(&suite)
        }
        Command::Mesh(cmd) => mesh(cmd).map(|_| true),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
