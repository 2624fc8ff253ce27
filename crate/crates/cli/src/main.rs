//! `fbreg`: solve obstacle problems, run the regularity harness on snapshots,
//! and reproduce the one-dimensional degenerate example.
//!
//! Exit status: 0 on success, 1 on configuration or I/O errors, 2 when a run
//! completes with a negative outcome (no convergence, a failed hard check, or
//! a failed property suite).

mod checks;
mod config;
mod report;

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use num_rational::BigRational;
use rayon::prelude::*;

use fbreg_core::counterexample::{
    fmt_ratio, parse_ratio, quarter_powers, verify_o_r2, IntervalFamily, DEFAULT_DEPTH,
};
use fbreg_core::harness::{halfspace_fit, rescale};
use fbreg_core::props::run_property_suite;
use fbreg_core::snapshot::{fmt17, read_snapshot, write_field_csv, write_json, write_snapshot};
use fbreg_core::{solve_with, ObstacleProblem, SolveError, SolverOptions};

use crate::checks::CheckInputs;
use crate::config::{ExperimentConfig, Overrides};
use crate::report::{summary_table, write_reports, CheckReport};

const NEGATIVE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "fbreg", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the configured problem and write `solution.csv` and `solution.json`.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run the configured checks on a solution snapshot.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Snapshot CSV; its JSON sidecar must sit next to it.
        #[arg(long)]
        solution: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Rescale a snapshot at a point and fit a half-space profile.
    Blowup {
        #[arg(long)]
        solution: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
        #[arg(long)]
        r: f64,
        /// Cells per side of the rescaled grid.
        #[arg(long, default_value_t = 64)]
        resolution: usize,
        /// Also write the rescaled field as CSV.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Exact ratio table `u(r)/r²` and density for an interval family.
    Counterexample {
        /// JSON list `[[[a_num, a_den], [b_num, b_den]], ...]`; defaults to the geometric family.
        #[arg(long)]
        family: Option<PathBuf>,
        /// Truncation depth of the geometric family.
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: u32,
        /// Comma-separated radii as `p/q`; defaults to `4^-k` for `k = 2..=6`.
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<String>>,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Seeded randomized checks of the operator catalog.
    Props {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// JSON destination; stdout when absent.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("FBREG_THREADS") {
        let n: usize = v.trim().parse().with_context(|| format!("FBREG_THREADS=`{v}` is not a count"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run_solve(cfg: &ExperimentConfig) -> Result<u8> {
    let field = cfg.boundary.field(cfg.grid)?;
    let problem = ObstacleProblem::new(cfg.operator.clone(), field, cfg.k_bound)?;
    let opts = SolverOptions::new(cfg.tol, cfg.max_iters);
    let (sol, code) = match solve_with(&problem, &opts) {
        Ok(sol) => (sol, 0),
        Err(SolveError::NonConvergence { best }) => {
            eprintln!(
                "no convergence after {} sweeps: best residual {} > tol {}",
                best.iterations,
                fmt17(best.residual),
                fmt17(cfg.tol)
            );
            (*best, NEGATIVE)
        }
        Err(e) => return Err(e.into()),
    };
    std::fs::create_dir_all(&cfg.output_dir)?;
    let (csv, _) = write_snapshot(&cfg.output_dir.join("solution"), &sol, &cfg.operator, cfg.tol)?;
    println!("residual {}", fmt17(sol.residual));
    println!("iterations {}", sol.iterations);
    println!("policy_iterations {}", sol.policy_iterations);
    println!("wrote {}", csv.display());
    Ok(code)
}

fn run_verify(cfg: &ExperimentConfig, solution: &Path) -> Result<u8> {
    let checks = cfg.parsed_checks()?;
    let (sol, sidecar) = read_snapshot(solution).with_context(|| format!("loading {}", solution.display()))?;
    if sidecar.grid != cfg.grid {
        bail!("snapshot grid {:?} does not match the config grid {:?}", sidecar.grid, cfg.grid);
    }
    if sidecar.operator != cfg.operator {
        bail!("snapshot operator does not match the config operator");
    }
    let ctx = CheckInputs {
        sol: &sol,
        operator: &cfg.operator,
        k_bound: cfg.k_bound,
    };
    let reports: Vec<CheckReport> = checks
        .par_iter()
        .map(|c| c.run(&ctx).with_context(|| format!("check `{}`", c.name())))
        .collect::<Result<_>>()?;
    write_reports(&cfg.output_dir, &reports)?;
    println!("residual {}", fmt17(sidecar.residual));
    print!("{}", summary_table(&reports));
    let failed = reports.iter().any(|r| r.failures() > 0);
    Ok(if failed { NEGATIVE } else { 0 })
}

fn run_blowup(solution: &Path, x: [f64; 2], r: f64, resolution: usize, output: Option<&Path>) -> Result<u8> {
    let (sol, sidecar) = read_snapshot(solution).with_context(|| format!("loading {}", solution.display()))?;
    let blow = rescale(&sol.u, x, r, resolution)?;
    let fit = halfspace_fit(&blow, &sidecar.operator.ellipticity());
    if let Some(path) = output {
        write_field_csv(path, &blow, None)?;
    }
    write_json(std::io::stdout().lock(), &fit)?;
    Ok(0)
}

fn run_counterexample(
    family: Option<&Path>,
    depth: u32,
    radii: Option<&[String]>,
    output: Option<&Path>,
) -> Result<u8> {
    let fam = match family {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            IntervalFamily::from_json(&text).with_context(|| format!("family {}", path.display()))?
        }
        None => IntervalFamily::geometric(depth),
    };
    let radii: Vec<BigRational> = match radii {
        Some(list) => list
            .iter()
            .map(|s| parse_ratio(s).with_context(|| format!("`{s}` is not a rational")))
            .collect::<Result<_>>()?,
        None => quarter_powers(2..=6),
    };
    if radii.iter().any(|r| *r <= BigRational::from_integer(0.into())) {
        bail!("radii must be positive");
    }
    if radii.windows(2).any(|w| w[1] >= w[0]) {
        bail!("radii must be strictly decreasing");
    }
    let rep = verify_o_r2(&fam, &radii);
    let sink: Box<dyn Write> = match output {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["r", "u_over_r2", "density", "bounded"])?;
    for row in &rep.rows {
        w.write_record([
            fmt_ratio(&row.r),
            fmt_ratio(&row.u_over_r2),
            fmt_ratio(&row.density),
            row.bounded.to_string(),
        ])?;
    }
    w.flush()?;
    eprintln!(
        "ratio strictly decreasing: {}, density strictly decreasing: {}, bounded everywhere: {}",
        rep.ratio_strictly_decreasing, rep.density_strictly_decreasing, rep.all_bounded
    );
    Ok(0)
}

fn run_props(seed: u64, samples: usize, output: Option<&Path>) -> Result<u8> {
    let rep = run_property_suite(seed, samples);
    match output {
        Some(p) => write_json(File::create(p)?, &rep)?,
        None => write_json(std::io::stdout().lock(), &rep)?,
    }
    for p in &rep.properties {
        eprintln!("{:<12} {:>7} checked {:>3} failed  worst {:e}", p.name, p.checked, p.failures, p.worst_violation);
    }
    Ok(if rep.passed() { 0 } else { NEGATIVE })
}

fn run(cli: Cli) -> Result<u8> {
    configure_threads()?;
    match cli.command {
        Command::Solve { config, overrides } => run_solve(&ExperimentConfig::load(&config, &overrides)?),
        Command::Verify {
            config,
            solution,
            overrides,
        } => run_verify(&ExperimentConfig::load(&config, &overrides)?, &solution),
        Command::Blowup {
            solution,
            x,
            y,
            r,
            resolution,
            output,
        } => run_blowup(&solution, [x, y], r, resolution, output.as_deref()),
        Command::Counterexample {
            family,
            depth,
            radii,
            output,
        } => run_counterexample(family.as_deref(), depth, radii.as_deref(), output.as_deref()),
        Command::Props { seed, samples, output } => run_props(seed, samples, output.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
