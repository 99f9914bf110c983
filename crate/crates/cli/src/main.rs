//! `hdivsym` command-line driver.
//!
//! Exit codes: 0 when every check passes, 1 on a numerical failure or a
//! failed check, 2 on invalid configuration or input.

mod commands;
mod config;
mod error;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;
use error::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "hdivsym", version, about = "Symmetric H(div) stress elements for linear elasticity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the element construction for one dimension and degree.
    Verify(CommonArgs),
    /// Manufactured-solution convergence study on refined Kuhn meshes.
    Convergence(CommonArgs),
    /// Discrete inf-sup constant on refined Kuhn meshes.
    Infsup(CommonArgs),
    /// Solve one problem described by a JSON file.
    Solve(SolveArgs),
}

#[derive(Args, Default)]
struct CommonArgs {
    /// JSON file with any of the settings below; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    degree: Option<usize>,
    /// Refinement levels, resolutions 1, 2, 4, ...
    #[arg(long)]
    levels: Option<usize>,
    /// Explicit comma-separated resolutions.
    #[arg(long, value_delimiter = ',')]
    resolutions: Option<Vec<usize>>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Random simplices per check (verify).
    #[arg(long)]
    simplices: Option<usize>,
    /// Smallest acceptable inf-sup constant (infsup).
    #[arg(long)]
    floor: Option<f64>,
    /// Largest acceptable max/min ratio of inf-sup constants (infsup).
    #[arg(long)]
    ratio_bound: Option<f64>,
    #[arg(long)]
    cell_budget: Option<usize>,
    #[arg(long)]
    allow_low_degree: bool,
    /// Re-evaluate the DOF functionals symbolically (verify).
    #[arg(long)]
    exact_cross_checks: bool,
    /// Single-threaded factorization for bitwise-reproducible output.
    #[arg(long)]
    deterministic_reduction: bool,
    /// Also compute the inf-sup constant per level (convergence).
    #[arg(long)]
    beta: bool,
    /// Comma-separated `lambda` values re-run on the finest mesh (convergence).
    #[arg(long, value_delimiter = ',')]
    lambda_sweep: Option<Vec<f64>>,
}

#[derive(Args)]
struct SolveArgs {
    /// Problem description (JSON).
    problem: PathBuf,
    /// Solution file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the mesh as `{points, cells}` JSON.
    #[arg(long)]
    mesh_out: Option<PathBuf>,
    /// Also write A, B, S and Mu in MatrixMarket format into this directory.
    #[arg(long)]
    matrices_out: Option<PathBuf>,
    #[arg(long)]
    allow_low_degree: bool,
}

impl CommonArgs {
    fn resolve(self) -> CliResult<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        c.dim = self.dim.or(c.dim);
        c.degree = self.degree.or(c.degree);
        c.levels = self.levels.or(c.levels);
        c.resolutions = self.resolutions.or(c.resolutions);
        c.mu = self.mu.unwrap_or(c.mu);
        c.lambda = self.lambda.unwrap_or(c.lambda);
        c.seed = self.seed.unwrap_or(c.seed);
        c.out = self.out.or(c.out);
        c.simplices = self.simplices.unwrap_or(c.simplices);
        c.floor = self.floor.unwrap_or(c.floor);
        c.ratio_bound = self.ratio_bound.unwrap_or(c.ratio_bound);
        c.cell_budget = self.cell_budget.unwrap_or(c.cell_budget);
        c.allow_low_degree |= self.allow_low_degree;
        c.exact_cross_checks |= self.exact_cross_checks;
        c.deterministic_reduction |= self.deterministic_reduction;
        c.compute_beta |= self.beta;
        c.lambda_sweep = self.lambda_sweep.unwrap_or(c.lambda_sweep);
        Ok(c)
    }
}

fn write_output(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;
            }
            std::fs::write(p, text).map_err(CliError::io(p))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}

fn verdict(passed: bool, what: &str) -> CliResult<bool> {
    if passed {
        log::info!("{what}: pass");
    } else {
        eprintln!("{what}: FAIL");
    }
    Ok(passed)
}

fn run(cli: Cli) -> CliResult<bool> {
    config::configure_threads()?;
    match cli.command {
        Command::Verify(args) => {
            let c = args.resolve()?;
            let report = commands::verify::run(&c)?;
            write_output(c.out.as_deref(), &to_json(&report))?;
            for claim in &report.claims {
                eprintln!("{:<22} {}", claim.name, if claim.passed { "pass" } else { "FAIL" });
            }
            verdict(report.passed, "verify")
        }
        Command::Convergence(args) => {
            let c = args.resolve()?;
            let report = commands::convergence::run(&c)?;
            commands::convergence::emit(&c, &report)?;
            for check in &report.checks {
                eprintln!(
                    "{:<14} {:.3} (threshold {:.2}) {}",
                    check.quantity,
                    check.observed,
                    check.threshold,
                    if check.passed { "pass" } else { "FAIL" }
                );
            }
            for entry in &report.lambda_sweep {
                eprintln!(
                    "lambda {:<9.3e} m={} e_sigma_hdiv {:.3e} e_u_l2 {:.3e} (reported only)",
                    entry.lambda, entry.m, entry.errors.e_sigma_hdiv, entry.errors.e_u_l2
                );
            }
            verdict(report.passed, "convergence")
        }
        Command::Infsup(args) => {
            let c = args.resolve()?;
            let report = commands::infsup::run(&c)?;
            match &c.out {
                Some(p) => {
                    write_output(Some(p), &commands::infsup::table(&report))?;
                    let json = p.with_extension("json");
                    write_output(Some(&json), &to_json(&report))?;
                }
                None => print!("{}", commands::infsup::table(&report)),
            }
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            if report.informational {
                eprintln!("informational run: beta_min = {:.3e}, ratio = {:.3}", report.min_beta, report.ratio);
            }
            verdict(report.passed, "infsup")
        }
        Command::Solve(args) => {
            let problem = commands::solve::load_problem(&args.problem)?;
            let out = commands::solve::run(&problem, args.allow_low_degree)?;
            write_output(args.out.as_deref(), &to_json(&out))?;
            if let Some(p) = &args.mesh_out {
                write_output(Some(p), &to_json(&problem.build_mesh()?.to_json()))?;
            }
            if let Some(dir) = &args.matrices_out {
                commands::solve::export_matrices(&problem, args.allow_low_degree, dir)?;
            }
            eprintln!("residual {:.3e}, equilibrium defect {:.3e}", out.residual, out.equilibrium_defect);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
