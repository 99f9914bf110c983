use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::errors::{equilibrium_defect, error_norms, ErrorNorms};
use super::infsup::inf_sup_constant;
use super::mms::manufactured_solution;
use super::solve::solve_saddle;
use crate::assembly::{assemble_system, NumberingOptions, SpaceOptions, StressSpace};
use crate::error::{FemError, Result};
use crate::geometry::{Mesh, DEFAULT_CELL_BUDGET};
use crate::symtensor::Compliance;

fn default_mu() -> f64 {
    1.0
}

fn default_lambda() -> f64 {
    1.0
}

fn default_slack() -> f64 {
    0.3
}

fn default_budget() -> usize {
    DEFAULT_CELL_BUDGET
}

/// Expected convergence orders; `None` disables the check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateTargets {
    pub hdiv: Option<f64>,
    pub u: Option<f64>,
    pub sigma_l2: Option<f64>,
}

impl RateTargets {
    /// Optimal orders `k`, `k` and `k + 1`.
    pub fn optimal(k: usize) -> Self {
        Self { hdiv: Some(k as f64), u: Some(k as f64), sigma_l2: Some(k as f64 + 1.0) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub n: usize,
    pub k: usize,
    pub resolutions: Vec<usize>,
    #[serde(default = "default_mu")]
    pub mu: f64,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub compute_beta: bool,
    #[serde(default)]
    pub targets: Option<RateTargets>,
    /// A rate passes when it is at least `target - rate_slack`.
    #[serde(default = "default_slack")]
    pub rate_slack: f64,
    #[serde(default = "default_budget")]
    pub cell_budget: usize,
    #[serde(default)]
    pub allow_low_degree: bool,
    /// Run the sparse factorization single-threaded so repeated runs are
    /// bitwise identical.
    #[serde(default)]
    pub deterministic: bool,
    /// Lame `lambda` values re-run on the finest mesh; reported, never judged.
    #[serde(default)]
    pub lambda_sweep: Vec<f64>,
}

impl StudyConfig {
    pub fn new(n: usize, k: usize, resolutions: Vec<usize>) -> Self {
        Self {
            n,
            k,
            resolutions,
            mu: default_mu(),
            lambda: default_lambda(),
            seed: 0,
            compute_beta: false,
            targets: None,
            rate_slack: default_slack(),
            cell_budget: DEFAULT_CELL_BUDGET,
            allow_low_degree: false,
            deterministic: false,
            lambda_sweep: Vec::new(),
        }
    }

    pub fn targets(&self) -> RateTargets {
        self.targets.unwrap_or_else(|| RateTargets::optimal(self.k))
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolutions.is_empty() || self.resolutions.contains(&0) {
            return Err(FemError::Config("resolutions must be a nonempty list of positive integers".into()));
        }
        if self.resolutions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(FemError::Config("resolutions must be strictly increasing".into()));
        }
        Compliance::new(self.mu, self.lambda)?;
        crate::combinat::dim_report(self.n, self.k)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub m: usize,
    pub h: f64,
    pub e_sigma_l2: f64,
    pub e_sigma_div: f64,
    pub e_sigma_hdiv: f64,
    pub e_u_l2: f64,
    pub rate_hdiv: Option<f64>,
    pub rate_u: Option<f64>,
    pub rate_sigma_l2: Option<f64>,
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateCheck {
    pub quantity: String,
    pub observed: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelDiagnostics {
    pub m: usize,
    pub num_stress: usize,
    pub num_displacement: usize,
    pub solve_residual: f64,
    pub equilibrium_defect: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub config: StudyConfig,
    pub rows: Vec<ConvergenceRow>,
    pub diagnostics: Vec<LevelDiagnostics>,
    pub checks: Vec<RateCheck>,
    pub passed: bool,
    pub lambda_sweep: Vec<SweepEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepEntry {
    pub lambda: f64,
    pub m: usize,
    pub errors: ErrorNorms,
}

fn rate(e0: f64, e1: f64, h0: f64, h1: f64) -> f64 {
    (e0 / e1).ln() / (h0 / h1).ln()
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelResult {
    pub h: f64,
    pub errors: ErrorNorms,
    pub beta: Option<f64>,
    pub diagnostics: LevelDiagnostics,
}

/// Solves the manufactured problem on the Kuhn mesh with `m` subdivisions.
pub fn run_level(config: &StudyConfig, m: usize) -> Result<LevelResult> {
    let compliance = Compliance::new(config.mu, config.lambda)?;
    let exact = manufactured_solution(config.n, config.k, compliance, config.seed)?;
    let mesh = Mesh::kuhn_with_budget(config.n, m, config.cell_budget)?;
    let h = mesh.h();
    let opts = SpaceOptions {
        numbering: NumberingOptions { allow_low_degree: config.allow_low_degree },
        sequential: config.deterministic,
        ..Default::default()
    };
    let space = StressSpace::with_options(mesh, config.k, &opts)?;
    let sys = assemble_system(&space, &compliance, &exact.f);
    let sol = solve_saddle(&sys)?;
    let errors = error_norms(&space, &sol.sigma, &sol.u, &exact)?;
    let beta = if config.compute_beta { Some(inf_sup_constant(&sys)?) } else { None };
    let diagnostics = LevelDiagnostics {
        m,
        num_stress: space.num_stress(),
        num_displacement: space.num_displacement(),
        solve_residual: sol.residual,
        equilibrium_defect: equilibrium_defect(&space, &sol.sigma, &sys.rhs_f),
    };
    Ok(LevelResult { h, errors, beta, diagnostics })
}

pub fn convergence_study(config: &StudyConfig) -> Result<ConvergenceReport> {
    config.validate()?;
    if config.deterministic {
        faer::set_global_parallelism(faer::Par::Seq);
    }
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    let mut diagnostics = Vec::new();
    for &m in &config.resolutions {
        let LevelResult { h, errors: e, beta, diagnostics: diag } = run_level(config, m)?;
        log::info!("m = {m}: e_hdiv = {:.3e}, residual = {:.1e}", e.e_sigma_hdiv, diag.solve_residual);
        let prev = rows.last();
        rows.push(ConvergenceRow {
            m,
            h,
            e_sigma_l2: e.e_sigma_l2,
            e_sigma_div: e.e_sigma_div,
            e_sigma_hdiv: e.e_sigma_hdiv,
            e_u_l2: e.e_u_l2,
            rate_hdiv: prev.map(|p| rate(p.e_sigma_hdiv, e.e_sigma_hdiv, p.h, h)),
            rate_u: prev.map(|p| rate(p.e_u_l2, e.e_u_l2, p.h, h)),
            rate_sigma_l2: prev.map(|p| rate(p.e_sigma_l2, e.e_sigma_l2, p.h, h)),
            beta,
        });
        diagnostics.push(diag);
    }

    let targets = config.targets();
    let mut checks = Vec::new();
    if let Some(last) = rows.last().filter(|_| rows.len() >= 2) {
        for (name, observed, target) in [
            ("rate_hdiv", last.rate_hdiv, targets.hdiv),
            ("rate_u", last.rate_u, targets.u),
            ("rate_sigma_l2", last.rate_sigma_l2, targets.sigma_l2),
        ] {
            if let (Some(observed), Some(target)) = (observed, target) {
                let threshold = target - config.rate_slack;
                checks.push(RateCheck { quantity: name.into(), observed, threshold, passed: observed >= threshold });
            }
        }
    }
    let passed = checks.iter().all(|c| c.passed);

    let finest = *config.resolutions.last().expect("validated nonempty");
    let mut lambda_sweep = Vec::new();
    for &lambda in &config.lambda_sweep {
        let cfg = StudyConfig { lambda, compute_beta: false, ..config.clone() };
        let level = run_level(&cfg, finest)?;
        lambda_sweep.push(SweepEntry { lambda, m: finest, errors: level.errors });
    }
    Ok(ConvergenceReport { config: config.clone(), rows, diagnostics, checks, passed, lambda_sweep })
}

fn opt(v: Option<f64>, missing: &str) -> String {
    v.map_or_else(|| missing.to_string(), |x| format!("{x:.6e}"))
}

pub const CSV_HEADER: &str = "m,h,e_sigma_l2,e_sigma_div,e_sigma_hdiv,e_u_l2,rate_hdiv,rate_u,rate_sigma_l2,beta";

/// One line per row under [`CSV_HEADER`]; missing values are empty fields.
pub fn rows_to_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for r in rows {
        writeln!(
            out,
            "{},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{},{},{},{}",
            r.m,
            r.h,
            r.e_sigma_l2,
            r.e_sigma_div,
            r.e_sigma_hdiv,
            r.e_u_l2,
            opt(r.rate_hdiv, ""),
            opt(r.rate_u, ""),
            opt(r.rate_sigma_l2, ""),
            opt(r.beta, "")
        )
        .unwrap();
    }
    out
}

/// Whitespace-separated table for gnuplot, `NaN` for missing values.
pub fn rows_to_gnuplot(rows: &[ConvergenceRow]) -> String {
    let mut out = format!("# {}\n", CSV_HEADER.replace(',', " "));
    for r in rows {
        writeln!(
            out,
            "{} {:.6e} {:.6e} {:.6e} {:.6e} {:.6e} {} {} {} {}",
            r.m,
            r.h,
            r.e_sigma_l2,
            r.e_sigma_div,
            r.e_sigma_hdiv,
            r.e_u_l2,
            opt(r.rate_hdiv, "NaN"),
            opt(r.rate_u, "NaN"),
            opt(r.rate_sigma_l2, "NaN"),
            opt(r.beta, "NaN")
        )
        .unwrap();
    }
    out
}
