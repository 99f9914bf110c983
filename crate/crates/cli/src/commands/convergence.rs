use std::path::{Path, PathBuf};

use hdivsym::analysis::{convergence_study, rows_to_csv, rows_to_gnuplot, ConvergenceReport, StudyConfig};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

pub const DEFAULT_LEVELS: usize = 3;

pub fn study_config(config: &RunConfig) -> CliResult<StudyConfig> {
    let (n, k) = config.dim_degree()?;
    config.validate_material()?;
    let mut study = StudyConfig::new(n, k, config.resolutions(DEFAULT_LEVELS)?);
    study.mu = config.mu;
    study.lambda = config.lambda;
    study.seed = config.seed;
    study.compute_beta = config.compute_beta;
    study.cell_budget = config.cell_budget;
    study.allow_low_degree = config.allow_low_degree;
    study.deterministic = config.deterministic_reduction;
    study.lambda_sweep = config.lambda_sweep.clone();
    study.validate()?;
    Ok(study)
}

pub fn run(config: &RunConfig) -> CliResult<ConvergenceReport> {
    Ok(convergence_study(&study_config(config)?)?)
}

fn sibling(path: &Path, ext: &str) -> PathBuf {
    path.with_extension(ext)
}

/// Writes `<out>` (CSV) with `.json` and `.dat` siblings, or prints the CSV
/// when no output path is configured.
pub fn emit(config: &RunConfig, report: &ConvergenceReport) -> CliResult<()> {
    let csv = rows_to_csv(&report.rows);
    let Some(out) = &config.out else {
        print!("{csv}");
        return Ok(());
    };
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    }
    std::fs::write(out, csv).map_err(CliError::io(out))?;
    let json = serde_json::to_string_pretty(report).expect("report serializes");
    let json_path = sibling(out, "json");
    std::fs::write(&json_path, json + "\n").map_err(CliError::io(&json_path))?;
    let dat_path = sibling(out, "dat");
    std::fs::write(&dat_path, rows_to_gnuplot(&report.rows)).map_err(CliError::io(&dat_path))?;
    Ok(())
}
