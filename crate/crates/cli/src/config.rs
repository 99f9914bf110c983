use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Settings shared by all subcommands. Every field may come from a JSON file
/// (`--config`) and be overridden by the matching command-line flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub dim: Option<usize>,
    pub degree: Option<usize>,
    /// Number of refinement levels; level `i` uses `m = 2^i`.
    pub levels: Option<usize>,
    /// Explicit resolutions, overriding `levels`.
    pub resolutions: Option<Vec<usize>>,
    pub mu: f64,
    pub lambda: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    /// Random simplices per check in `verify`.
    pub simplices: usize,
    pub floor: f64,
    pub ratio_bound: f64,
    pub cell_budget: usize,
    pub allow_low_degree: bool,
    pub exact_cross_checks: bool,
    pub deterministic_reduction: bool,
    pub compute_beta: bool,
    /// Extra `lambda` values solved on the finest mesh (convergence).
    pub lambda_sweep: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dim: None,
            degree: None,
            levels: None,
            resolutions: None,
            mu: 1.0,
            lambda: 1.0,
            seed: 0,
            out: None,
            simplices: 20,
            floor: 1e-4,
            ratio_bound: 2.0,
            cell_budget: hdivsym::geometry::DEFAULT_CELL_BUDGET,
            allow_low_degree: false,
            exact_cross_checks: false,
            deterministic_reduction: false,
            compute_beta: false,
            lambda_sweep: Vec::new(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: line {}, column {}: {e}", path.display(), e.line(), e.column())))
    }

    pub fn dim(&self) -> CliResult<usize> {
        match self.dim {
            Some(n) if n >= 1 => Ok(n),
            Some(n) => Err(CliError::Config(format!("dimension must be >= 1, got {n}"))),
            None => Err(CliError::Config("missing --dim".into())),
        }
    }

    pub fn degree(&self) -> CliResult<usize> {
        match self.degree {
            Some(k) if k >= 2 => Ok(k),
            Some(k) => Err(CliError::Config(format!("degree must be >= 2, got {k}"))),
            None => Err(CliError::Config("missing --degree".into())),
        }
    }

    /// Dimension and degree, with `k >= n + 1` unless low degrees are allowed.
    pub fn dim_degree(&self) -> CliResult<(usize, usize)> {
        let (n, k) = (self.dim()?, self.degree()?);
        if k < n + 1 && !self.allow_low_degree {
            return Err(CliError::Config(format!(
                "degree {k} < n + 1 = {}; pass --allow-low-degree to run anyway",
                n + 1
            )));
        }
        Ok((n, k))
    }

    pub fn resolutions(&self, default_levels: usize) -> CliResult<Vec<usize>> {
        if let Some(r) = &self.resolutions {
            if r.is_empty() || r.contains(&0) {
                return Err(CliError::Config("resolutions must be positive".into()));
            }
            return Ok(r.clone());
        }
        let levels = self.levels.unwrap_or(default_levels);
        if levels == 0 || levels > 20 {
            return Err(CliError::Config(format!("levels must be in 1..=20, got {levels}")));
        }
        Ok((0..levels).map(|i| 1 << i).collect())
    }

    pub fn validate_material(&self) -> CliResult<hdivsym::symtensor::Compliance> {
        Ok(hdivsym::symtensor::Compliance::new(self.mu, self.lambda)?)
    }
}

/// `HDIVSYM_THREADS` sets the worker count of the global thread pool.
pub const THREADS_VAR: &str = "HDIVSYM_THREADS";

pub fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Config(format!("{THREADS_VAR} must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot configure {threads} threads: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levels_double() {
        let c = RunConfig { levels: Some(4), ..Default::default() };
        assert_eq!(c.resolutions(3).unwrap(), vec![1, 2, 4, 8]);
        let c = RunConfig { resolutions: Some(vec![2, 3]), ..Default::default() };
        assert_eq!(c.resolutions(3).unwrap(), vec![2, 3]);
    }

    #[test]
    fn degree_rules() {
        let c = RunConfig { dim: Some(2), degree: Some(1), ..Default::default() };
        assert!(c.dim_degree().is_err());
        let c = RunConfig { dim: Some(2), degree: Some(2), ..Default::default() };
        assert!(c.dim_degree().is_err());
        let c = RunConfig { allow_low_degree: true, ..c };
        assert_eq!(c.dim_degree().unwrap(), (2, 2));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"dim": 2, "degre": 3}"#).is_err());
        let c: RunConfig = serde_json::from_str(r#"{"dim": 2, "degree": 3, "seed": 7}"#).unwrap();
        assert_eq!((c.dim, c.degree, c.seed, c.mu), (Some(2), Some(3), 7, 1.0));
    }
}
