use std::path::Path;

use hdivsym::analysis::{solve_problem, ProblemConfig, ProblemOutput};

use crate::error::{CliError, CliResult};

pub fn load_problem(path: &Path) -> CliResult<ProblemConfig> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: line {}, column {}: {e}", path.display(), e.line(), e.column())))
}

pub fn run(problem: &ProblemConfig, allow_low_degree: bool) -> CliResult<ProblemOutput> {
    let mut problem = problem.clone();
    problem.allow_low_degree |= allow_low_degree;
    let out = solve_problem(&problem)?;
    if out.residual > 1e-9 {
        return Err(CliError::Numerical(format!("saddle-point residual {:.3e} exceeds 1e-9", out.residual)));
    }
    Ok(out)
}

/// Rebuilds the system of `problem` and writes its blocks to `dir`.
pub fn export_matrices(problem: &ProblemConfig, allow_low_degree: bool, dir: &Path) -> CliResult<()> {
    let mut problem = problem.clone();
    problem.allow_low_degree |= allow_low_degree;
    let (_, sys) = problem.assemble()?;
    sys.write_matrix_market(dir).map_err(CliError::io(dir))
}
