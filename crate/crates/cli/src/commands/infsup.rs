use serde::Serialize;

use hdivsym::analysis::inf_sup_constant;
use hdivsym::assembly::{assemble_system, NumberingOptions, SpaceOptions, StressSpace};
use hdivsym::fields::CartesianPoly;
use hdivsym::geometry::Mesh;

use crate::config::RunConfig;
use crate::error::CliResult;

pub const DEFAULT_LEVELS: usize = 3;

#[derive(Debug, Serialize)]
pub struct InfSupRow {
    pub m: usize,
    pub h: f64,
    pub num_stress: usize,
    pub num_displacement: usize,
    pub beta: f64,
}

#[derive(Debug, Serialize)]
pub struct InfSupReport {
    pub config: RunConfig,
    pub rows: Vec<InfSupRow>,
    pub min_beta: f64,
    pub ratio: f64,
    /// Low-degree runs are reported without a verdict.
    pub informational: bool,
    pub passed: bool,
    pub warnings: Vec<String>,
}

pub fn run(config: &RunConfig) -> CliResult<InfSupReport> {
    let (n, k) = config.dim_degree()?;
    let compliance = config.validate_material()?;
    let opts = SpaceOptions {
        numbering: NumberingOptions { allow_low_degree: config.allow_low_degree },
        sequential: config.deterministic_reduction,
        ..Default::default()
    };
    let zero = vec![CartesianPoly::zero(n); n];
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for m in config.resolutions(DEFAULT_LEVELS)? {
        let mesh = Mesh::kuhn_with_budget(n, m, config.cell_budget)?;
        let h = mesh.h();
        let space = StressSpace::with_options(mesh, k, &opts)?;
        warnings.extend(space.dofmap.warnings.iter().cloned());
        let sys = assemble_system(&space, &compliance, &zero);
        let beta = inf_sup_constant(&sys)?;
        log::info!("m = {m}: beta = {beta:.6}");
        rows.push(InfSupRow { m, h, num_stress: space.num_stress(), num_displacement: space.num_displacement(), beta });
    }
    warnings.dedup();
    let min_beta = rows.iter().map(|r| r.beta).fold(f64::INFINITY, f64::min);
    let max_beta = rows.iter().map(|r| r.beta).fold(0.0, f64::max);
    let ratio = max_beta / min_beta;
    let informational = k < n + 1;
    let passed = informational || (min_beta > config.floor && ratio < config.ratio_bound);
    Ok(InfSupReport { config: config.clone(), rows, min_beta, ratio, informational, passed, warnings })
}

pub fn table(report: &InfSupReport) -> String {
    let mut out = String::from("m,h,num_stress,num_displacement,beta\n");
    for r in &report.rows {
        out += &format!("{},{:.6e},{},{},{:.10e}\n", r.m, r.h, r.num_stress, r.num_displacement, r.beta);
    }
    out
}
