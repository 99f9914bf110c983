//! Solving the mixed system, error measurement, stability constants and
//! convergence studies.

mod errors;
mod infsup;
mod mms;
mod problem;
mod solve;
mod study;

pub use errors::{cell_divergence, equilibrium_defect, error_norms, ErrorNorms};
pub use infsup::{inf_sup_constant, kernel_coercivity, min_generalized_eigenvalue, KernelCoercivity, DENSE_LIMIT};
pub use mms::{cube_bubble, manufactured_solution, random_poly, ManufacturedSolution};
pub use problem::{solve_problem, CellSample, LoadSpec, Material, MeshSpec, ProblemConfig, ProblemOutput};
pub use solve::{solve_saddle, SaddleSolution};
pub use study::{
    convergence_study, rows_to_csv, rows_to_gnuplot, run_level, ConvergenceReport, ConvergenceRow, LevelDiagnostics,
    LevelResult, RateCheck, RateTargets, StudyConfig, SweepEntry, CSV_HEADER,
};
