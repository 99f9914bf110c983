use serde::{Deserialize, Serialize};

use super::errors::{equilibrium_defect, error_norms, ErrorNorms};
use super::mms::{manufactured_solution, ManufacturedSolution};
use super::solve::solve_saddle;
use crate::assembly::{assemble_system, DofMap, NumberingOptions, SaddleSystem, SpaceOptions, StressSpace};
use crate::error::{FemError, Result};
use crate::fields::CartesianPoly;
use crate::geometry::{Mesh, MeshJson, DEFAULT_CELL_BUDGET};
use crate::symtensor::Compliance;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Material {
    pub mu: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeshSpec {
    /// Kuhn triangulation of the unit cube with `m` subdivisions per axis.
    Kuhn { m: usize },
    Inline(MeshJson),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoadSpec {
    /// Body force given componentwise.
    Polynomial { f: Vec<CartesianPoly> },
    /// Random manufactured displacement vanishing on the cube boundary.
    Manufactured { seed: u64 },
    /// Prescribed displacement; the body force and exact stress follow.
    Displacement { u: Vec<CartesianPoly> },
}

fn default_budget() -> usize {
    DEFAULT_CELL_BUDGET
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub n: usize,
    pub k: usize,
    pub material: Material,
    pub mesh: MeshSpec,
    pub load: LoadSpec,
    #[serde(default = "default_budget")]
    pub cell_budget: usize,
    #[serde(default)]
    pub allow_low_degree: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CellSample {
    pub cell: usize,
    pub lambda: Vec<f64>,
    pub x: Vec<f64>,
    /// Packed components of `sigma_h`.
    pub sigma: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProblemOutput {
    pub config: ProblemConfig,
    pub h: f64,
    pub dofmap: DofMap,
    pub residual: f64,
    pub equilibrium_defect: f64,
    pub errors: Option<ErrorNorms>,
    pub sigma: Vec<f64>,
    pub u: Vec<f64>,
    pub samples: Vec<CellSample>,
}

impl ProblemConfig {
    pub fn build_mesh(&self) -> Result<Mesh> {
        let mesh = match &self.mesh {
            MeshSpec::Kuhn { m } => Mesh::kuhn_with_budget(self.n, *m, self.cell_budget)?,
            MeshSpec::Inline(json) => {
                if json.cells.len() > self.cell_budget {
                    return Err(FemError::CellBudget { requested: json.cells.len() as u128, budget: self.cell_budget });
                }
                Mesh::from_json(json)?
            }
        };
        if mesh.dim() != self.n {
            return Err(FemError::Config(format!("mesh dimension {} does not match n = {}", mesh.dim(), self.n)));
        }
        Ok(mesh)
    }

    fn exact(&self, compliance: Compliance) -> Result<Option<ManufacturedSolution>> {
        Ok(match &self.load {
            LoadSpec::Polynomial { .. } => None,
            LoadSpec::Manufactured { seed } => Some(manufactured_solution(self.n, self.k, compliance, *seed)?),
            LoadSpec::Displacement { u } => Some(ManufacturedSolution::from_displacement(u.clone(), compliance)?),
        })
    }
}

/// Barycentre and vertices of each cell.
fn sample_points(n: usize) -> Vec<Vec<f64>> {
    let mut pts = vec![vec![1.0 / (n + 1) as f64; n + 1]];
    for i in 0..=n {
        let mut v = vec![0.0; n + 1];
        v[i] = 1.0;
        pts.push(v);
    }
    pts
}

impl ProblemConfig {
    /// Body force, and the exact solution when the load is manufactured.
    pub fn body_force(&self) -> Result<(Vec<CartesianPoly>, Option<ManufacturedSolution>)> {
        let compliance = Compliance::new(self.material.mu, self.material.lambda)?;
        let exact = self.exact(compliance)?;
        let force = match (&self.load, &exact) {
            (LoadSpec::Polynomial { f }, _) => f.clone(),
            (_, Some(e)) => e.f.clone(),
            (_, None) => unreachable!("non-polynomial loads carry an exact solution"),
        };
        if force.len() != self.n || force.iter().any(|p| p.dim() != self.n) {
            return Err(FemError::Config(format!("body force needs {0} components in {0} variables", self.n)));
        }
        Ok((force, exact))
    }

    pub fn assemble(&self) -> Result<(StressSpace, SaddleSystem)> {
        let compliance = Compliance::new(self.material.mu, self.material.lambda)?;
        let (force, _) = self.body_force()?;
        let opts = SpaceOptions {
            numbering: NumberingOptions { allow_low_degree: self.allow_low_degree },
            ..Default::default()
        };
        let space = StressSpace::with_options(self.build_mesh()?, self.k, &opts)?;
        let sys = assemble_system(&space, &compliance, &force);
        Ok((space, sys))
    }
}

pub fn solve_problem(config: &ProblemConfig) -> Result<ProblemOutput> {
    let (_, exact) = config.body_force()?;
    let (space, sys) = config.assemble()?;
    let h = space.mesh.h();
    let sol = solve_saddle(&sys)?;
    let errors = exact.as_ref().map(|e| error_norms(&space, &sol.sigma, &sol.u, e)).transpose()?;
    let mut samples = Vec::new();
    for c in 0..space.mesh.num_cells() {
        for lambda in sample_points(config.n) {
            let sigma = space.eval_stress(c, &sol.sigma, &lambda).packed().to_vec();
            let x = space.mesh.simplex(c).point(&lambda);
            samples.push(CellSample { cell: c, lambda, x, sigma });
        }
    }
    Ok(ProblemOutput {
        config: config.clone(),
        h,
        equilibrium_defect: equilibrium_defect(&space, &sol.sigma, &sys.rhs_f),
        dofmap: space.dofmap.clone(),
        residual: sol.residual,
        errors,
        sigma: sol.sigma,
        u: sol.u,
        samples,
    })
}
