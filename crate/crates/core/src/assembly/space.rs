use nalgebra::DVector;
use rayon::prelude::*;

use super::dofmap::{number_dofs, DofMap, NumberingOptions};
use crate::elements::{CellFrames, DisplacementElement, StressElement};
use crate::error::Result;
use crate::geometry::{Mesh, SubsimplexFrame};
use crate::symtensor::SymTensor;

/// Replaces the frame one cell uses on one of its subsimplices, leaving the
/// neighbours untouched. Used to break conformity on purpose.
#[derive(Debug, Clone)]
pub struct FrameOverride {
    pub cell: usize,
    pub l: usize,
    pub local_sub: usize,
    pub frame: SubsimplexFrame,
}

#[derive(Debug, Clone, Default)]
pub struct SpaceOptions {
    pub numbering: NumberingOptions,
    pub overrides: Vec<FrameOverride>,
    /// Build elements on the calling thread only.
    pub sequential: bool,
}

/// Global stress and displacement spaces on a mesh.
#[derive(Debug, Clone)]
pub struct StressSpace {
    pub mesh: Mesh,
    pub dofmap: DofMap,
    pub stress: Vec<StressElement>,
    pub displacement: Vec<DisplacementElement>,
}

impl StressSpace {
    pub fn new(mesh: Mesh, k: usize) -> Result<Self> {
        Self::with_options(mesh, k, &SpaceOptions::default())
    }

    pub fn with_options(mesh: Mesh, k: usize, opts: &SpaceOptions) -> Result<Self> {
        let dofmap = number_dofs(&mesh, k, opts.numbering)?;
        let build = |c: usize| {
            let mut frames = CellFrames::from_mesh(&mesh, c);
            for o in opts.overrides.iter().filter(|o| o.cell == c) {
                frames.frames[o.l][o.local_sub] = o.frame.clone();
            }
            StressElement::new(mesh.simplex(c).clone(), frames, k)
        };
        let stress: Vec<StressElement> = if opts.sequential {
            (0..mesh.num_cells()).map(build).collect::<Result<_>>()?
        } else {
            (0..mesh.num_cells()).into_par_iter().map(build).collect::<Result<_>>()?
        };
        let displacement = (0..mesh.num_cells())
            .map(|c| DisplacementElement::new(mesh.simplex(c).clone(), k))
            .collect();
        Ok(Self { mesh, dofmap, stress, displacement })
    }

    pub fn degree(&self) -> usize {
        self.dofmap.k
    }

    pub fn num_stress(&self) -> usize {
        self.dofmap.num_stress
    }

    pub fn num_displacement(&self) -> usize {
        self.dofmap.num_displacement
    }

    fn local_values(&self, cell: usize, global: &[f64]) -> Vec<f64> {
        self.dofmap.cell_stress(cell).iter().map(|&g| global[g]).collect()
    }

    /// Spanning-set coefficients of the global stress field on `cell`.
    pub fn cell_coefficients(&self, cell: usize, global: &[f64]) -> DVector<f64> {
        self.stress[cell].combine(&self.local_values(cell, global))
    }

    pub fn eval_stress(&self, cell: usize, global: &[f64], lambda: &[f64]) -> SymTensor {
        let c = self.cell_coefficients(cell, global);
        self.stress[cell].eval_coefficients(c.as_slice(), lambda)
    }

    pub fn eval_displacement(&self, cell: usize, global: &[f64], lambda: &[f64]) -> Vec<f64> {
        let r = self.dofmap.cell_displacement(cell);
        self.displacement[cell].eval(&global[r], lambda)
    }
}
