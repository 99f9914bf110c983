use serde::Serialize;

use crate::combinat::{dim_report, dofs_on_subsimplex};
use crate::error::{FemError, Result};
use crate::geometry::Mesh;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct NumberingOptions {
    /// Accept `k < n + 1`, where the inf-sup estimate is not guaranteed.
    pub allow_low_degree: bool,
}

/// Global numbering of stress and displacement DOFs.
///
/// Stress DOFs are grouped by subsimplex dimension, then by subsimplex id,
/// then by slot; interior bubbles of each cell follow. Displacement DOFs are
/// cell-major.
#[derive(Debug, Clone, Serialize)]
pub struct DofMap {
    pub n: usize,
    pub k: usize,
    pub num_stress: usize,
    pub num_displacement: usize,
    /// `layer_offsets[l]` is the first global DOF of layer `l`; the last entry
    /// is where the interior DOFs start.
    pub layer_offsets: Vec<usize>,
    pub per_subsimplex: Vec<usize>,
    pub per_cell_interior: usize,
    pub per_cell_displacement: usize,
    #[serde(skip)]
    cell_stress: Vec<Vec<usize>>,
    pub warnings: Vec<String>,
}

impl DofMap {
    /// Global stress DOFs of `cell` in local element order.
    pub fn cell_stress(&self, cell: usize) -> &[usize] {
        &self.cell_stress[cell]
    }

    pub fn cell_displacement(&self, cell: usize) -> std::ops::Range<usize> {
        cell * self.per_cell_displacement..(cell + 1) * self.per_cell_displacement
    }

    pub fn num_cells(&self) -> usize {
        self.cell_stress.len()
    }

    /// First global DOF of subsimplex `id` in layer `l`.
    pub fn subsimplex_offset(&self, l: usize, id: usize) -> usize {
        self.layer_offsets[l] + id * self.per_subsimplex[l]
    }

    pub fn interior_offset(&self, cell: usize) -> usize {
        self.layer_offsets[self.n] + cell * self.per_cell_interior
    }
}

pub fn number_dofs(mesh: &Mesh, k: usize, opts: NumberingOptions) -> Result<DofMap> {
    let n = mesh.dim();
    let report = dim_report(n, k)?;
    let mut warnings = Vec::new();
    if k < n + 1 {
        if !opts.allow_low_degree {
            return Err(FemError::Config(format!(
                "degree k = {k} is below n + 1 = {} for n = {n}; pass allow_low_degree to proceed",
                n + 1
            )));
        }
        let w = format!("degree k = {k} < n + 1 = {}: inf-sup stability is not guaranteed", n + 1);
        log::warn!("{w}");
        warnings.push(w);
    }
    let per_subsimplex: Vec<usize> = (0..n).map(|l| dofs_on_subsimplex(n, k, l) as usize).collect();
    let counts = mesh.lattice_counts();
    let mut layer_offsets = vec![0];
    for l in 0..n {
        layer_offsets.push(layer_offsets[l] + counts[l] * per_subsimplex[l]);
    }
    let per_cell_interior = report.dim_bubble as usize;
    let per_cell_displacement = report.dim_v_local as usize;
    let cells = mesh.num_cells();

    let mut map = DofMap {
        n,
        k,
        num_stress: layer_offsets[n] + cells * per_cell_interior,
        num_displacement: cells * per_cell_displacement,
        layer_offsets,
        per_subsimplex,
        per_cell_interior,
        per_cell_displacement,
        cell_stress: Vec::with_capacity(cells),
        warnings,
    };
    for c in 0..cells {
        let mut g = Vec::with_capacity(report.dim_pk_sym as usize);
        for l in 0..n {
            for local in 0..mesh.local_subsets(l).len() {
                let start = map.subsimplex_offset(l, mesh.cell_subsimplex(c, l, local));
                g.extend(start..start + map.per_subsimplex[l]);
            }
        }
        let start = map.interior_offset(c);
        g.extend(start..start + per_cell_interior);
        map.cell_stress.push(g);
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let m = Mesh::kuhn(2, 1).unwrap();
        let d = number_dofs(&m, 3, NumberingOptions::default()).unwrap();
        assert_eq!((d.num_stress, d.num_displacement), (50, 24));
        let d = number_dofs(&Mesh::kuhn(2, 2).unwrap(), 3, NumberingOptions::default()).unwrap();
        assert_eq!(d.num_stress, 163);
        let tet = Mesh::new(
            vec![vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
            vec![vec![0, 1, 2, 3]],
        )
        .unwrap();
        assert_eq!(number_dofs(&tet, 4, NumberingOptions::default()).unwrap().num_stress, 210);
    }

    #[test]
    fn every_dof_is_reached() {
        let m = Mesh::kuhn(3, 1).unwrap();
        let d = number_dofs(&m, 4, NumberingOptions::default()).unwrap();
        let mut seen = vec![false; d.num_stress];
        for c in 0..m.num_cells() {
            assert_eq!(d.cell_stress(c).len(), 210);
            for &g in d.cell_stress(c) {
                seen[g] = true;
            }
        }
        assert!(seen.into_iter().all(|s| s));
    }

    #[test]
    fn low_degree_needs_flag() {
        let m = Mesh::kuhn(2, 1).unwrap();
        assert!(matches!(number_dofs(&m, 2, NumberingOptions::default()), Err(FemError::Config(_))));
        let d = number_dofs(&m, 2, NumberingOptions { allow_low_degree: true }).unwrap();
        assert_eq!(d.warnings.len(), 1);
    }
}
