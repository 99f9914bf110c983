//! Fixtures shared by the benchmarks.

use hdivsym::analysis::{manufactured_solution, ManufacturedSolution};
use hdivsym::assembly::StressSpace;
use hdivsym::geometry::{Mesh, Simplex};
use hdivsym::symtensor::Compliance;

/// A fixed, moderately skewed simplex in `R^n`.
pub fn skewed_simplex(n: usize) -> Simplex {
    let mut verts = vec![vec![0.0; n]];
    for i in 0..n {
        let mut v: Vec<f64> = (0..n).map(|j| 0.1 * ((i + 2 * j) % 3) as f64).collect();
        v[i] += 1.0;
        verts.push(v);
    }
    Simplex::from_vertices(verts).expect("fixture simplex is nondegenerate")
}

pub fn kuhn_space(n: usize, k: usize, m: usize) -> StressSpace {
    StressSpace::new(Mesh::kuhn(n, m).expect("mesh fits the budget"), k).expect("space builds")
}

pub fn mms(n: usize, k: usize) -> ManufacturedSolution {
    manufactured_solution(n, k, Compliance { mu: 1.0, lambda: 1.0 }, 7).expect("valid manufactured problem")
}
