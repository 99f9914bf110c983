use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::frame::SubsimplexFrame;
use super::simplex::Simplex;
use crate::combinat::subsets;
use crate::error::{FemError, Result};

/// Default upper bound on the number of cells a generated mesh may have.
pub const DEFAULT_CELL_BUDGET: usize = 200_000;

/// All `l`-subsimplices of a mesh for one fixed `l`.
#[derive(Debug, Clone)]
pub struct SubsimplexLayer {
    ids: BTreeMap<Vec<usize>, usize>,
    vertices: Vec<Vec<usize>>,
    cells: Vec<Vec<usize>>,
    frames: Vec<SubsimplexFrame>,
}

impl SubsimplexLayer {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn id_of(&self, sorted_vertices: &[usize]) -> Option<usize> {
        self.ids.get(sorted_vertices).copied()
    }

    /// Sorted global vertex ids of subsimplex `id`.
    pub fn vertices(&self, id: usize) -> &[usize] {
        &self.vertices[id]
    }

    /// Cells incident to subsimplex `id`, ascending.
    pub fn cells(&self, id: usize) -> &[usize] {
        &self.cells[id]
    }

    pub fn frame(&self, id: usize) -> &SubsimplexFrame {
        &self.frames[id]
    }
}

/// A conforming simplicial mesh with its face lattice.
///
/// Every cell stores its global vertex ids sorted ascending; local
/// subsimplices are enumerated as ascending subsets of local indices, so the
/// local order of any subsimplex agrees with its global sorted order.
#[derive(Debug, Clone)]
pub struct Mesh {
    dim: usize,
    points: Vec<Vec<f64>>,
    cells: Vec<Vec<usize>>,
    simplices: Vec<Simplex>,
    layers: Vec<SubsimplexLayer>,
    /// `[cell][l][local subset index]` -> global id in layer `l`.
    cell_subsimplices: Vec<Vec<Vec<usize>>>,
    local_subsets: Vec<Vec<Vec<usize>>>,
    h: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MeshJson {
    pub points: Vec<Vec<f64>>,
    pub cells: Vec<Vec<usize>>,
}

impl Mesh {
    pub fn new(points: Vec<Vec<f64>>, cells: Vec<Vec<usize>>) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        if dim == 0 || points.iter().any(|p| p.len() != dim) {
            return Err(FemError::Config("mesh points must share a positive dimension".into()));
        }
        let mut sorted_cells = Vec::with_capacity(cells.len());
        for c in cells {
            let mut c = c;
            c.sort_unstable();
            if c.len() != dim + 1 || c.iter().any(|&v| v >= points.len()) {
                return Err(FemError::Config(format!("invalid cell {c:?}")));
            }
            if c.windows(2).any(|w| w[0] == w[1]) {
                return Err(FemError::Config(format!("cell {c:?} repeats a vertex")));
            }
            sorted_cells.push(c);
        }
        let simplices = sorted_cells
            .iter()
            .map(|c| Simplex::from_vertices(c.iter().map(|&v| points[v].clone()).collect()))
            .collect::<Result<Vec<_>>>()?;
        let local_subsets: Vec<Vec<Vec<usize>>> = (0..dim).map(|l| subsets(dim + 1, l + 1)).collect();
        let (layers, cell_subsimplices) = build_face_lattice(&points, &sorted_cells, &local_subsets)?;
        let h = simplices.iter().map(Simplex::diameter).fold(0.0, f64::max);
        Ok(Self {
            dim,
            points,
            cells: sorted_cells,
            simplices,
            layers,
            cell_subsimplices,
            local_subsets,
            h,
        })
    }

    /// Kuhn triangulation of `[0,1]^n` with `m` subdivisions per axis.
    pub fn kuhn(n: usize, m: usize) -> Result<Self> {
        Self::kuhn_with_budget(n, m, DEFAULT_CELL_BUDGET)
    }

    pub fn kuhn_with_budget(n: usize, m: usize, budget: usize) -> Result<Self> {
        if n < 1 || m < 1 {
            return Err(FemError::Config(format!("kuhn mesh needs n >= 1 and m >= 1, got n={n}, m={m}")));
        }
        let requested = (1..=n as u128).product::<u128>() * (m as u128).pow(n as u32);
        if requested > budget as u128 {
            return Err(FemError::CellBudget { requested, budget });
        }
        let side = m + 1;
        let npts = side.pow(n as u32);
        let index = |c: &[usize]| c.iter().rev().fold(0, |acc, &ci| acc * side + ci);
        let points: Vec<Vec<f64>> = (0..npts)
            .map(|mut id| {
                (0..n)
                    .map(|_| {
                        let c = id % side;
                        id /= side;
                        c as f64 / m as f64
                    })
                    .collect()
            })
            .collect();
        let perms = permutations(n);
        let mut cells = Vec::with_capacity(requested as usize);
        for mut cube in 0..m.pow(n as u32) {
            let mut corner = vec![0; n];
            for c in corner.iter_mut() {
                *c = cube % m;
                cube /= m;
            }
            for perm in &perms {
                let mut v = corner.clone();
                let mut cell = vec![index(&v)];
                for &axis in perm {
                    v[axis] += 1;
                    cell.push(index(&v));
                }
                cells.push(cell);
            }
        }
        Self::new(points, cells)
    }

    pub fn from_json(json: &MeshJson) -> Result<Self> {
        Self::new(json.points.clone(), json.cells.clone())
    }

    pub fn to_json(&self) -> MeshJson {
        MeshJson { points: self.points.clone(), cells: self.cells.clone() }
    }

    /// Same mesh with cells listed in the order given by `order`.
    pub fn with_cell_order(&self, order: &[usize]) -> Result<Self> {
        Self::new(self.points.clone(), order.iter().map(|&c| self.cells[c].clone()).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    /// Sorted global vertex ids of `cell`.
    pub fn cell(&self, cell: usize) -> &[usize] {
        &self.cells[cell]
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn simplex(&self, cell: usize) -> &Simplex {
        &self.simplices[cell]
    }

    /// Maximum cell diameter.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Layer of `l`-subsimplices, `0 <= l < dim`.
    pub fn layer(&self, l: usize) -> &SubsimplexLayer {
        &self.layers[l]
    }

    /// Number of `l`-subsimplices for each `l` in `0..dim`.
    pub fn lattice_counts(&self) -> Vec<usize> {
        self.layers.iter().map(SubsimplexLayer::len).collect()
    }

    /// Ascending local-index subsets of size `l + 1`, in the order used by
    /// [`Mesh::cell_subsimplex`].
    pub fn local_subsets(&self, l: usize) -> &[Vec<usize>] {
        &self.local_subsets[l]
    }

    /// Global id of the `local`-th `l`-subsimplex of `cell`.
    pub fn cell_subsimplex(&self, cell: usize, l: usize, local: usize) -> usize {
        self.cell_subsimplices[cell][l][local]
    }

    pub fn subsimplex_frame(&self, l: usize, id: usize) -> &SubsimplexFrame {
        self.layers[l].frame(id)
    }

    pub fn total_measure(&self) -> f64 {
        self.simplices.iter().map(Simplex::measure).sum()
    }

    /// Facets shared by two cells, with the local facet index (opposite
    /// vertex) in each cell.
    pub fn interior_facets(&self) -> Vec<InteriorFacet> {
        let l = self.dim - 1;
        let layer = &self.layers[l];
        (0..layer.len())
            .filter(|&id| layer.cells(id).len() == 2)
            .map(|id| {
                let [a, b] = [layer.cells(id)[0], layer.cells(id)[1]];
                let opposite = |c: usize| {
                    let verts = layer.vertices(id);
                    self.cells[c].iter().position(|v| !verts.contains(v)).expect("cell contains facet")
                };
                InteriorFacet { id, cells: [a, b], opposite: [opposite(a), opposite(b)] }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InteriorFacet {
    pub id: usize,
    pub cells: [usize; 2],
    /// Local index of the vertex opposite the facet in each cell.
    pub opposite: [usize; 2],
}

type Lattice = (Vec<SubsimplexLayer>, Vec<Vec<Vec<usize>>>);

/// Registers every `l`-subsimplex, `0 <= l < n`, of every cell exactly once.
/// Ids within a layer follow the lexicographic order of the sorted vertex
/// tuples, so they do not depend on the order of the cell list.
pub fn build_face_lattice(
    points: &[Vec<f64>],
    cells: &[Vec<usize>],
    local_subsets: &[Vec<Vec<usize>>],
) -> Result<Lattice> {
    let n = local_subsets.len();
    let mut seen = std::collections::BTreeSet::new();
    for c in cells {
        if !seen.insert(c.clone()) {
            return Err(FemError::DuplicateCell(c.clone()));
        }
    }
    let mut layers = Vec::with_capacity(n);
    for subs in local_subsets {
        let mut ids: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for c in cells {
            for s in subs {
                ids.insert(s.iter().map(|&i| c[i]).collect(), 0);
            }
        }
        let mut vertices = Vec::with_capacity(ids.len());
        for (id, (key, slot)) in ids.iter_mut().enumerate() {
            *slot = id;
            vertices.push(key.clone());
        }
        let frames = vertices
            .iter()
            .map(|vs| {
                let pts: Vec<&[f64]> = vs.iter().map(|&v| points[v].as_slice()).collect();
                SubsimplexFrame::from_points(&pts)
            })
            .collect::<Result<Vec<_>>>()?;
        layers.push(SubsimplexLayer { cells: vec![Vec::new(); vertices.len()], ids, vertices, frames });
    }
    let mut cell_subsimplices = Vec::with_capacity(cells.len());
    for (ci, c) in cells.iter().enumerate() {
        let mut per_l = Vec::with_capacity(n);
        for (l, subs) in local_subsets.iter().enumerate() {
            let layer = &mut layers[l];
            let ids: Vec<usize> = subs
                .iter()
                .map(|s| {
                    let key: Vec<usize> = s.iter().map(|&i| c[i]).collect();
                    layer.ids[&key]
                })
                .collect();
            for &id in &ids {
                layer.cells[id].push(ci);
            }
            per_l.push(ids);
        }
        cell_subsimplices.push(per_l);
    }
    for layer in &mut layers {
        for cs in &mut layer.cells {
            cs.sort_unstable();
        }
    }
    Ok((layers, cell_subsimplices))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}
