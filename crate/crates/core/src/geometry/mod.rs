//! Simplices, structured simplicial meshes, and the face lattice.

mod frame;
mod mesh;
mod simplex;

pub use frame::{FramePair, SubsimplexFrame};
pub use mesh::{build_face_lattice, InteriorFacet, Mesh, MeshJson, SubsimplexLayer, DEFAULT_CELL_BUDGET};
pub use simplex::{edge_pairs, random_simplex, Simplex};
