//! Global DOF numbering, the discrete spaces on a mesh, and assembly of the
//! mixed system.

mod conformity;
mod dofmap;
mod space;
mod sparse;
mod system;

pub use conformity::{interelement_jump_check, JumpReport};
pub use dofmap::{number_dofs, DofMap, NumberingOptions};
pub use space::{FrameOverride, SpaceOptions, StressSpace};
pub use sparse::{CsrMatrix, TripletBuilder};
pub use system::{assemble_system, frobenius_packed, local_matrices, spanning_gram, LocalMatrices, SaddleSystem};
