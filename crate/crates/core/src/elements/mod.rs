//! Local stress and displacement elements.

mod bubble;
mod displacement;
mod dofs;
mod stress;

pub use bubble::{bubble_coefficients, check_bubble_equivalence, normal_trace_matrix, numerical_rank, BubbleCheck};
pub use displacement::{check_div_bubble_range, DisplacementElement, DivRangeCheck};
pub use dofs::{apply_dof, bubble_exponent, bubble_indices, dof_matrix, stress_dofs, CellFrames, DofDescriptor, DofKind};
pub use stress::{local_stress_basis, StressElement, UNISOLVENCE_THRESHOLD};
