pub mod convergence;
pub mod infsup;
pub mod solve;
pub mod verify;
