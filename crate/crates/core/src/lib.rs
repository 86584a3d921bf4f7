//! Exact computations for semi-free Hamiltonian circle actions on compact
//! symplectic 6-manifolds: localization over fixed-point data, wall-crossing
//! of reduced spaces, and Delzant polytopes.

pub mod affine;
pub mod algebra;
pub mod classifier;
pub mod cli;
pub mod delzant;
pub mod fpdata;
pub mod linalg;
pub mod localization;
pub mod poly;
pub mod rational;
