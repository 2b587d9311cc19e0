//! Model parameters, many-body bases and exact Hamiltonians.

pub mod basis;
pub mod hamiltonian;
pub mod kblock;
pub mod operator;
pub mod params;

pub use basis::{enumerate_basis, Configuration, Sector, SectorBasis, Spin};
pub use hamiltonian::build_real_space_hamiltonian;
pub use kblock::{build_k_block, periodic_k_grid, KBlockMatrix, KBlockMode, DEFAULT_N0};
pub use operator::SparseHermitianOperator;
pub use params::{Boundary, ModelParams, Statistics};
