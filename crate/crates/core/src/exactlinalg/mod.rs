//! Exact integer and rational linear algebra.

mod lattice;
mod matrix;
mod modular;
mod solve;

pub use lattice::{pair_det, solves_integrally, Lattice, Residues};
pub use matrix::{hnf, IntMatrix};
pub use modular::{is_prime_u64, rational_reconstruct, solve_sparse, SparseRow};
pub use solve::solve_exact;
