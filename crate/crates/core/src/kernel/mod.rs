//! Exact rationals and sparse linear algebra.

pub mod echelon;
pub mod matrix;
mod rational;
pub mod subspace;

pub use echelon::{solve_system, Echelon, Rref, SparseRow};
pub use matrix::{flip_operator, kron, kron_all, nullspace, EntryWitness, Matrix};
pub use rational::{binomial, fmt_rational, int, inv_factorial, is_negative, one, parse_rational, q, zero, Rational};
pub use subspace::{to_dense, to_sparse, Subspace};
