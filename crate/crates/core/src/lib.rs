//! Equilibrium-frame analysis of non-Hermitian Hamiltonians.
//!
//! A Hamiltonian `H = H_pt + H0` whose PT-symmetric part commutes with the
//! remainder behaves, after the non-unitary frame change `S = exp(−i H0 t)`,
//! like the PT-symmetric `H_pt` alone. This crate builds the operators,
//! certifies such splits numerically, and locates exceptional points along
//! parameter sweeps in both frames.

// Negated float comparisons below are deliberate: they also reject NaN.
// Index loops are kept where they mirror the textbook dense kernels.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod algebra;
pub mod error;
pub mod frames;
pub mod models;
pub mod spectra;
pub mod symmetry;

pub use error::{Error, Result};
