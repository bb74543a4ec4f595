//! Simulation of quantum emitters coupled to a two-dimensional bosonic bath.
//!
//! The bath is reduced to a quasi-one-dimensional strip by a block-Lanczos
//! transformation run independently in each reflection-symmetry sector, and
//! the resulting chain is evolved in real time with a matrix product state
//! ansatz. Exact single-excitation, small-system and Markovian reference
//! solvers are included for verification.

extern crate blas_src;

pub mod bath;
pub mod numerics;

pub use numerics::{hermitian_eig, sym_eig, thin_qr, thin_qr_real, unitary_exp};
