//! Simulation and post-processing toolkit for a two-qubit variational
//! eigensolver of molecular hydrogen with symmetry-verification error
//! mitigation.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::suspicious_arithmetic_impl)]

pub mod commands;
pub mod config;
pub mod error;
pub mod hamiltonian;
pub mod pauli;
pub mod positivity;
pub mod random_states;
pub mod seeds;
pub mod simulator;
pub mod symmetry;
pub mod tomography;
pub mod vqe;

pub use error::{Error, Result};
