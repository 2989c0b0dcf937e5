//! Variational ground states and persistent currents of SU(N) Hubbard rings.
//!
//! The crate maps an N-color Hubbard ring threaded by a flux onto qubits,
//! prepares number-preserving variational circuits, optimizes them against
//! exact or sampled energies, and checks everything against a fermionic
//! exact-diagonalization oracle.
//!
//! Module map:
//!
//! - [`lattice`]: model parameters and coupling bookkeeping
//! - [`fermion_ed`]: sector exact diagonalization (the oracle)
//! - [`pauli`]: Pauli strings and sums
//! - [`jw`]: fermion-to-qubit mapping and current operator
//! - [`circuit`]: statevector simulator
//! - [`ansatz`]: number-preserving circuits and their cost
//! - [`measurement`]: commuting groups and shot-based estimates
//! - [`vqe`]: optimizers and flux sweeps
//! - [`config`], [`cli`]: run configuration and the command-line front end

pub mod ansatz;
pub mod circuit;
pub mod cli;
pub mod config;
pub mod error;
pub mod fermion_ed;
pub mod jw;
pub mod lattice;
pub mod measurement;
pub mod pauli;
pub mod rng;
pub mod sparse;
pub mod vqe;

pub use error::{Error, Result};
pub use lattice::{HubbardModel, SpinSector};
