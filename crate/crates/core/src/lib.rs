//! Entanglement cooling of transverse-field Ising ground states.
//!
//! The crate is `no_std` (with `alloc`): it holds the numerical kernels and
//! leaves IO, threading and the command line to the `entcool` companion crate.

#![no_std]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod cooling;
pub mod entanglement;
pub mod error;
pub mod ising;
pub mod lanczos;
pub mod linalg;
pub mod spectrum;
pub mod state;

pub use error::{Error, Result};
pub use ising::{
    build_hamiltonian, classify_phase, ground_state, ground_state_with, ChainSpec, GroundState,
    GroundStateOptions, HamiltonianMatrix, PhaseLabel,
};
pub use state::{two_site_unitary, GateKind, GateSet, StateVector, TwoSiteGate, DEFAULT_DT};
