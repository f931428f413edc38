//! Simulation of two atoms in a leaky optical cavity: conditional (no-photon)
//! preparation of entangled pairs inside the decoherence-free subspace, the
//! single-qubit rotations and shelving readout used to measure spin
//! correlations, and the spin Bell statistic built from them.
//!
//! Units are fixed throughout the crate: `ħ = 1`, the atom-cavity coupling
//! `g` sets the frequency scale, and times are measured in `1/g`.
//!
//! Module map:
//! - [`hilbert`]: basis bookkeeping, state/operator/density types.
//! - [`propagate`], [`expm`], [`lindblad`]: the propagation engines.
//! - [`models`]: Hamiltonian and projector builders for both atom schemes.
//! - [`protocols`]: preparation pulses, rotations, shelving readout.
//! - [`bell`]: correlation functions and the Bell statistic.
//! - [`montecarlo`]: quantum-jump trajectories and the sampled experiment.

pub mod bell;
pub mod error;
pub mod expm;
pub mod hilbert;
pub mod lindblad;
pub mod models;
pub mod montecarlo;
pub mod propagate;
pub mod protocols;

pub use error::{Error, Result};
pub use hilbert::{
    basis_index, basis_labels, DensityMatrix, HilbertDims, OperatorMatrix, StateVector,
};
pub use num_complex::Complex64 as C64;
