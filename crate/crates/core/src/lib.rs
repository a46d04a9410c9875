//! Ground states and spectra of the two-photon quantum Rabi model
//!
//! ```text
//! H = ω a†a + (Ω/2) σx + g σz (a†² + a²)
//! ```
//!
//! Two independent routes are provided: exact diagonalization in a truncated
//! Fock basis ([`exact`]) and a variational expansion in frequency-shifted
//! Gaussian polarons ([`polaron`]). The remaining modules turn either kind of
//! state into observables, position-space spinors and effective potentials.
//!
//! Units: ħ = m = 1, energies in the same units as `omega`, positions in the
//! oscillator length of the bare mode.

pub mod eigen;
pub mod error;
pub mod exact;
pub mod grid;
pub mod model;
pub mod observables;
pub mod optim;
pub mod polaron;
pub mod potential;

pub use error::{Error, Result};
pub use model::{CutoffConvention, FockBasisSpec, HamiltonianMatrix, ModelParams, Sector, Spin};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
