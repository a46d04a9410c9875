//! Ground-state expectation values from either backend.

use serde::Serialize;

use crate::exact::FockState;
use crate::model::{ModelParams, Spin};
use crate::polaron::{kinetic, moment_x2, overlap, VariationalSolution};

#[derive(Clone, Debug, PartialEq)]
pub enum GroundState {
    Fock(FockState),
    Polaron(VariationalSolution),
}

/// A normalized ground state together with the parameters it belongs to.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundStateHandle {
    pub params: ModelParams,
    pub state: GroundState,
}

impl GroundStateHandle {
    pub fn fock(params: ModelParams, state: FockState) -> Self {
        Self {
            params,
            state: GroundState::Fock(state),
        }
    }

    pub fn polaron(solution: VariationalSolution) -> Self {
        Self {
            params: solution.params,
            state: GroundState::Polaron(solution),
        }
    }

    pub fn energy(&self) -> f64 {
        match &self.state {
            GroundState::Fock(s) => s.energy,
            GroundState::Polaron(s) => s.energy,
        }
    }
}

// Kernel arguments are positive by construction inside a solution.
fn k_overlap(a: f64, b: f64) -> f64 {
    overlap(a, b).expect("positive frequencies")
}
fn k_x2(a: f64, b: f64) -> f64 {
    moment_x2(a, b).expect("positive frequencies")
}
fn k_p2(a: f64, b: f64) -> f64 {
    kinetic(a, b).expect("positive frequencies")
}

/// ⟨σx⟩
pub fn sigma_x(handle: &GroundStateHandle) -> f64 {
    match &handle.state {
        GroundState::Fock(s) => s
            .basis
            .photon_numbers()
            .map(|n| 2.0 * s.coefficient(n, Spin::Up) * s.coefficient(n, Spin::Down))
            .sum(),
        GroundState::Polaron(s) => -s.ansatz.channel_overlap(),
    }
}

/// ⟨a†a⟩
pub fn mean_photon_number(handle: &GroundStateHandle) -> f64 {
    match &handle.state {
        GroundState::Fock(s) => s
            .basis
            .photon_numbers()
            .map(|n| {
                let (u, d) = (s.coefficient(n, Spin::Up), s.coefficient(n, Spin::Down));
                n as f64 * (u * u + d * d)
            })
            .sum(),
        GroundState::Polaron(s) => {
            let (p, m) = s
                .ansatz
                .channel_expectations(|a, b| 0.5 * (k_x2(a, b) + k_p2(a, b) - k_overlap(a, b)));
            0.5 * (p + m)
        }
    }
}

/// ⟨σz (a†² + a²)⟩
pub fn coupling_correlation(handle: &GroundStateHandle) -> f64 {
    match &handle.state {
        GroundState::Fock(s) => {
            let mut total = 0.0;
            for spin in [Spin::Up, Spin::Down] {
                let part: f64 = s
                    .basis
                    .photon_numbers()
                    .map(|n| {
                        let ladder = (((n + 1) * (n + 2)) as f64).sqrt();
                        2.0 * ladder * s.coefficient(n, spin) * s.coefficient(n + 2, spin)
                    })
                    .sum();
                total += spin.sign() * part;
            }
            total
        }
        GroundState::Polaron(s) => {
            let (p, m) = s.ansatz.channel_expectations(|a, b| k_x2(a, b) - k_p2(a, b));
            0.5 * (p - m)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Observables {
    pub energy: f64,
    pub sigma_x: f64,
    pub mean_photon_number: f64,
    pub coupling_correlation: f64,
}

impl Observables {
    pub fn of(handle: &GroundStateHandle) -> Self {
        Self {
            energy: handle.energy(),
            sigma_x: sigma_x(handle),
            mean_photon_number: mean_photon_number(handle),
            coupling_correlation: coupling_correlation(handle),
        }
    }

    /// `ω⟨a†a⟩ + (Ω/2)⟨σx⟩ + g⟨σz(a†²+a²)⟩ − E`; zero whenever the stored
    /// energy is the expectation value of H in the state.
    pub fn closure_residual(&self, params: &ModelParams) -> f64 {
        params.omega() * self.mean_photon_number
            + 0.5 * params.tunneling() * self.sigma_x
            + params.coupling() * self.coupling_correlation
            - self.energy
    }
}
