// SPDX-License-Identifier: Apache-2.0

//! The nonlinear equation `i hbar psi_t = H psi + V_Q(psi) psi`, which is the
//! classical Hamilton-Jacobi and continuity pair written for
//! `psi = sqrt(rho) exp(i S / hbar)`; its method-of-characteristics oracle;
//! and the environmental term `eta` whose cancellation of `V_Q psi` leaves
//! the linear equation.
//!
//! The density of a solution does not depend on `hbar`. The nonlinear solver
//! requires a canonical `P^2 / 2m` kinetic term.

mod characteristics;
mod eta;
mod formulas;
mod nonlinear;

pub use characteristics::{classical_characteristics, classical_ensemble, EnsembleState, MIN_SAMPLES};
pub use eta::{evolve_with_eta, required_eta, DivergenceRecord, EtaField, EtaRun};
pub use formulas::{
    quantum_potential_harmonic, quantum_potential_harmonic_at, required_eta_harmonic, HarmonicState, QpForm,
};
pub use nonlinear::{bohmian_trajectory, bohmian_velocity, evolve_psi_equation, evolve_psi_equation_observed};
