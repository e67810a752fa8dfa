// SPDX-License-Identifier: Apache-2.0

//! Closed-form density-curvature terms of the harmonic approximation, in the
//! de Broglie-Bohm sign convention `Q_B = -(hbar^2 / 2m) R'' / R`.
//!
//! [`QpForm::Literal`] follows the textbook-style expressions literally:
//! `hbar omega (n + 1/2) - omega Q^2 / 2` for the stationary state `n` and
//! `-(gamma^2 / 2) alpha_1 alpha_2 (Q - A cos(omega t + phase))^2 + hbar omega / 2`
//! for the coherent state. [`QpForm::Corrected`] follows from the Hermite
//! and displaced-Gaussian amplitudes with `m = 1 / (gamma alpha_2)`, which
//! replaces both quadratic coefficients by the spring constant `k = gamma alpha_1`.

use num_complex::Complex64;

use crate::grid::Grid1D;
use crate::model::TwoSpeciesParams;
use crate::schrodinger::CoherentStateSpec;
use crate::wave::WaveFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QpForm {
    Literal,
    Corrected,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HarmonicState {
    Stationary { n: usize },
    Coherent { spec: CoherentStateSpec, t: f64 },
}

/// `Q_B(Q)` of a harmonic state at one point.
pub fn quantum_potential_harmonic_at(params: &TwoSpeciesParams, hbar: f64, state: HarmonicState, form: QpForm, q: f64) -> f64 {
    let ha = params.harmonic();
    let omega = ha.frequency;
    let curvature = match form {
        QpForm::Literal => match state {
            HarmonicState::Stationary { .. } => omega,
            HarmonicState::Coherent { .. } => omega * omega,
        },
        QpForm::Corrected => ha.spring_constant(),
    };
    match state {
        HarmonicState::Stationary { n } => hbar * omega * (n as f64 + 0.5) - 0.5 * curvature * q * q,
        HarmonicState::Coherent { spec, t } => {
            let centre = spec.amplitude * (omega * t + spec.phase).cos();
            -0.5 * curvature * (q - centre).powi(2) + 0.5 * hbar * omega
        }
    }
}

/// [`quantum_potential_harmonic_at`] at every grid node.
pub fn quantum_potential_harmonic(params: &TwoSpeciesParams, grid: &Grid1D, state: HarmonicState, form: QpForm) -> Vec<f64> {
    let hbar = grid.hbar().value();
    grid.nodes().into_iter().map(|q| quantum_potential_harmonic_at(params, hbar, state, form, q)).collect()
}

/// The cancelling term `eta = -V_Q psi = Q_B psi` from the corrected closed form.
pub fn required_eta_harmonic(params: &TwoSpeciesParams, psi: &WaveFunction, state: HarmonicState) -> Vec<Complex64> {
    let qb = quantum_potential_harmonic(params, psi.grid(), state, QpForm::Corrected);
    psi.values().iter().zip(&qb).map(|(z, b)| b * z).collect()
}
