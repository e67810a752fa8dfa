// SPDX-License-Identifier: Apache-2.0

//! Linear evolution `i hbar d psi/dt = H(Q, -i hbar d/dQ) psi` for the
//! separable two-species Hamiltonian and its harmonic approximation.
//!
//! `H = V(Q) + T(P)` has no mixed terms, so the quantized operator is
//! ordering-free: `V` acts pointwise on grid values and `T` acts as a
//! Fourier multiplier with `p = hbar k`.

mod diagnostics;
mod propagate;
mod spectrum;

pub use diagnostics::{coherent_state, commutator_check, uncertainty_report, CoherentStateSpec, UncertaintyReport};
pub use propagate::{evolve_linear, time_step_ratio, TIME_STEP_LIMIT};
pub(crate) use propagate::{check_time_step, SplitStep};
pub use spectrum::{harmonic_spectrum, hermite_functions, solve_spectrum, solve_spectrum_with, SolverOptions, SpectrumResult};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid1D, Spectral};
use crate::model::{FreeParticle, HarmonicApprox, MockPlanck, Separable, TwoSpeciesParams};
use crate::wave::WaveFunction;

/// Largest norm fraction allowed beyond `LEAKAGE_FRACTION * p_max`.
pub const LEAKAGE_TOLERANCE: f64 = 1e-10;
pub const LEAKAGE_FRACTION: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    /// `gamma alpha_1 (e^Q - Q) + gamma alpha_2 (e^P - P)`.
    LvFull,
    /// Quadratic expansion about the minimum.
    Harmonic,
    /// `P^2 / 2m` with the harmonic mass and no potential.
    Free,
}

/// Classical counterpart of a [`HamiltonianSpec`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Classical {
    Lv(TwoSpeciesParams),
    Harmonic(HarmonicApprox),
    Free(FreeParticle),
}

impl Separable for Classical {
    fn potential(&self, q: f64) -> f64 {
        match self {
            Self::Lv(h) => h.potential(q),
            Self::Harmonic(h) => h.potential(q),
            Self::Free(h) => h.potential(q),
        }
    }
    fn potential_d1(&self, q: f64) -> f64 {
        match self {
            Self::Lv(h) => h.potential_d1(q),
            Self::Harmonic(h) => h.potential_d1(q),
            Self::Free(h) => h.potential_d1(q),
        }
    }
    fn potential_d2(&self, q: f64) -> f64 {
        match self {
            Self::Lv(h) => h.potential_d2(q),
            Self::Harmonic(h) => h.potential_d2(q),
            Self::Free(h) => h.potential_d2(q),
        }
    }
    fn kinetic(&self, p: f64) -> f64 {
        match self {
            Self::Lv(h) => h.kinetic(p),
            Self::Harmonic(h) => h.kinetic(p),
            Self::Free(h) => h.kinetic(p),
        }
    }
    fn kinetic_d1(&self, p: f64) -> f64 {
        match self {
            Self::Lv(h) => h.kinetic_d1(p),
            Self::Harmonic(h) => h.kinetic_d1(p),
            Self::Free(h) => h.kinetic_d1(p),
        }
    }
    fn kinetic_d2(&self, p: f64) -> f64 {
        match self {
            Self::Lv(h) => h.kinetic_d2(p),
            Self::Harmonic(h) => h.kinetic_d2(p),
            Self::Free(h) => h.kinetic_d2(p),
        }
    }
    fn canonical_mass(&self) -> Option<f64> {
        match self {
            Self::Lv(h) => h.canonical_mass(),
            Self::Harmonic(h) => h.canonical_mass(),
            Self::Free(h) => h.canonical_mass(),
        }
    }
}

/// A quantized Hamiltonian on a periodic grid; `hbar` is the grid's.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianSpec {
    pub kind: PotentialKind,
    pub params: TwoSpeciesParams,
    pub grid: Grid1D,
}

impl HamiltonianSpec {
    pub fn new(kind: PotentialKind, params: TwoSpeciesParams, grid: Grid1D) -> Self {
        Self { kind, params, grid }
    }

    pub fn hbar(&self) -> MockPlanck {
        self.grid.hbar()
    }

    pub fn with_grid(&self, grid: Grid1D) -> Self {
        Self { grid, ..*self }
    }

    pub fn classical(&self) -> Classical {
        match self.kind {
            PotentialKind::LvFull => Classical::Lv(self.params),
            PotentialKind::Harmonic => Classical::Harmonic(self.params.harmonic()),
            PotentialKind::Free => Classical::Free(FreeParticle { mass: self.params.harmonic().effective_mass }),
        }
    }

    /// Mass of the canonical kinetic term; `None` for the exponential one.
    pub fn effective_mass(&self) -> Option<f64> {
        self.classical().canonical_mass()
    }

    /// `V(Q_j)` at the grid nodes.
    pub fn potential_values(&self) -> Vec<f64> {
        let h = self.classical();
        self.grid.nodes().into_iter().map(|q| h.potential(q)).collect()
    }

    /// `T(hbar k)` in FFT order.
    pub fn kinetic_symbol(&self) -> Vec<f64> {
        let h = self.classical();
        self.grid.momenta().into_iter().map(|p| h.kinetic(p)).collect()
    }
}

/// `H` applied to raw grid values without any guard.
#[derive(Debug, Clone)]
pub(crate) struct DiscreteHamiltonian {
    pub spectral: Spectral,
    pub potential: Vec<f64>,
    pub kinetic: Vec<f64>,
}

impl DiscreteHamiltonian {
    pub fn new(spec: &HamiltonianSpec) -> Self {
        Self { spectral: Spectral::new(&spec.grid), potential: spec.potential_values(), kinetic: spec.kinetic_symbol() }
    }

    pub fn apply(&self, values: &[Complex64]) -> Vec<Complex64> {
        let mut buf = values.to_vec();
        self.spectral.forward(&mut buf);
        for (z, &t) in buf.iter_mut().zip(&self.kinetic) {
            *z *= t;
        }
        self.spectral.inverse(&mut buf);
        for ((out, v), z) in buf.iter_mut().zip(&self.potential).zip(values) {
            *out += v * z;
        }
        buf
    }
}

pub(crate) fn check_leakage(psi: &WaveFunction, spectral: &Spectral) -> Result<()> {
    let weight = psi.momentum_weight_beyond(spectral, LEAKAGE_FRACTION);
    if weight > LEAKAGE_TOLERANCE {
        Err(Error::MomentumLeakage { weight })
    } else {
        Ok(())
    }
}

/// `V(Q) psi + F^{-1}[T(p) F[psi]]`.
pub fn apply_hamiltonian(spec: &HamiltonianSpec, psi: &WaveFunction) -> Result<WaveFunction> {
    spec.grid.check_matches(psi.grid())?;
    let h = DiscreteHamiltonian::new(spec);
    check_leakage(psi, &h.spectral)?;
    WaveFunction::new(spec.grid, h.apply(psi.values()))
}

/// `Re <psi, H psi> / <psi, psi>`.
pub fn energy_expectation(spec: &HamiltonianSpec, psi: &WaveFunction) -> Result<f64> {
    let hpsi = apply_hamiltonian(spec, psi)?;
    Ok(psi.inner(&hpsi).re / psi.norm_sqr())
}
