// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid1D, Spectral};
use crate::model::TwoSpeciesParams;
use crate::wave::WaveFunction;

/// Position and momentum spreads of a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyReport {
    pub delta_q: f64,
    pub delta_p: f64,
    pub product: f64,
    /// `product >= hbar / 2 (1 - 1e-6)`.
    pub satisfies_bound: bool,
}

/// Spreads from grid quadrature in `Q` and spectral quadrature in `P`.
pub fn uncertainty_report(psi: &WaveFunction) -> UncertaintyReport {
    let grid = psi.grid();
    let density = psi.density();
    let total: f64 = density.iter().sum();
    let (mut q1, mut q2) = (0.0, 0.0);
    for (&r, q) in density.iter().zip(grid.nodes()) {
        q1 += r * q;
        q2 += r * q * q;
    }
    let (q1, q2) = (q1 / total, q2 / total);

    let spectral = Spectral::new(grid);
    let mut spec = psi.values().to_vec();
    spectral.forward(&mut spec);
    let (mut w, mut p1, mut p2) = (0.0, 0.0, 0.0);
    for (z, p) in spec.iter().zip(grid.momenta()) {
        let a = z.norm_sqr();
        w += a;
        p1 += a * p;
        p2 += a * p * p;
    }
    let (p1, p2) = (p1 / w, p2 / w);

    let delta_q = (q2 - q1 * q1).max(0.0).sqrt();
    let delta_p = (p2 - p1 * p1).max(0.0).sqrt();
    let product = delta_q * delta_p;
    UncertaintyReport {
        delta_q,
        delta_p,
        product,
        satisfies_bound: product >= 0.5 * grid.hbar().value() * (1.0 - 1e-6),
    }
}

/// `|| (Q P - P Q) psi - i hbar psi || / || psi ||` with `P = -i hbar d/dQ`
/// applied spectrally. Only meaningful for states that vanish near the edges,
/// since `Q` is discontinuous across the periodic boundary.
pub fn commutator_check(grid: &Grid1D, psi: &WaveFunction) -> Result<f64> {
    grid.check_matches(psi.grid())?;
    let spectral = Spectral::new(grid);
    let hbar = grid.hbar().value();
    let x = grid.nodes();
    let p = |v: &[Complex64]| -> Vec<Complex64> {
        spectral.derivative(v, 1).into_iter().map(|z| Complex64::new(0.0, -hbar) * z).collect()
    };
    let qpsi: Vec<Complex64> = psi.values().iter().zip(&x).map(|(z, &q)| z * q).collect();
    let ppsi = p(psi.values());
    let pqpsi = p(&qpsi);
    let deviation: f64 = ppsi
        .iter()
        .zip(&pqpsi)
        .zip(&x)
        .zip(psi.values())
        .map(|(((a, b), &q), z)| (q * a - b - Complex64::new(0.0, hbar) * z).norm_sqr())
        .sum();
    Ok((deviation * grid.spacing()).sqrt() / psi.norm())
}

/// Centre oscillation `Q_c(t) = A cos(omega t + phase)` of a harmonic coherent state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentStateSpec {
    pub amplitude: f64,
    pub phase: f64,
}

impl CoherentStateSpec {
    pub fn new(amplitude: f64, phase: f64) -> Result<Self> {
        if !(amplitude.is_finite() && phase.is_finite()) {
            return Err(Error::NonFinite("CoherentStateSpec::new"));
        }
        Ok(Self { amplitude, phase })
    }

    /// Classical centre `(Q_c, P_c)` at time `t`.
    pub fn centre(&self, params: &TwoSpeciesParams, t: f64) -> (f64, f64) {
        let ha = params.harmonic();
        let arg = ha.frequency * t + self.phase;
        (self.amplitude * arg.cos(), -ha.effective_mass * ha.frequency * self.amplitude * arg.sin())
    }
}

/// Harmonic ground state displaced to the centre of `spec` at `t = 0`.
pub fn coherent_state(params: &TwoSpeciesParams, grid: &Grid1D, spec: CoherentStateSpec) -> Result<WaveFunction> {
    let quarter = grid.length() / 4.0;
    if spec.amplitude.abs() > quarter {
        return Err(Error::GridTooSmall { turning_point: spec.amplitude.abs(), quarter });
    }
    let ha = params.harmonic();
    let hbar = grid.hbar().value();
    let a = ha.effective_mass * ha.frequency / hbar;
    let (qc, pc) = spec.centre(params, 0.0);
    let pref = (a / std::f64::consts::PI).powf(0.25);
    WaveFunction::from_fn(*grid, |q| Complex64::from_polar(pref * (-0.5 * a * (q - qc).powi(2)).exp(), pc * (q - qc) / hbar))
}
