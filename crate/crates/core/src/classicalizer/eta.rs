// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use super::nonlinear::Nonlinear;
use crate::dynamics::step_plan;
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::madelung::{quantum_potential_masked, DEALIAS_FRACTION, NODE_FLOOR};
use crate::rng::stream_rng;
use crate::schrodinger::{check_leakage, check_time_step, HamiltonianSpec};
use crate::wave::WaveFunction;

/// Environmental term `eta = -(1 - deficit) V_Q psi + noise`.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaField {
    grid: Grid1D,
    values: Vec<Complex64>,
    deficit: f64,
    stochastic_amplitude: f64,
    seed: u64,
}

impl EtaField {
    pub fn new(grid: Grid1D, deficit: f64, stochastic_amplitude: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&deficit) {
            return Err(Error::InvalidParameter(format!("deficit must lie in [0, 1], got {deficit}")));
        }
        if !(stochastic_amplitude >= 0.0 && stochastic_amplitude.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "stochastic amplitude must be >= 0, got {stochastic_amplitude}"
            )));
        }
        let values = vec![Complex64::new(0.0, 0.0); grid.points()];
        Ok(Self { grid, values, deficit, stochastic_amplitude, seed })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    /// Deterministic part of `eta` at the last evaluated state.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn deficit(&self) -> f64 {
        self.deficit
    }

    pub fn stochastic_amplitude(&self) -> f64 {
        self.stochastic_amplitude
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn refresh(&mut self, engine: &Nonlinear, psi: &[Complex64]) {
        let c = -(1.0 - self.deficit);
        let vq = quantum_potential_masked(engine.spectral(), psi, engine.mass(), NODE_FLOOR);
        self.values = psi.iter().zip(&vq).map(|(z, v)| c * v * z).collect();
    }
}

/// One record of the divergence series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceRecord {
    pub t: f64,
    /// `|| psi_eta - psi_lin ||`.
    pub distance: f64,
    pub norm: f64,
    pub min_rho: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EtaRun {
    pub psi: WaveFunction,
    pub linear: WaveFunction,
    pub divergence: Vec<DivergenceRecord>,
    /// The field with `values` evaluated at the final state.
    pub eta: EtaField,
}

fn record(t: f64, psi: &[Complex64], lin: &[Complex64], dx: f64) -> DivergenceRecord {
    let distance = (psi.iter().zip(lin).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>() * dx).sqrt();
    let norm = (psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx).sqrt();
    let min_rho = psi.iter().map(|z| z.norm_sqr()).fold(f64::INFINITY, f64::min);
    DivergenceRecord { t, distance, norm, min_rho }
}

/// Evolves `i hbar psi_t = H psi + V_Q psi + eta` next to the linear evolution
/// of the same `psi0`. The deterministic part of `eta` enters as the
/// potential `deficit V_Q`; the noise adds `-i (a / hbar) sqrt(dt) xi` per
/// step with complex unit Gaussian `xi` projected onto `|p| <= (2/3) p_max`,
/// followed by renormalisation.
pub fn evolve_with_eta(spec: &HamiltonianSpec, psi0: &WaveFunction, eta: &EtaField, dt: f64, t_end: f64) -> Result<EtaRun> {
    spec.grid.check_matches(psi0.grid())?;
    spec.grid.check_matches(eta.grid())?;
    let (steps, h) = step_plan(dt, t_end)?;
    check_time_step(spec, dt)?;
    let engine = Nonlinear::new(spec, h, eta.deficit, "evolve_with_eta")?;
    let linear = Nonlinear::new(spec, h, 0.0, "evolve_with_eta")?;
    check_leakage(psi0, engine.spectral())?;

    let dx = spec.grid.spacing();
    let hbar = spec.hbar().value();
    let norm0 = psi0.norm();
    let noisy = eta.stochastic_amplitude > 0.0;
    let kick = eta.stochastic_amplitude / hbar * h.sqrt() * std::f64::consts::FRAC_1_SQRT_2;
    let mut rng = stream_rng(eta.seed, 0);
    let cutoff = DEALIAS_FRACTION * spec.grid.p_max();

    let mut psi = psi0.values().to_vec();
    let mut lin = psi.clone();
    let mut current = engine.effective_potential(&psi)?;
    let mut current_lin = linear.effective_potential(&lin)?;
    let mut series = Vec::with_capacity(steps + 1);
    series.push(record(0.0, &psi, &lin, dx));
    for n in 0..steps {
        engine.step(&mut psi, &mut current)?;
        linear.step(&mut lin, &mut current_lin)?;
        if noisy {
            let mut xi: Vec<Complex64> = (0..psi.len())
                .map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
                .collect();
            let spectral = engine.spectral();
            spectral.forward(&mut xi);
            for (z, &k) in xi.iter_mut().zip(spectral.wavenumbers()) {
                if (hbar * k).abs() > cutoff {
                    *z = Complex64::new(0.0, 0.0);
                }
            }
            spectral.inverse(&mut xi);
            for (z, x) in psi.iter_mut().zip(&xi) {
                *z += Complex64::new(0.0, -kick) * x;
            }
            let norm = (psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx).sqrt();
            psi.iter_mut().for_each(|z| *z *= norm0 / norm);
            current = engine.effective_potential(&psi)?;
        }
        series.push(record((n + 1) as f64 * h, &psi, &lin, dx));
    }
    let mut eta = eta.clone();
    eta.refresh(&engine, &psi);
    Ok(EtaRun {
        psi: WaveFunction::new(spec.grid, psi)?,
        linear: WaveFunction::new(spec.grid, lin)?,
        divergence: series,
        eta,
    })
}

/// `-V_Q psi`, the term that turns the nonlinear equation into the linear one.
pub fn required_eta(psi: &WaveFunction, effective_mass: f64) -> Result<Vec<Complex64>> {
    let vq = crate::madelung::quantum_potential(psi, effective_mass)?;
    Ok(psi.values().iter().zip(&vq).map(|(z, v)| -v * z).collect())
}
