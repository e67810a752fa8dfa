// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64;

use super::{check_leakage, HamiltonianSpec, LEAKAGE_FRACTION, LEAKAGE_TOLERANCE};
use crate::dynamics::step_plan;
use crate::error::{Error, Result};
use crate::grid::Spectral;
use crate::wave::WaveFunction;

/// Upper bound on `dt max(|T|, |V|) / hbar`.
pub const TIME_STEP_LIMIT: f64 = 0.1;

/// `dt max(max|T|, max|V|) / hbar` over the grid.
pub fn time_step_ratio(spec: &HamiltonianSpec, dt: f64) -> f64 {
    let vmax = spec.potential_values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tmax = spec.kinetic_symbol().iter().fold(0.0f64, |m, t| m.max(t.abs()));
    dt * vmax.max(tmax) / spec.hbar().value()
}

pub(crate) fn check_time_step(spec: &HamiltonianSpec, dt: f64) -> Result<()> {
    let ratio = time_step_ratio(spec, dt);
    if ratio > TIME_STEP_LIMIT {
        Err(Error::TimeStepTooLarge { ratio, limit: TIME_STEP_LIMIT })
    } else {
        Ok(())
    }
}

/// Strang factors `e^{-i V h / 2 hbar} e^{-i T h / hbar} e^{-i V h / 2 hbar}`
/// for a fixed step `h`; the potential may change between steps.
#[derive(Debug, Clone)]
pub(crate) struct SplitStep {
    pub spectral: Spectral,
    kinetic_phase: Vec<Complex64>,
    cutoff: f64,
    pub h: f64,
    hbar: f64,
}

impl SplitStep {
    pub fn new(spec: &HamiltonianSpec, h: f64) -> Self {
        let hbar = spec.hbar().value();
        let kinetic_phase = spec.kinetic_symbol().iter().map(|&t| Complex64::from_polar(1.0, -t * h / hbar)).collect();
        Self {
            spectral: Spectral::new(&spec.grid),
            kinetic_phase,
            cutoff: LEAKAGE_FRACTION * spec.grid.p_max(),
            h,
            hbar,
        }
    }

    /// Multiplies by `exp(-i V fraction h / hbar)`.
    pub fn kick(&self, values: &mut [Complex64], potential: &[f64], fraction: f64) {
        let s = -fraction * self.h / self.hbar;
        for (z, &v) in values.iter_mut().zip(potential) {
            *z *= Complex64::from_polar(1.0, v * s);
        }
    }

    /// Full kinetic step; returns the norm fraction beyond the leakage cutoff.
    pub fn drift(&self, values: &mut [Complex64]) -> f64 {
        self.spectral.forward(values);
        let (mut outside, mut total) = (0.0, 0.0);
        for ((z, phase), &k) in values.iter_mut().zip(&self.kinetic_phase).zip(self.spectral.wavenumbers()) {
            let w = z.norm_sqr();
            total += w;
            if (self.hbar * k).abs() > self.cutoff {
                outside += w;
            }
            *z *= phase;
        }
        self.spectral.inverse(values);
        if total > 0.0 {
            outside / total
        } else {
            0.0
        }
    }

    /// Drift with the leakage guard applied.
    pub fn guarded_drift(&self, values: &mut [Complex64]) -> Result<()> {
        let weight = self.drift(values);
        if weight > LEAKAGE_TOLERANCE {
            Err(Error::MomentumLeakage { weight })
        } else {
            Ok(())
        }
    }
}

/// Strang split-step evolution of `psi0` over `[0, t_end]` in uniform steps of
/// at most `dt`.
pub fn evolve_linear(spec: &HamiltonianSpec, psi0: &WaveFunction, dt: f64, t_end: f64) -> Result<WaveFunction> {
    spec.grid.check_matches(psi0.grid())?;
    let (steps, h) = step_plan(dt, t_end)?;
    check_time_step(spec, dt)?;
    let stepper = SplitStep::new(spec, h);
    check_leakage(psi0, &stepper.spectral)?;
    let potential = spec.potential_values();
    let mut values = psi0.values().to_vec();
    for _ in 0..steps {
        stepper.kick(&mut values, &potential, 0.5);
        stepper.guarded_drift(&mut values)?;
        stepper.kick(&mut values, &potential, 0.5);
    }
    let out = WaveFunction::new(spec.grid, values)?;
    check_leakage(&out, &stepper.spectral)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1D;
    use crate::model::{MockPlanck, TwoSpeciesParams};
    use crate::schrodinger::{
        coherent_state, energy_expectation, harmonic_spectrum, solve_spectrum, CoherentStateSpec, PotentialKind,
    };

    fn harmonic(hbar: f64, length: f64, points: usize) -> HamiltonianSpec {
        let grid = Grid1D::new(length, points, MockPlanck::new(hbar).unwrap()).unwrap();
        HamiltonianSpec::new(PotentialKind::Harmonic, TwoSpeciesParams::new(1.0, 1.0, 1.0).unwrap(), grid)
    }

    fn safe_dt(spec: &HamiltonianSpec) -> f64 {
        0.999 * TIME_STEP_LIMIT / time_step_ratio(spec, 1.0)
    }

    #[test]
    fn zero_time_is_identity() {
        let s = harmonic(0.02, 3.0, 128);
        let psi = harmonic_spectrum(&s.params, &s.grid, 0).unwrap().states.remove(0);
        assert_eq!(evolve_linear(&s, &psi, safe_dt(&s), 0.0).unwrap(), psi);
    }

    #[test]
    fn oversized_step_is_rejected() {
        let s = harmonic(0.02, 3.0, 128);
        let psi = harmonic_spectrum(&s.params, &s.grid, 0).unwrap().states.remove(0);
        let dt = 1.5 * safe_dt(&s);
        assert!(matches!(evolve_linear(&s, &psi, dt, 1.0), Err(Error::TimeStepTooLarge { .. })));
        assert!(evolve_linear(&s, &psi, 0.0, 1.0).is_err());
    }

    #[test]
    fn eigenstates_only_acquire_a_phase() {
        let grid = Grid1D::new(5.0, 128, MockPlanck::new(0.04).unwrap()).unwrap();
        let s = HamiltonianSpec::new(PotentialKind::LvFull, TwoSpeciesParams::new(1.0, 1.0, 1.0).unwrap(), grid);
        let spectrum = solve_spectrum(&s, 3).unwrap();
        let dt = safe_dt(&s);
        for psi in &spectrum.states {
            let out = evolve_linear(&s, psi, dt, 0.5).unwrap();
            assert!((psi.overlap(&out) - 1.0).abs() <= 1e-8);
        }
    }

    #[test]
    fn coherent_state_revives_after_one_period() {
        let s = harmonic(0.01, 3.0, 256);
        let psi = coherent_state(&s.params, &s.grid, CoherentStateSpec::new(0.4, 0.3).unwrap()).unwrap();
        let period = s.params.harmonic().period();
        let out = evolve_linear(&s, &psi, safe_dt(&s), period).unwrap();
        assert!(psi.overlap(&out) >= 1.0 - 1e-6, "overlap {}", psi.overlap(&out));
    }

    #[test]
    fn norm_and_energy_are_conserved_over_many_steps() {
        let s = harmonic(0.01, 3.0, 256);
        let psi = coherent_state(&s.params, &s.grid, CoherentStateSpec::new(0.3, 0.0).unwrap()).unwrap();
        let dt = safe_dt(&s);
        let e0 = energy_expectation(&s, &psi).unwrap();
        let out = evolve_linear(&s, &psi, dt, 1e4 * dt).unwrap();
        assert!((out.norm() - psi.norm()).abs() <= 1e-9);
        let e1 = energy_expectation(&s, &out).unwrap();
        assert!(((e1 - e0) / e0).abs() <= 1e-8, "drift {}", (e1 - e0) / e0);
    }

    #[test]
    fn split_step_is_second_order() {
        let grid = Grid1D::new(5.0, 128, MockPlanck::new(0.04).unwrap()).unwrap();
        let s = HamiltonianSpec::new(PotentialKind::LvFull, TwoSpeciesParams::new(1.0, 1.0, 1.0).unwrap(), grid);
        let psi = coherent_state(&s.params, &s.grid, CoherentStateSpec::new(0.5, 0.0).unwrap()).unwrap();
        let t = 1.0;
        let dt = safe_dt(&s);
        let reference = evolve_linear(&s, &psi, dt / 32.0, t).unwrap();
        let coarse = evolve_linear(&s, &psi, dt / 2.0, t).unwrap().distance(&reference);
        let fine = evolve_linear(&s, &psi, dt / 4.0, t).unwrap().distance(&reference);
        let ratio = coarse / fine;
        assert!((ratio - 4.0).abs() < 0.6, "ratio {ratio}");
    }
}
