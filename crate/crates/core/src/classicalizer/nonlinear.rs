// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64;

use crate::dynamics::step_plan;
use crate::error::{Error, Result};
use crate::grid::Spectral;
use crate::madelung::{quantum_potential_masked, NODE_FLOOR};
use crate::schrodinger::{check_leakage, check_time_step, HamiltonianSpec, SplitStep};
use crate::wave::WaveFunction;

/// Amplitude, relative to the maximum, that marks the bulk of a state.
const BULK_LEVEL: f64 = 1e-3;
/// Largest per-step growth of `max rho` or shrinkage of the support.
const COLLAPSE_FACTOR: f64 = 10.0;

/// Fails if a sub-floor point sits between two bulk points, i.e. inside any
/// gap of the bulk other than the widest one, which holds the tails.
pub(crate) fn check_interior_nodes(values: &[Complex64]) -> Result<()> {
    let amp: Vec<f64> = values.iter().map(|z| z.norm()).collect();
    let max = amp.iter().fold(0.0f64, |m, &a| m.max(a));
    if max == 0.0 {
        return Err(Error::NodeEncountered { index: 0, value: 0.0 });
    }
    let bulk: Vec<usize> = (0..amp.len()).filter(|&j| amp[j] >= BULK_LEVEL * max).collect();
    let m = amp.len();
    let gap = |i: usize| {
        let (a, b) = (bulk[i], bulk[(i + 1) % bulk.len()]);
        (a, (b + m - a) % m)
    };
    let widest = (0..bulk.len()).max_by_key(|&i| gap(i).1).unwrap_or(0);
    for i in (0..bulk.len()).filter(|&i| i != widest) {
        let (start, len) = gap(i);
        for d in 1..len {
            let j = (start + d) % m;
            if amp[j] < NODE_FLOOR * max {
                return Err(Error::NodeEncountered { index: j, value: amp[j] });
            }
        }
    }
    Ok(())
}

fn support_size(values: &[Complex64]) -> (usize, f64) {
    let rho_max = values.iter().fold(0.0f64, |m, z| m.max(z.norm_sqr()));
    let cut = NODE_FLOOR * NODE_FLOOR * rho_max;
    (values.iter().filter(|z| z.norm_sqr() >= cut).count(), rho_max)
}

/// Split-step propagator for `H + weight V_Q(psi)`; `weight = 0` is linear.
#[derive(Debug, Clone)]
pub(crate) struct Nonlinear {
    pub stepper: SplitStep,
    potential: Vec<f64>,
    mass: f64,
    weight: f64,
}

impl Nonlinear {
    pub fn new(spec: &HamiltonianSpec, h: f64, weight: f64, caller: &'static str) -> Result<Self> {
        let mass = spec.effective_mass().ok_or(Error::UnsupportedKinetic(caller))?;
        Ok(Self { stepper: SplitStep::new(spec, h), potential: spec.potential_values(), mass, weight })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn spectral(&self) -> &Spectral {
        &self.stepper.spectral
    }

    /// `V + weight V_Q(psi)` with `V_Q` masked below the node floor.
    pub fn effective_potential(&self, values: &[Complex64]) -> Result<Vec<f64>> {
        if self.weight == 0.0 {
            return Ok(self.potential.clone());
        }
        check_interior_nodes(values)?;
        let vq = quantum_potential_masked(&self.stepper.spectral, values, self.mass, NODE_FLOOR);
        Ok(self.potential.iter().zip(&vq).map(|(v, q)| v + self.weight * q).collect())
    }

    /// One Strang step. `current` holds the effective potential of `values`
    /// on entry and of the updated values on exit; the kicks leave `|psi|`
    /// unchanged, so the second half kick is evaluated at the new density.
    pub fn step(&self, values: &mut [Complex64], current: &mut Vec<f64>) -> Result<()> {
        self.stepper.kick(values, current, 0.5);
        self.stepper.guarded_drift(values)?;
        *current = self.effective_potential(values)?;
        self.stepper.kick(values, current, 0.5);
        Ok(())
    }
}

fn prepare(spec: &HamiltonianSpec, psi0: &WaveFunction, dt: f64, t_end: f64, weight: f64, caller: &'static str) -> Result<(usize, Nonlinear)> {
    spec.grid.check_matches(psi0.grid())?;
    let (steps, h) = step_plan(dt, t_end)?;
    check_time_step(spec, dt)?;
    let engine = Nonlinear::new(spec, h, weight, caller)?;
    check_leakage(psi0, engine.spectral())?;
    Ok((steps, engine))
}

/// Evolves the nonlinear equation `i hbar psi_t = H psi + V_Q(psi) psi`, observing
/// each accepted state (including the initial one) with its time.
pub fn evolve_psi_equation_observed<F>(
    spec: &HamiltonianSpec,
    psi0: &WaveFunction,
    dt: f64,
    t_end: f64,
    mut observe: F,
) -> Result<WaveFunction>
where
    F: FnMut(f64, &WaveFunction),
{
    let (steps, engine) = prepare(spec, psi0, dt, t_end, 1.0, "evolve_psi_equation")?;
    let h = engine.stepper.h;
    let mut values = psi0.values().to_vec();
    let mut current = engine.effective_potential(&values)?;
    let (mut support, mut rho_max) = support_size(&values);
    observe(0.0, psi0);
    for n in 0..steps {
        engine.step(&mut values, &mut current)?;
        let t = (n + 1) as f64 * h;
        let (s, r) = support_size(&values);
        if r > COLLAPSE_FACTOR * rho_max || (s as f64) * COLLAPSE_FACTOR < support as f64 {
            return Err(Error::CausticSuspected { t });
        }
        (support, rho_max) = (s, r);
        observe(t, &WaveFunction::new(spec.grid, values.clone())?);
    }
    let out = WaveFunction::new(spec.grid, values)?;
    check_leakage(&out, engine.spectral())?;
    Ok(out)
}

/// The nonlinear equation `i hbar psi_t = H psi + V_Q(psi) psi` by Strang
/// splitting with `V_Q` recomputed from the current density.
pub fn evolve_psi_equation(spec: &HamiltonianSpec, psi0: &WaveFunction, dt: f64, t_end: f64) -> Result<WaveFunction> {
    evolve_psi_equation_observed(spec, psi0, dt, t_end, |_, _| {})
}

/// Bohmian velocity `(hbar / m) Im(psi' / psi)` at `x` by trigonometric interpolation.
pub fn bohmian_velocity(spectral: &Spectral, psi: &WaveFunction, mass: f64, x: f64) -> f64 {
    let hbar = psi.grid().hbar().value();
    let mut a = psi.values().to_vec();
    spectral.forward(&mut a);
    let mut d: Vec<Complex64> = a.iter().zip(spectral.wavenumbers()).map(|(z, &k)| z * Complex64::new(0.0, k)).collect();
    d[spectral.grid().points() / 2] = Complex64::new(0.0, 0.0);
    let (v, dv) = (spectral.interpolate(&a, x), spectral.interpolate(&d, x));
    hbar / mass * (dv / v).im
}

/// Bohmian trajectory `dQ/dt = v(Q, t)` guided by the nonlinear evolution of
/// `psi0`, integrated with Heun's rule; returns `(t, Q)` at every step.
pub fn bohmian_trajectory(spec: &HamiltonianSpec, psi0: &WaveFunction, q0: f64, dt: f64, t_end: f64) -> Result<Vec<(f64, f64)>> {
    let mass = spec.effective_mass().ok_or(Error::UnsupportedKinetic("bohmian_trajectory"))?;
    let spectral = Spectral::new(&spec.grid);
    let mut path = vec![(0.0, q0)];
    let mut previous: Option<(f64, WaveFunction)> = None;
    evolve_psi_equation_observed(spec, psi0, dt, t_end, |t, psi| {
        if let Some((t0, old)) = previous.take() {
            let q = path.last().expect("path starts non-empty").1;
            let h = t - t0;
            let v0 = bohmian_velocity(&spectral, &old, mass, q);
            let guess = q + h * v0;
            let v1 = bohmian_velocity(&spectral, psi, mass, guess);
            path.push((t, q + 0.5 * h * (v0 + v1)));
        }
        previous = Some((t, psi.clone()));
    })?;
    Ok(path)
}
