// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dynamics::step_plan;
use crate::error::{Error, Result};
use crate::grid::Spectral;
use crate::madelung::{compose_psi, unwrapped_phase, MadelungFields};
use crate::model::Separable;
use crate::schrodinger::HamiltonianSpec;

/// Lowest number of characteristics launched from the density support.
pub const MIN_SAMPLES: usize = 1000;
/// Number of characteristics aimed for in the support.
const SAMPLE_TARGET: usize = 4 * MIN_SAMPLES;
/// Relative density below which a point lies outside the support.
const SUPPORT_LEVEL: f64 = 1e-12;

/// Characteristics of the Hamilton-Jacobi flow, ordered by initial position.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleState {
    pub t: f64,
    pub positions: Vec<f64>,
    pub momenta: Vec<f64>,
    pub actions: Vec<f64>,
    /// `dQ_t / dQ_0`.
    pub jacobians: Vec<f64>,
    /// `rho_0 / |J|` along each characteristic.
    pub densities: Vec<f64>,
}

impl EnsembleState {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

#[derive(Debug, Clone, Copy)]
struct Sample {
    q: f64,
    p: f64,
    s: f64,
    dq: f64,
    dp: f64,
}

fn derivs<H: Separable>(h: &H, x: &Sample) -> Sample {
    let tp = h.kinetic_d1(x.p);
    Sample {
        q: tp,
        p: -h.potential_d1(x.q),
        s: x.p * tp - h.energy(x.q, x.p),
        dq: h.kinetic_d2(x.p) * x.dp,
        dp: -h.potential_d2(x.q) * x.dq,
    }
}

fn axpy(x: &Sample, a: f64, k: &Sample) -> Sample {
    Sample { q: x.q + a * k.q, p: x.p + a * k.p, s: x.s + a * k.s, dq: x.dq + a * k.dq, dp: x.dp + a * k.dp }
}

fn rk4<H: Separable>(h: &H, x: &Sample, dt: f64) -> Sample {
    let k1 = derivs(h, x);
    let k2 = derivs(h, &axpy(x, 0.5 * dt, &k1));
    let k3 = derivs(h, &axpy(x, 0.5 * dt, &k2));
    let k4 = derivs(h, &axpy(x, dt, &k3));
    Sample {
        q: x.q + dt / 6.0 * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q),
        p: x.p + dt / 6.0 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p),
        s: x.s + dt / 6.0 * (k1.s + 2.0 * k2.s + 2.0 * k3.s + k4.s),
        dq: x.dq + dt / 6.0 * (k1.dq + 2.0 * k2.dq + 2.0 * k3.dq + k4.dq),
        dp: x.dp + dt / 6.0 * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp),
    }
}

/// Samples the support of `fields` on a refined grid and reads `P = S'` and
/// `S''` off the complex field, which stays periodic when `S` does not.
fn launch(fields: &MadelungFields) -> Result<(Vec<Sample>, Vec<f64>)> {
    let grid = *fields.grid();
    let m = grid.points();
    let hbar = grid.hbar().value();
    let spectral = Spectral::new(&grid);
    let psi = compose_psi(fields);
    let rho = fields.rho();
    let rho_max = rho.iter().fold(0.0f64, |a, &b| a.max(b));
    if rho_max == 0.0 {
        return Err(Error::DomainError("density vanishes identically".into()));
    }
    let coarse = rho.iter().filter(|&&r| r >= SUPPORT_LEVEL * rho_max).count();
    let factor = SAMPLE_TARGET.div_ceil(coarse).max(1);
    let fine_m = m * factor;
    let dx = grid.spacing() / factor as f64;

    let v = spectral.upsample(psi.values(), factor);
    let d1 = spectral.upsample(&spectral.derivative(psi.values(), 1), factor);
    let d2 = spectral.upsample(&spectral.derivative(psi.values(), 2), factor);
    let fine_rho: Vec<f64> = v.iter().map(|z| z.norm_sqr()).collect();
    let fine_max = fine_rho.iter().fold(0.0f64, |a, &b| a.max(b));
    let inside: Vec<bool> = fine_rho.iter().map(|&r| r >= SUPPORT_LEVEL * fine_max).collect();

    // The support must be one arc of the ring that leaves a gap.
    let starts: Vec<usize> = (0..fine_m).filter(|&i| inside[i] && !inside[(i + fine_m - 1) % fine_m]).collect();
    if starts.len() != 1 {
        return Err(Error::DomainError(format!(
            "density support must be a single interval short of the period, found {} pieces",
            starts.len()
        )));
    }
    let start = starts[0];
    let len = (0..fine_m).take_while(|&d| inside[(start + d) % fine_m]).count();
    if len < MIN_SAMPLES {
        return Err(Error::DomainError(format!("only {len} characteristics in the support")));
    }
    let order: Vec<usize> = (0..len).map(|d| (start + d) % fine_m).collect();
    let arc: Vec<Complex64> = order.iter().map(|&i| v[i]).collect();
    let phase = unwrapped_phase(&arc);

    // Align the action with the input at its densest node.
    let peak = (0..m).max_by(|&a, &b| rho[a].total_cmp(&rho[b])).expect("grid is non-empty");
    let peak_fine = order.iter().position(|&i| i == peak * factor).expect("densest node lies in the support");
    let offset = fields.action()[peak] - hbar * phase[peak_fine];

    let x0 = grid.node(0);
    let samples = order
        .iter()
        .zip(&phase)
        .enumerate()
        .map(|(d, (&i, &ph))| {
            let r1 = d1[i] / v[i];
            let r2 = d2[i] / v[i];
            Sample {
                q: x0 + (start + d) as f64 * dx,
                p: hbar * r1.im,
                s: hbar * ph + offset,
                dq: 1.0,
                dp: hbar * (r2 - r1 * r1).im,
            }
        })
        .collect();
    let densities = order.iter().map(|&i| fine_rho[i]).collect();
    Ok((samples, densities))
}

/// Integrates every characteristic of `fields0` under `spec` to `t_end`.
pub fn classical_ensemble(spec: &HamiltonianSpec, fields0: &MadelungFields, dt: f64, t_end: f64) -> Result<EnsembleState> {
    spec.grid.check_matches(fields0.grid())?;
    let (steps, h) = step_plan(dt, t_end)?;
    let hamiltonian = spec.classical();
    let (samples, rho0) = launch(fields0)?;
    let finals: Vec<Sample> = samples
        .par_iter()
        .enumerate()
        .map(|(k, x0)| {
            let mut x = *x0;
            for n in 0..steps {
                x = rk4(&hamiltonian, &x, h);
                if !(x.dq > 0.0) {
                    return Err(Error::CausticEncountered { t: (n + 1) as f64 * h, sample: k });
                }
            }
            Ok(x)
        })
        .collect::<Result<_>>()?;
    Ok(EnsembleState {
        t: steps as f64 * h,
        positions: finals.iter().map(|x| x.q).collect(),
        momenta: finals.iter().map(|x| x.p).collect(),
        actions: finals.iter().map(|x| x.s).collect(),
        jacobians: finals.iter().map(|x| x.dq).collect(),
        densities: finals.iter().zip(&rho0).map(|(x, r)| r / x.dq.abs()).collect(),
    })
}

/// Cubic Lagrange interpolation through the four samples around interval `i`.
fn lagrange(xs: &[f64], ys: &[f64], i: usize, x: f64) -> f64 {
    let n = xs.len();
    let lo = i.saturating_sub(1).min(n.saturating_sub(4));
    let idx = lo..(lo + 4).min(n);
    let mut acc = 0.0;
    for a in idx.clone() {
        let mut w = 1.0;
        for b in idx.clone() {
            if a != b {
                w *= (x - xs[b]) / (xs[a] - xs[b]);
            }
        }
        acc += w * ys[a];
    }
    acc
}

/// Cubic Hermite interpolation of `S` on `[x_i, x_{i+1}]` with slopes `P`.
fn hermite(x0: f64, x1: f64, s0: f64, s1: f64, p0: f64, p1: f64, x: f64) -> f64 {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let (t2, t3) = (t * t, t * t * t);
    (2.0 * t3 - 3.0 * t2 + 1.0) * s0 + (t3 - 2.0 * t2 + t) * h * p0 + (-2.0 * t3 + 3.0 * t2) * s1 + (t3 - t2) * h * p1
}

/// Transports `(rho, S)` along classical characteristics: `S` accumulates
/// `\int (P Q' - H) dt` and `rho` scales by `1 / |dQ_t / dQ_0|`. Positions are
/// folded back into the periodic box; the density vanishes off the image of
/// the initial support.
pub fn classical_characteristics(
    spec: &HamiltonianSpec,
    fields0: &MadelungFields,
    dt: f64,
    t_end: f64,
) -> Result<MadelungFields> {
    let state = classical_ensemble(spec, fields0, dt, t_end)?;
    let xs = &state.positions;
    if let Some(k) = xs.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::CausticEncountered { t: state.t, sample: k + 1 });
    }
    let grid = spec.grid;
    let l = grid.length();
    let (first, last) = (xs[0], xs[xs.len() - 1]);
    if last - first >= l {
        return Err(Error::DomainError("transported support exceeds the period".into()));
    }
    let mut rho = vec![0.0; grid.points()];
    let mut action = vec![0.0; grid.points()];
    for (j, x) in grid.nodes().into_iter().enumerate() {
        let x = x + l * ((first - x) / l).ceil();
        if x > last {
            continue;
        }
        let i = xs.partition_point(|&p| p <= x).saturating_sub(1).min(xs.len() - 2);
        rho[j] = lagrange(xs, &state.densities, i, x).max(0.0);
        action[j] = hermite(xs[i], xs[i + 1], state.actions[i], state.actions[i + 1], state.momenta[i], state.momenta[i + 1], x);
    }
    MadelungFields::new(grid, rho, action)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1D;
    use crate::model::{MockPlanck, TwoSpeciesParams};
    use crate::schrodinger::PotentialKind;
    use std::f64::consts::TAU;

    fn gaussian(q: f64, c: f64, sigma: f64) -> f64 {
        (-(q - c).powi(2) / (2.0 * sigma * sigma)).exp() / (sigma * TAU.sqrt())
    }

    #[test]
    fn free_motion_translates_rigidly() {
        let grid = Grid1D::new(2.0, 256, MockPlanck::new(0.01).unwrap()).unwrap();
        let params = TwoSpeciesParams::new(1.0, 1.0, 2.0).unwrap();
        let spec = HamiltonianSpec::new(PotentialKind::Free, params, grid);
        let mass = spec.effective_mass().unwrap();
        let p0 = 0.3;
        let f0 = MadelungFields::from_fn(grid, |q| gaussian(q, -0.2, 0.06), |q| p0 * q).unwrap();
        let t = 1.0;
        let out = classical_characteristics(&spec, &f0, 1e-2, t).unwrap();
        let shift = p0 / mass * t;
        for (j, q) in grid.nodes().into_iter().enumerate() {
            let exact = gaussian(q, -0.2 + shift, 0.06);
            assert!((out.rho()[j] - exact).abs() < 1e-6 * gaussian(0.0, 0.0, 0.06), "Q = {q}");
        }
    }

    #[test]
    fn focusing_bundle_hits_a_caustic() {
        let grid = Grid1D::new(2.0, 256, MockPlanck::new(0.01).unwrap()).unwrap();
        let spec = HamiltonianSpec::new(PotentialKind::Harmonic, TwoSpeciesParams::new(1.0, 1.0, 1.0).unwrap(), grid);
        let f0 = MadelungFields::from_fn(grid, |q| gaussian(q, 0.0, 0.05), |_| 0.0).unwrap();
        // All momenta vanish, so every characteristic reaches Q = 0 at T/4.
        let quarter = spec.params.harmonic().period() / 4.0;
        assert!(classical_characteristics(&spec, &f0, 1e-3, 0.9 * quarter).is_ok());
        assert!(matches!(
            classical_characteristics(&spec, &f0, 1e-3, 1.1 * quarter),
            Err(Error::CausticEncountered { .. })
        ));
    }

    #[test]
    fn multi_piece_support_is_rejected() {
        let grid = Grid1D::new(2.0, 256, MockPlanck::new(0.01).unwrap()).unwrap();
        let spec = HamiltonianSpec::new(PotentialKind::Harmonic, TwoSpeciesParams::new(1.0, 1.0, 1.0).unwrap(), grid);
        let f0 = MadelungFields::from_fn(grid, |q| gaussian(q, -0.5, 0.02) + gaussian(q, 0.5, 0.02), |_| 0.0).unwrap();
        assert!(matches!(classical_characteristics(&spec, &f0, 1e-2, 0.1), Err(Error::DomainError(_))));
    }
}
