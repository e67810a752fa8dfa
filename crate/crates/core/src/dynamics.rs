// SPDX-License-Identifier: Apache-2.0

//! Deterministic and stochastic integration of the Lotka-Volterra system,
//! plus action-angle diagnostics of the two-species orbits.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{fixed_point, CanonicalModel, LVParams, PhaseState, Separable, TwoSpeciesParams};
use crate::rng::stream_rng;

const OVERFLOW_GUARD: f64 = 1e150;

/// Number of uniform steps covering `[0, t_end]` with step at most `dt`.
pub fn step_plan(dt: f64, t_end: f64) -> Result<(usize, f64)> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidParameter(format!("t_end must be non-negative, got {t_end}")));
    }
    if t_end == 0.0 {
        return Ok((0, dt));
    }
    let n = ((t_end / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    Ok((n, t_end / n as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Rk4,
    /// Fourth-order triple-jump composition of leapfrog steps on the
    /// canonical pair; two species only.
    Symplectic,
    /// Strang-split leapfrog on the canonical pair; two species only.
    Leapfrog,
    /// Explicit Euler in z-coordinates, the noise-free limit of
    /// [`integrate_lv_stochastic`].
    Euler,
}

/// Sampled population trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub energy: Option<Vec<f64>>,
    pub warnings: Vec<String>,
}

impl Trajectory {
    fn with_capacity(n: usize) -> Self {
        Self {
            times: Vec::with_capacity(n),
            states: Vec::with_capacity(n),
            energy: None,
            warnings: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<&[f64]> {
        self.states.last().map(Vec::as_slice)
    }

    fn attach_energy(&mut self, params: &LVParams) {
        if params.species_count() != 2 {
            return;
        }
        if let Ok(model) = CanonicalModel::from_lv(params) {
            let energy = self
                .states
                .iter()
                .map(|n| model.to_phase(n, 0.0).map(|s| model.params.energy(s.q, s.p)).unwrap_or(f64::NAN))
                .collect();
            self.energy = Some(energy);
        }
    }
}

fn check_populations(n: &[f64], t: f64) -> Result<()> {
    if n.iter().all(|&x| x > 0.0 && x < OVERFLOW_GUARD && x.is_finite()) {
        Ok(())
    } else {
        Err(Error::BlowUp { t })
    }
}

fn check_initial(params: &LVParams, initial: &[f64]) -> Result<()> {
    if initial.len() != params.species_count() {
        return Err(Error::InvalidParameter("initial state has wrong dimension".into()));
    }
    if initial.iter().any(|&n| !(n > 0.0 && n.is_finite())) {
        return Err(Error::DomainError("initial populations must be positive".into()));
    }
    Ok(())
}

/// Integrates the population equations from `initial` over `[0, t_end]`.
pub fn integrate_lv(
    params: &LVParams,
    initial: &[f64],
    dt: f64,
    t_end: f64,
    method: Method,
) -> Result<Trajectory> {
    check_initial(params, initial)?;
    let (steps, h) = step_plan(dt, t_end)?;
    let mut traj = match method {
        Method::Rk4 => rk4_populations(params, initial, steps, h)?,
        Method::Symplectic | Method::Leapfrog => {
            let model = CanonicalModel::from_lv(params)?;
            let start = model.to_phase(initial, 0.0)?;
            let path = if method == Method::Symplectic {
                triple_jump(&model.params, start, steps, h)
            } else {
                leapfrog(&model.params, start, steps, h)
            };
            let mut traj = Trajectory::with_capacity(steps + 1);
            for s in path {
                let n = model.to_populations(&s);
                check_populations(&n, s.t)?;
                traj.times.push(s.t);
                traj.states.push(n.to_vec());
            }
            traj
        }
        Method::Euler => euler_z(params, initial, steps, h, |_, _, _| {})?,
    };
    traj.attach_energy(params);
    Ok(traj)
}

fn rk4_populations(params: &LVParams, initial: &[f64], steps: usize, h: f64) -> Result<Trajectory> {
    let m = params.species_count();
    let mut traj = Trajectory::with_capacity(steps + 1);
    let mut n = initial.to_vec();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m]);
    let mut tmp = vec![0.0; m];
    traj.times.push(0.0);
    traj.states.push(n.clone());
    for step in 0..steps {
        params.population_rhs(&n, &mut k1);
        for i in 0..m {
            tmp[i] = n[i] + 0.5 * h * k1[i];
        }
        params.population_rhs(&tmp, &mut k2);
        for i in 0..m {
            tmp[i] = n[i] + 0.5 * h * k2[i];
        }
        params.population_rhs(&tmp, &mut k3);
        for i in 0..m {
            tmp[i] = n[i] + h * k3[i];
        }
        params.population_rhs(&tmp, &mut k4);
        for i in 0..m {
            n[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let t = (step + 1) as f64 * h;
        check_populations(&n, t)?;
        traj.times.push(t);
        traj.states.push(n.clone());
    }
    Ok(traj)
}

/// Explicit Euler in z-coordinates; `kick` adds the stochastic increment.
fn euler_z<F>(params: &LVParams, initial: &[f64], steps: usize, h: f64, mut kick: F) -> Result<Trajectory>
where
    F: FnMut(usize, &[f64], &mut [f64]),
{
    let q = fixed_point(params)?;
    let m = params.species_count();
    let mut z: Vec<f64> = initial.iter().zip(&q).map(|(n, qi)| (n / qi).ln()).collect();
    let mut drift = vec![0.0; m];
    let mut noise = vec![0.0; m];
    let mut traj = Trajectory::with_capacity(steps + 1);
    traj.times.push(0.0);
    traj.states.push(initial.to_vec());
    for step in 0..steps {
        params.z_rhs(&q, &z, &mut drift);
        kick(step, &z, &mut noise);
        for i in 0..m {
            z[i] = z[i] + drift[i] * h + noise[i];
        }
        let t = (step + 1) as f64 * h;
        let n: Vec<f64> = z.iter().zip(&q).map(|(zi, qi)| qi * zi.exp()).collect();
        check_populations(&n, t)?;
        traj.times.push(t);
        traj.states.push(n);
    }
    Ok(traj)
}

/// Strang-split leapfrog (half kick, drift, half kick) for `H = V(Q) + T(P)`.
pub fn leapfrog_step<H: Separable + ?Sized>(hamiltonian: &H, state: &mut PhaseState, h: f64) {
    state.p -= 0.5 * h * hamiltonian.potential_d1(state.q);
    state.q += h * hamiltonian.kinetic_d1(state.p);
    state.p -= 0.5 * h * hamiltonian.potential_d1(state.q);
    state.t += h;
}

/// `steps + 1` samples of the leapfrog flow, including `start`.
pub fn leapfrog<H: Separable + ?Sized>(hamiltonian: &H, start: PhaseState, steps: usize, h: f64) -> Vec<PhaseState> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut s = start;
    out.push(s);
    for step in 0..steps {
        leapfrog_step(hamiltonian, &mut s, h);
        s.t = start.t + (step + 1) as f64 * h;
        out.push(s);
    }
    out
}

/// Fourth-order symmetric composition of three leapfrog sub-steps.
pub fn triple_jump_step<H: Separable + ?Sized>(hamiltonian: &H, state: &mut PhaseState, h: f64) {
    let w1 = 1.0 / (2.0 - 2f64.cbrt());
    let w0 = 1.0 - 2.0 * w1;
    for w in [w1, w0, w1] {
        leapfrog_step(hamiltonian, state, w * h);
    }
}

/// `steps + 1` samples of the triple-jump flow, including `start`.
pub fn triple_jump<H: Separable + ?Sized>(hamiltonian: &H, start: PhaseState, steps: usize, h: f64) -> Vec<PhaseState> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut s = start;
    out.push(s);
    for step in 0..steps {
        triple_jump_step(hamiltonian, &mut s, h);
        s.t = start.t + (step + 1) as f64 * h;
        out.push(s);
    }
    out
}

/// One classical RK4 step of Hamilton's equations.
pub fn rk4_canonical_step<H: Separable + ?Sized>(hamiltonian: &H, state: &mut PhaseState, h: f64) {
    let f = |q: f64, p: f64| (hamiltonian.kinetic_d1(p), -hamiltonian.potential_d1(q));
    let (q, p) = (state.q, state.p);
    let (a1, b1) = f(q, p);
    let (a2, b2) = f(q + 0.5 * h * a1, p + 0.5 * h * b1);
    let (a3, b3) = f(q + 0.5 * h * a2, p + 0.5 * h * b2);
    let (a4, b4) = f(q + h * a3, p + h * b3);
    state.q += h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
    state.p += h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
    state.t += h;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    None,
    /// `dz = f(z) dt + a dW`
    AdditiveGaussian,
    /// `dz = f(z) dt + a z dW`
    MultiplicativeGaussian,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub amplitude: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, amplitude: f64, seed: u64) -> Result<Self> {
        if !(amplitude >= 0.0 && amplitude.is_finite()) {
            return Err(Error::InvalidParameter(format!("noise amplitude must be >= 0, got {amplitude}")));
        }
        Ok(Self { kind, amplitude, seed })
    }
}

/// Above this value of `dt * amplitude^2` the Euler-Maruyama step is flagged.
pub const STEP_CONSISTENCY_WARN: f64 = 1e-2;

/// Euler-Maruyama (Ito) integration in z-coordinates on random stream 0.
pub fn integrate_lv_stochastic(
    params: &LVParams,
    initial: &[f64],
    dt: f64,
    t_end: f64,
    noise: NoiseSpec,
) -> Result<Trajectory> {
    integrate_lv_stochastic_stream(params, initial, dt, t_end, noise, 0)
}

/// As [`integrate_lv_stochastic`], drawing from stream `stream` of `noise.seed`.
pub fn integrate_lv_stochastic_stream(
    params: &LVParams,
    initial: &[f64],
    dt: f64,
    t_end: f64,
    noise: NoiseSpec,
    stream: u64,
) -> Result<Trajectory> {
    check_initial(params, initial)?;
    let (steps, h) = step_plan(dt, t_end)?;
    let mut rng = stream_rng(noise.seed, stream);
    let scale = noise.amplitude * h.sqrt();
    let active = noise.kind != NoiseKind::None && noise.amplitude > 0.0;
    let mut traj = euler_z(params, initial, steps, h, |_, z, out| {
        for (i, o) in out.iter_mut().enumerate() {
            *o = if active {
                let xi: f64 = StandardNormal.sample(&mut rng);
                match noise.kind {
                    NoiseKind::AdditiveGaussian => scale * xi,
                    NoiseKind::MultiplicativeGaussian => scale * z[i] * xi,
                    NoiseKind::None => 0.0,
                }
            } else {
                0.0
            };
        }
    })?;
    let consistency = h * noise.amplitude * noise.amplitude;
    if active && consistency > STEP_CONSISTENCY_WARN {
        traj.warnings.push(format!(
            "dt * amplitude^2 = {consistency:.3e} exceeds {STEP_CONSISTENCY_WARN:e}"
        ));
    }
    traj.attach_energy(params);
    Ok(traj)
}

/// Pointwise ensemble statistics of populations.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSummary {
    pub times: Vec<f64>,
    pub mean: Vec<Vec<f64>>,
    pub std_error: Vec<Vec<f64>>,
    pub runs: usize,
}

/// Runs `runs` independent realisations on streams `0..runs` in parallel.
pub fn ensemble(
    params: &LVParams,
    initial: &[f64],
    dt: f64,
    t_end: f64,
    noise: NoiseSpec,
    runs: usize,
) -> Result<EnsembleSummary> {
    if runs < 2 {
        return Err(Error::InvalidParameter("an ensemble needs at least two runs".into()));
    }
    let trajectories: Vec<Trajectory> = (0..runs as u64)
        .into_par_iter()
        .map(|stream| integrate_lv_stochastic_stream(params, initial, dt, t_end, noise, stream))
        .collect::<Result<_>>()?;
    let samples = trajectories[0].len();
    let m = params.species_count();
    let mut mean = vec![vec![0.0; m]; samples];
    let mut sq = vec![vec![0.0; m]; samples];
    for traj in &trajectories {
        for (k, state) in traj.states.iter().enumerate() {
            for i in 0..m {
                mean[k][i] += state[i];
                sq[k][i] += state[i] * state[i];
            }
        }
    }
    let r = runs as f64;
    let std_error = mean
        .iter_mut()
        .zip(&sq)
        .map(|(mk, sk)| {
            mk.iter_mut()
                .zip(sk)
                .map(|(mu, s2)| {
                    *mu /= r;
                    let var = ((s2 / r - *mu * *mu) * r / (r - 1.0)).max(0.0);
                    (var / r).sqrt()
                })
                .collect()
        })
        .collect();
    Ok(EnsembleSummary { times: trajectories[0].times.clone(), mean, std_error, runs })
}

/// Action and angular frequency of a closed two-species orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionAngle {
    /// `I = (1 / 2 pi) \oint P dQ`
    pub action: f64,
    pub angle_frequency: f64,
    pub period: f64,
}

/// Positive root of `e^x - x = c` for `c > 1`.
fn positive_branch(c: f64) -> f64 {
    let g = |x: f64| x.exp() - x - c;
    let (mut lo, mut hi) = (0.0, 1.0);
    while g(hi) < 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Action-angle diagnostics on the level set `H = energy`.
///
/// The orbit is launched on the Poincare section `Q = 0`, `P > 0` and
/// integrated with RK4 while accumulating `\oint P dQ`, until it crosses the
/// section again with positive velocity. The crossing is bracketed between
/// samples, located by linear interpolation, and refined by secant steps.
pub fn action_angle(params: &TwoSpeciesParams, energy: f64) -> Result<ActionAngle> {
    let e_min = params.minimum_energy();
    if !(energy > e_min && energy.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "energy {energy} must exceed the minimum {e_min}"
        )));
    }
    let (g, a1, a2) = (params.gamma, params.alpha1, params.alpha2);
    let p_top = positive_branch((energy - g * a1) / (g * a2));
    let q_right = positive_branch((energy - g * a2) / (g * a1));
    let curvature = (params.potential_d2(q_right) * params.kinetic_d2(p_top)).sqrt();
    let h = std::f64::consts::TAU / curvature / 4000.0;
    let t_max = 1000.0 * std::f64::consts::TAU / params.harmonic().frequency;

    // Augmented state (Q, P, A) with dA/dt = P dQ/dt.
    let rhs = |q: f64, p: f64| {
        let qdot = params.kinetic_d1(p);
        (qdot, -params.potential_d1(q), p * qdot)
    };
    let step = |s: (f64, f64, f64), h: f64| {
        let (q, p, a) = s;
        let k1 = rhs(q, p);
        let k2 = rhs(q + 0.5 * h * k1.0, p + 0.5 * h * k1.1);
        let k3 = rhs(q + 0.5 * h * k2.0, p + 0.5 * h * k2.1);
        let k4 = rhs(q + h * k3.0, p + h * k3.1);
        (
            q + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
            p + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
            a + h / 6.0 * (k1.2 + 2.0 * k2.2 + 2.0 * k3.2 + k4.2),
        )
    };

    let mut state = (0.0, p_top, 0.0);
    let mut t = 0.0;
    let mut left_section = false;
    while t < t_max {
        let next = step(state, h);
        if !(next.0.is_finite() && next.1.is_finite()) {
            break;
        }
        if next.0 < 0.0 {
            left_section = true;
        }
        if left_section && state.0 < 0.0 && next.0 >= 0.0 {
            // Linear interpolation, then secant refinement of the sub-step.
            let mut s0 = 0.0;
            let mut f0 = state.0;
            let mut s1 = h * (-state.0) / (next.0 - state.0);
            let mut end = step(state, s1);
            for _ in 0..8 {
                if end.0 == 0.0 || (end.0 - f0) == 0.0 {
                    break;
                }
                let s2 = s1 - end.0 * (s1 - s0) / (end.0 - f0);
                s0 = s1;
                f0 = end.0;
                s1 = s2;
                end = step(state, s1);
                if (s1 - s0).abs() < 1e-15 * h {
                    break;
                }
            }
            let period = t + s1;
            return Ok(ActionAngle {
                action: end.2 / std::f64::consts::TAU,
                angle_frequency: std::f64::consts::TAU / period,
                period,
            });
        }
        state = next;
        t += h;
    }
    Err(Error::OpenOrbit { energy, t_max })
}

/// Action of the orbit through `state`.
pub fn action_at(params: &TwoSpeciesParams, state: &PhaseState) -> Result<ActionAngle> {
    action_angle(params, params.energy(state.q, state.p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn predator_prey() -> LVParams {
        LVParams::new(vec![1.0, -1.0], vec![1.0, 1.0], vec![vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap()
    }

    #[test]
    fn step_plan_covers_interval() {
        assert_eq!(step_plan(0.1, 1.0).unwrap().0, 10);
        let (n, h) = step_plan(0.3, 1.0).unwrap();
        assert_eq!(n, 4);
        assert!((h - 0.25).abs() < 1e-15);
        assert_eq!(step_plan(0.1, 0.0).unwrap().0, 0);
        assert!(step_plan(0.0, 1.0).is_err());
        assert!(step_plan(-1.0, 1.0).is_err());
    }

    #[test]
    fn fixed_point_is_stationary_for_every_method() {
        let lv = predator_prey();
        for method in [Method::Rk4, Method::Symplectic, Method::Leapfrog, Method::Euler] {
            let traj = integrate_lv(&lv, &[1.0, 1.0], 0.01, 5.0, method).unwrap();
            for n in &traj.states {
                assert!((n[0] - 1.0).abs() < 1e-10 && (n[1] - 1.0).abs() < 1e-10, "{method:?}");
            }
        }
        let three = LVParams::new(
            vec![1.0, 0.5, -1.0, -0.5],
            vec![1.0, 2.0, 1.0, 1.5],
            vec![
                vec![0.0, 0.0, -1.0, 0.0],
                vec![0.0, 0.0, 0.0, -1.0],
                vec![1.0, 0.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0, 0.0],
            ],
        )
        .unwrap();
        let q = fixed_point(&three).unwrap();
        let traj = integrate_lv(&three, &q, 0.01, 2.0, Method::Rk4).unwrap();
        for (a, b) in traj.last().unwrap().iter().zip(&q) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn symplectic_requires_two_species() {
        let four = LVParams::new(
            vec![1.0, 0.5, -1.0, -0.5],
            vec![1.0; 4],
            vec![
                vec![0.0, 0.0, -1.0, 0.0],
                vec![0.0, 0.0, 0.0, -1.0],
                vec![1.0, 0.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0, 0.0],
            ],
        )
        .unwrap();
        let err = integrate_lv(&four, &[1.0; 4], 0.1, 1.0, Method::Symplectic);
        assert!(matches!(err, Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn rk4_blow_up_is_reported() {
        let lv = LVParams::new(vec![5.0, 5.0], vec![1.0, 1.0], vec![vec![0.0, 1.0], vec![-1.0, 0.0]]);
        // Fixed point (-5, 5) is not positive, so integrate in N-space only.
        let lv = lv.unwrap();
        let err = integrate_lv(&lv, &[1.0, 1.0], 0.5, 400.0, Method::Rk4);
        assert!(matches!(err, Err(Error::BlowUp { .. })), "{err:?}");
    }

    #[test]
    fn zero_noise_is_bitwise_euler() {
        let lv = predator_prey();
        let det = integrate_lv(&lv, &[2.0, 1.0], 0.01, 3.0, Method::Euler).unwrap();
        for kind in [NoiseKind::None, NoiseKind::AdditiveGaussian, NoiseKind::MultiplicativeGaussian] {
            let noise = NoiseSpec::new(kind, 0.0, 11).unwrap();
            let sto = integrate_lv_stochastic(&lv, &[2.0, 1.0], 0.01, 3.0, noise).unwrap();
            assert_eq!(det.states, sto.states);
            assert_eq!(det.times, sto.times);
        }
    }

    #[test]
    fn seeded_runs_repeat() {
        let lv = predator_prey();
        let noise = NoiseSpec::new(NoiseKind::AdditiveGaussian, 0.05, 99).unwrap();
        let a = integrate_lv_stochastic(&lv, &[2.0, 1.0], 0.01, 2.0, noise).unwrap();
        let b = integrate_lv_stochastic(&lv, &[2.0, 1.0], 0.01, 2.0, noise).unwrap();
        assert_eq!(a, b);
        let c = integrate_lv_stochastic_stream(&lv, &[2.0, 1.0], 0.01, 2.0, noise, 1).unwrap();
        assert_ne!(a.states, c.states);
    }

    #[test]
    fn large_step_noise_warns() {
        let lv = predator_prey();
        let noise = NoiseSpec::new(NoiseKind::AdditiveGaussian, 0.5, 1).unwrap();
        let traj = integrate_lv_stochastic(&lv, &[1.1, 1.0], 0.1, 0.5, noise).unwrap();
        assert_eq!(traj.warnings.len(), 1);
        assert!(NoiseSpec::new(NoiseKind::AdditiveGaussian, -1.0, 1).is_err());
    }

    #[test]
    fn harmonic_action_limit() {
        let p = TwoSpeciesParams::new(1.0, 1.0, 1.0).unwrap();
        let omega = p.harmonic().frequency;
        for de in [1e-2, 1e-3, 1e-4] {
            let aa = action_angle(&p, p.minimum_energy() + de).unwrap();
            let expected = de / omega;
            assert!(((aa.action - expected) / expected).abs() < 0.01, "dE = {de}: {aa:?}");
            assert!(((aa.angle_frequency - omega) / omega).abs() < 0.01);
        }
        let p = TwoSpeciesParams::new(0.5, 2.0, 0.8).unwrap();
        let de = 1e-3;
        let i1 = action_angle(&p, p.minimum_energy() + de).unwrap().action;
        let i2 = action_angle(&p, p.minimum_energy() + 2.0 * de).unwrap().action;
        assert!((i2 / i1 - 2.0).abs() < 0.04);
    }

    #[test]
    fn action_rejects_energy_below_minimum() {
        let p = TwoSpeciesParams::new(1.0, 1.0, 1.0).unwrap();
        assert!(action_angle(&p, 2.0).is_err());
        assert!(action_angle(&p, 1.0).is_err());
    }
}
