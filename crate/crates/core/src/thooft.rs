// SPDX-License-Identifier: Apache-2.0

//! The dissipative flow `phi' = omega`, `omega' = -(kappa / 2) d f^2 / d omega`
//! with `f(omega) = det(Omega - omega)` over a finite list of eigenvalues of
//! `Omega = H / hbar`. Every eigenvalue is an attractor of `omega`, and `f^2`
//! is a Lyapunov function of the flow.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::model::MockPlanck;
use crate::schrodinger::SpectrumResult;

/// Relative tolerance under which two eigenvalues are merged.
const MERGE_TOLERANCE: f64 = 1e-12;
/// Halvings allowed before giving up on a step.
const MAX_HALVINGS: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct ThooftSystem {
    /// Distinct eigenvalues with multiplicities, increasing.
    roots: Vec<(f64, usize)>,
    kappa: f64,
}

impl ThooftSystem {
    pub fn new(mut spectrum: Vec<f64>, kappa: f64) -> Result<Self> {
        if spectrum.is_empty() {
            return Err(Error::EmptySpectrum);
        }
        if spectrum.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("ThooftSystem::new"));
        }
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!("kappa must be positive, got {kappa}")));
        }
        spectrum.sort_by(f64::total_cmp);
        let mut roots: Vec<(f64, usize)> = Vec::new();
        for x in spectrum {
            match roots.last_mut() {
                Some((r, k)) if (x - *r).abs() <= MERGE_TOLERANCE * r.abs().max(1.0) => *k += 1,
                _ => roots.push((x, 1)),
            }
        }
        Ok(Self { roots, kappa })
    }

    pub fn roots(&self) -> &[(f64, usize)] {
        &self.roots
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Eigenvalues with repetitions.
    pub fn omega_spectrum(&self) -> Vec<f64> {
        self.roots.iter().flat_map(|&(r, k)| std::iter::repeat_n(r, k)).collect()
    }

    /// Root closest to `omega`, with its multiplicity.
    pub fn nearest_root(&self, omega: f64) -> (f64, usize) {
        *self
            .roots
            .iter()
            .min_by(|a, b| (a.0 - omega).abs().total_cmp(&(b.0 - omega).abs()))
            .expect("systems are non-empty")
    }

    /// `(f, f', f'')` at `omega`.
    pub fn jet(&self, omega: f64) -> (f64, f64, f64) {
        self.roots.iter().fold((1.0, 0.0, 0.0), |(a, a1, a2), &(r, k)| {
            let d = r - omega;
            let kf = k as f64;
            let b = d.powi(k as i32);
            let b1 = if k >= 1 { -kf * d.powi(k as i32 - 1) } else { 0.0 };
            let b2 = if k >= 2 { kf * (kf - 1.0) * d.powi(k as i32 - 2) } else { 0.0 };
            (a * b, a1 * b + a * b1, a2 * b + 2.0 * a1 * b1 + a * b2)
        })
    }

    /// `(f^2)''` at `omega`.
    pub fn f_squared_d2(&self, omega: f64) -> f64 {
        let (f, f1, f2) = self.jet(omega);
        2.0 * (f1 * f1 + f * f2)
    }
}

/// `prod_i (lambda_i - omega)` over the eigenvalues with multiplicity.
pub fn f_poly(system: &ThooftSystem, omega: f64) -> f64 {
    system.jet(omega).0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThooftState {
    /// Angle wrapped to `[0, 2 pi)`.
    pub phi: f64,
    pub phi_unwrapped: f64,
    pub omega: f64,
    pub t: f64,
}

impl ThooftState {
    pub fn new(phi: f64, omega: f64) -> Result<Self> {
        if !(phi.is_finite() && omega.is_finite()) {
            return Err(Error::NonFinite("ThooftState::new"));
        }
        Ok(Self { phi: phi.rem_euclid(TAU), phi_unwrapped: phi, omega, t: 0.0 })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThooftTrajectory {
    pub states: Vec<ThooftState>,
    /// `f^2(omega)` at each state.
    pub f_squared: Vec<f64>,
    /// Set when the root nearest the terminal `omega` is repeated, where the flow is flat.
    pub near_degenerate_root: bool,
}

impl ThooftTrajectory {
    pub fn last(&self) -> &ThooftState {
        self.states.last().expect("trajectories hold the initial state")
    }
}

/// Explicit Euler for `(phi, omega)`. Each step is capped by
/// `dt kappa |(f^2)''| <= 1/2` and halved until `f^2` does not increase; an
/// update below the round-off of `omega` leaves `omega` fixed.
pub fn evolve_thooft(system: &ThooftSystem, state0: ThooftState, dt: f64, t_end: f64) -> Result<ThooftTrajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidParameter(format!("t_end must be non-negative, got {t_end}")));
    }
    let kappa = system.kappa;
    let mut state = state0;
    let mut f_sq = f_poly(system, state.omega).powi(2);
    let mut states = vec![state];
    let mut f_squared = vec![f_sq];
    let end_tol = 1e-12 * t_end.max(1.0);
    while t_end - state.t > end_tol {
        let curvature = kappa * system.f_squared_d2(state.omega).abs();
        let mut h = dt.min(t_end - state.t);
        if curvature > 0.0 {
            h = h.min(0.5 / curvature);
        }
        let (f, f1, _) = system.jet(state.omega);
        let mut halvings = 0;
        let omega = loop {
            let candidate = state.omega - kappa * f * f1 * h;
            let plateau = (candidate - state.omega).abs() <= 8.0 * f64::EPSILON * state.omega.abs().max(1.0);
            if plateau {
                break state.omega;
            }
            let g = f_poly(system, candidate).powi(2);
            if g <= f_sq {
                break candidate;
            }
            halvings += 1;
            if halvings > MAX_HALVINGS {
                return Err(Error::StepTooLarge { t: state.t });
            }
            h *= 0.5;
        };
        let phi_unwrapped = state.phi_unwrapped + state.omega * h;
        state = ThooftState { phi: phi_unwrapped.rem_euclid(TAU), phi_unwrapped, omega, t: state.t + h };
        f_sq = f_poly(system, omega).powi(2);
        states.push(state);
        f_squared.push(f_sq);
    }
    let near_degenerate_root = system.nearest_root(state.omega).1 > 1;
    Ok(ThooftTrajectory { states, f_squared, near_degenerate_root })
}

/// `omega_n = E_n / hbar`.
pub fn spectrum_to_thooft(spectrum: &SpectrumResult, hbar: MockPlanck, kappa: f64) -> Result<ThooftSystem> {
    if spectrum.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    if spectrum.residuals.iter().any(|r| !r.is_finite()) {
        return Err(Error::NonFinite("spectrum_to_thooft"));
    }
    ThooftSystem::new(spectrum.energies.iter().map(|e| e / hbar.value()).collect(), kappa)
}

/// Least-squares line through `(t, ln err)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Fits `ln|omega - target|` against `t` over the states whose error lies in
/// `[lo, hi]`; `None` with fewer than three such states.
pub fn exponential_fit(trajectory: &ThooftTrajectory, target: f64, lo: f64, hi: f64) -> Option<ExponentialFit> {
    let pts: Vec<(f64, f64)> = trajectory
        .states
        .iter()
        .filter_map(|s| {
            let e = (s.omega - target).abs();
            (e >= lo && e <= hi).then(|| (s.t, e.ln()))
        })
        .collect();
    let n = pts.len();
    if n < 3 {
        return None;
    }
    let nf = n as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let (mut stt, mut sty, mut syy) = (0.0, 0.0, 0.0);
    for &(t, y) in &pts {
        stt += (t - mt) * (t - mt);
        sty += (t - mt) * (y - my);
        syy += (y - my) * (y - my);
    }
    if stt == 0.0 {
        return None;
    }
    let slope = sty / stt;
    let r_squared = if syy == 0.0 { 1.0 } else { sty * sty / (stt * syy) };
    Some(ExponentialFit { slope, intercept: my - slope * mt, r_squared, points: n })
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn flow_is_lyapunov_and_lands_on_a_root(
            first in -3.0f64..0.0,
            gaps in prop::collection::vec(0.5f64..1.5, 0..4),
            omega0 in -3.5f64..3.5,
            kappa in 0.2f64..2.0,
        ) {
            let roots: Vec<f64> = std::iter::once(first)
                .chain(gaps.iter().scan(first, |x, g| { *x += g; Some(*x) }))
                .collect();
            let s = ThooftSystem::new(roots, kappa).unwrap();
            let traj = evolve_thooft(&s, ThooftState::new(0.0, omega0).unwrap(), 0.05, 1000.0).unwrap();
            for w in traj.f_squared.windows(2) {
                prop_assert!(w[1] <= w[0]);
            }
            let end = traj.last().omega;
            let (root, _) = s.nearest_root(end);
            prop_assert!((end - root).abs() <= 1e-6 * root.abs().max(1.0), "end {end} root {root}");
        }
    }
}
