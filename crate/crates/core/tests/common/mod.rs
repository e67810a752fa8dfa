// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

use std::f64::consts::TAU;

use mockq::grid::Grid1D;
use mockq::madelung::MadelungFields;
use mockq::model::{MockPlanck, TwoSpeciesParams};
use mockq::schrodinger::{time_step_ratio, HamiltonianSpec, PotentialKind};

pub const WIDTH: f64 = 0.05;
pub const CENTRE: f64 = 0.2;

pub fn unit() -> TwoSpeciesParams {
    TwoSpeciesParams::new(1.0, 1.0, 1.0).unwrap()
}

pub fn grid(length: f64, points: usize, hbar: f64) -> Grid1D {
    Grid1D::new(length, points, MockPlanck::new(hbar).unwrap()).unwrap()
}

pub fn gaussian(q: f64, centre: f64, width: f64) -> f64 {
    (-(q - centre).powi(2) / (2.0 * width * width)).exp() / (width * TAU.sqrt())
}

/// Harmonic spec on `[-1, 1)` with unit parameters.
pub fn harmonic_spec(points: usize, hbar: f64) -> HamiltonianSpec {
    HamiltonianSpec::new(PotentialKind::Harmonic, unit(), grid(2.0, points, hbar))
}

/// Gaussian bundle with `S0 = (Q - Q_c)^2 / 2`; it focuses at `3T/8`.
pub fn focusing_bundle(spec: &HamiltonianSpec) -> MadelungFields {
    MadelungFields::from_fn(spec.grid, |q| gaussian(q, CENTRE, WIDTH), |q| 0.5 * (q - CENTRE).powi(2)).unwrap()
}

/// Largest step accepted by the time-step guard, with a small margin.
pub fn safe_dt(spec: &HamiltonianSpec) -> f64 {
    0.099 / time_step_ratio(spec, 1.0)
}

pub fn period() -> f64 {
    unit().harmonic().period()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Box holding the lowest eleven harmonic levels with tails below `e^-80`
/// in both position and momentum.
pub fn ladder_grid(params: &TwoSpeciesParams, hbar: f64) -> Grid1D {
    let ha = params.harmonic();
    let m_omega = ha.effective_mass * ha.frequency;
    grid(2.0 * (160.0 * hbar / m_omega).sqrt(), 256, hbar)
}

pub fn ladder(params: &TwoSpeciesParams, hbar: f64, n: usize) -> f64 {
    let ha = params.harmonic();
    ha.offset + hbar * ha.frequency * (n as f64 + 0.5)
}
