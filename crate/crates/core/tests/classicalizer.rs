// SPDX-License-Identifier: Apache-2.0

mod common;

use common::*;
use mockq::classicalizer::{
    bohmian_trajectory, classical_characteristics, evolve_psi_equation, evolve_with_eta, quantum_potential_harmonic,
    EtaField, HarmonicState, QpForm,
};
use mockq::dynamics::leapfrog;
use mockq::error::Error;
use mockq::madelung::{compose_psi, continuity_residual, quantum_potential, MadelungFields};
use mockq::model::{PhaseState, TwoSpeciesParams};
use mockq::schrodinger::{coherent_state, evolve_linear, CoherentStateSpec, HamiltonianSpec, PotentialKind};

#[test]
fn grid_solver_matches_characteristics_before_the_caustic() {
    let spec = harmonic_spec(256, 0.01);
    let fields = focusing_bundle(&spec);
    let t = period() / 4.0;
    let dt = safe_dt(&spec);
    let grid_psi = evolve_psi_equation(&spec, &compose_psi(&fields), dt, t).unwrap();
    let oracle = classical_characteristics(&spec, &fields, 1e-3, t).unwrap();
    let defect = 1.0 - grid_psi.overlap(&compose_psi(&oracle));
    assert!(defect <= 1e-4, "overlap defect {defect:e}");
    assert!(max_abs_diff(&grid_psi.density(), oracle.rho()) <= 1e-5);
}

#[test]
fn density_does_not_depend_on_hbar() {
    let t = period() / 4.0;
    let dt = safe_dt(&harmonic_spec(256, 0.02));
    let run = |hbar: f64| {
        let spec = harmonic_spec(256, hbar);
        let psi0 = compose_psi(&focusing_bundle(&spec));
        evolve_psi_equation(&spec, &psi0, dt, t).unwrap().density()
    };
    let (a, b) = (run(0.01), run(0.02));
    assert!(max_abs_diff(&a, &b) <= 1e-6, "{:e}", max_abs_diff(&a, &b));
}

#[test]
fn characteristics_focus_before_half_a_period() {
    let spec = harmonic_spec(256, 0.01);
    let dt = 1e-3;
    match classical_characteristics(&spec, &focusing_bundle(&spec), dt, period() / 2.0) {
        Err(Error::CausticEncountered { t, .. }) => assert!((t - 3.0 * period() / 8.0).abs() <= 2.0 * dt),
        other => panic!("expected a caustic, got {other:?}"),
    }
}

#[test]
fn transported_density_satisfies_continuity_at_second_order() {
    let spec = harmonic_spec(256, 0.01);
    let fields = focusing_bundle(&spec);
    let mass = spec.effective_mass().unwrap();
    let t0 = 0.5;
    let start = classical_characteristics(&spec, &fields, 1e-3, t0).unwrap();
    let residual = |gap: f64| {
        let end = classical_characteristics(&spec, &fields, 1e-3, t0 + gap).unwrap();
        continuity_residual(&start, &end, mass, gap).unwrap()
    };
    let (coarse, fine) = (residual(0.04), residual(0.02));
    let ratio = coarse / fine;
    assert!((3.4..=4.6).contains(&ratio), "ratio {ratio}");
}

#[test]
fn bohmian_peak_follows_the_classical_orbit() {
    let spec = harmonic_spec(256, 0.01);
    let fields = focusing_bundle(&spec);
    let dt = safe_dt(&spec);
    let t = period() / 4.0;
    let path = bohmian_trajectory(&spec, &compose_psi(&fields), CENTRE, dt, t).unwrap();
    let h = path[1].0;
    let classical = leapfrog(&unit().harmonic(), PhaseState::new(CENTRE, 0.0, 0.0), path.len() - 1, h);
    let worst = path.iter().zip(&classical).map(|((_, q), s)| (q - s.q).abs()).fold(0.0, f64::max);
    assert!(worst <= 1e-4, "{worst:e}");
}

#[test]
fn uniform_flow_on_the_ring_is_stationary() {
    let base = harmonic_spec(256, 0.01);
    let spec = HamiltonianSpec::new(PotentialKind::Free, base.params, base.grid);
    let p0 = std::f64::consts::TAU * 0.01 * 3.0 / base.grid.length();
    let fields = MadelungFields::from_fn(spec.grid, |_| 0.5, |q| p0 * q).unwrap();
    let out = evolve_psi_equation(&spec, &compose_psi(&fields), safe_dt(&spec), 1.0).unwrap();
    assert!(max_abs_diff(&out.density(), fields.rho()) <= 1e-10);
}

fn coherent_benchmark() -> (HamiltonianSpec, mockq::wave::WaveFunction) {
    let spec = harmonic_spec(256, 0.01);
    let psi0 = coherent_state(&spec.params, &spec.grid, CoherentStateSpec::new(0.2, 0.0).unwrap()).unwrap();
    (spec, psi0)
}

#[test]
fn exact_cancellation_is_linear_evolution() {
    let (spec, psi0) = coherent_benchmark();
    let dt = safe_dt(&spec);
    let t = period() / 8.0;
    let eta = EtaField::new(spec.grid, 0.0, 0.0, 1).unwrap();
    let run = evolve_with_eta(&spec, &psi0, &eta, dt, t).unwrap();
    let linear = evolve_linear(&spec, &psi0, dt, t).unwrap();
    assert!(run.psi.distance(&linear) <= 1e-8);
    assert!(run.divergence.iter().all(|r| r.distance <= 1e-8));
}

#[test]
fn absent_environment_is_the_psi_equation() {
    let (spec, psi0) = coherent_benchmark();
    let dt = safe_dt(&spec);
    let t = period() / 16.0;
    let eta = EtaField::new(spec.grid, 1.0, 0.0, 1).unwrap();
    let run = evolve_with_eta(&spec, &psi0, &eta, dt, t).unwrap();
    let direct = evolve_psi_equation(&spec, &psi0, dt, t).unwrap();
    assert_eq!(run.psi, direct);
}

#[test]
fn divergence_shrinks_with_the_deficit() {
    let (spec, psi0) = coherent_benchmark();
    let dt = safe_dt(&spec);
    let t = period() / 8.0;
    let finals: Vec<f64> = [0.2, 0.1, 0.05, 0.0]
        .iter()
        .map(|&d| {
            let eta = EtaField::new(spec.grid, d, 0.0, 1).unwrap();
            evolve_with_eta(&spec, &psi0, &eta, dt, t).unwrap().divergence.last().unwrap().distance
        })
        .collect();
    assert!(finals[0] > 0.0);
    assert!(finals.windows(2).all(|w| w[1] < w[0]), "{finals:?}");
    assert!(finals[3] <= 1e-8);
}

#[test]
fn real_multiples_of_the_curvature_term_conserve_the_norm() {
    let (spec, psi0) = coherent_benchmark();
    let eta = EtaField::new(spec.grid, 0.37, 0.0, 1).unwrap();
    let run = evolve_with_eta(&spec, &psi0, &eta, safe_dt(&spec), period() / 8.0).unwrap();
    let n0 = psi0.norm();
    assert!(run.divergence.iter().all(|r| (r.norm - n0).abs() <= 1e-9 * n0));
}

#[test]
fn noisy_runs_reproduce_under_a_fixed_seed() {
    let (spec, psi0) = coherent_benchmark();
    let dt = safe_dt(&spec);
    let t = 0.05;
    let run = |seed: u64| {
        let eta = EtaField::new(spec.grid, 0.0, 1e-4, seed).unwrap();
        evolve_with_eta(&spec, &psi0, &eta, dt, t).unwrap()
    };
    let (a, b, c) = (run(7), run(7), run(8));
    assert_eq!(a, b);
    assert_ne!(a.psi, c.psi);
    assert!(a.divergence.last().unwrap().distance > 0.0);
    assert!((a.psi.norm() - psi0.norm()).abs() <= 1e-12);
}

#[test]
fn evolved_coherent_state_has_the_literal_profile_shape() {
    let params = TwoSpeciesParams::new(0.8, 1.5, 0.6).unwrap();
    let spec = HamiltonianSpec::new(PotentialKind::Harmonic, params, grid(2.0, 128, 0.05));
    let coherent = CoherentStateSpec::new(0.05, 0.0).unwrap();
    let psi0 = coherent_state(&params, &spec.grid, coherent).unwrap();
    let t = 0.3 * params.harmonic().period();
    let psi = evolve_linear(&spec, &psi0, safe_dt(&spec), t).unwrap();
    let mass = params.harmonic().effective_mass;
    let grid_vq = quantum_potential(&psi, mass).unwrap();
    let literal = quantum_potential_harmonic(&params, &spec.grid, HarmonicState::Coherent { spec: coherent, t }, QpForm::Literal);

    let (centre, _) = coherent.centre(&params, t);
    let width = (spec.hbar().value() / (2.0 * mass * params.harmonic().frequency)).sqrt();
    let window: Vec<usize> =
        (0..spec.grid.points()).filter(|&j| (spec.grid.node(j) - centre).abs() <= 2.0 * width).collect();
    let n = window.len() as f64;
    let (sx, sy) = window.iter().fold((0.0, 0.0), |(a, b), &j| (a + literal[j], b + grid_vq[j]));
    let (mx, my) = (sx / n, sy / n);
    let (sxy, sxx) = window
        .iter()
        .fold((0.0, 0.0), |(a, b), &j| (a + (literal[j] - mx) * (grid_vq[j] - my), b + (literal[j] - mx).powi(2)));
    let slope = sxy / sxx;
    let span = window.iter().map(|&j| grid_vq[j]).fold(f64::NEG_INFINITY, f64::max)
        - window.iter().map(|&j| grid_vq[j]).fold(f64::INFINITY, f64::min);
    let worst = window.iter().map(|&j| (my + slope * (literal[j] - mx) - grid_vq[j]).abs()).fold(0.0, f64::max);
    assert!(worst <= 1e-4 * span, "{:e}", worst / span);
}
