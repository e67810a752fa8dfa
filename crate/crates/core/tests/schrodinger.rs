// SPDX-License-Identifier: Apache-2.0

mod common;

use common::*;
use mockq::model::TwoSpeciesParams;
use mockq::rng::stream_rng;
use mockq::schrodinger::{
    apply_hamiltonian, commutator_check, evolve_linear, harmonic_spectrum, solve_spectrum, uncertainty_report,
    HamiltonianSpec, PotentialKind,
};
use mockq::wave::WaveFunction;
use num_complex::Complex64;
use rand::Rng;

#[test]
fn numerical_harmonic_states_are_hermite_functions() {
    let params = TwoSpeciesParams::new(0.5, 2.0, 0.8).unwrap();
    let grid = ladder_grid(&params, 0.02);
    let spec = HamiltonianSpec::new(PotentialKind::Harmonic, params, grid);
    let numeric = solve_spectrum(&spec, 6).unwrap();
    let exact = harmonic_spectrum(&params, &grid, 5).unwrap();
    for n in 0..6 {
        assert!(((numeric.energies[n] - exact.energies[n]) / exact.energies[n]).abs() <= 1e-10);
        assert!(1.0 - numeric.states[n].overlap(&exact.states[n]) <= 1e-10);
    }
}

#[test]
fn lv_eigenstates_only_rotate_in_phase() {
    let spec = HamiltonianSpec::new(PotentialKind::LvFull, unit(), grid(5.0, 256, 0.02));
    let s = solve_spectrum(&spec, 3).unwrap();
    let t = 1.3;
    let dt = safe_dt(&spec);
    for (e, psi) in s.energies.iter().zip(&s.states) {
        let out = evolve_linear(&spec, psi, dt, t).unwrap();
        let phase = Complex64::from_polar(1.0, -e * t / spec.hbar().value());
        let expected = WaveFunction::new(spec.grid, psi.values().iter().map(|z| z * phase).collect()).unwrap();
        assert!(out.distance(&expected) / psi.norm() <= 1e-6);
        assert!(1.0 - out.overlap(psi) <= 1e-8);
    }
}

#[test]
fn eigenpairs_satisfy_the_stationary_equation() {
    let spec = HamiltonianSpec::new(PotentialKind::LvFull, TwoSpeciesParams::new(1.2, 0.8, 1.1).unwrap(), grid(6.0, 256, 0.03));
    let s = solve_spectrum(&spec, 5).unwrap();
    for (e, psi) in s.energies.iter().zip(&s.states) {
        let h_psi = apply_hamiltonian(&spec, psi).unwrap();
        let scaled = WaveFunction::new(spec.grid, psi.values().iter().map(|z| z * e).collect()).unwrap();
        assert!(h_psi.distance(&scaled) <= 1e-8);
    }
}

#[test]
fn random_superpositions_respect_the_uncertainty_floor() {
    let params = unit();
    let grid = ladder_grid(&params, 0.01);
    let basis = harmonic_spectrum(&params, &grid, 10).unwrap().states;
    let mut rng = stream_rng(31, 0);
    for _ in 0..100 {
        let mut values = vec![Complex64::new(0.0, 0.0); grid.points()];
        for b in &basis {
            let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            values.iter_mut().zip(b.values()).for_each(|(v, z)| *v += c * z);
        }
        let psi = WaveFunction::new(grid, values).unwrap().normalized().unwrap();
        let report = uncertainty_report(&psi);
        assert!(report.satisfies_bound && report.product >= 0.005 * (1.0 - 1e-6), "{report:?}");
    }
}

#[test]
fn commutator_holds_for_interior_gaussians_anywhere() {
    let grid = grid(4.0, 256, 0.01);
    for centre in [-0.8, -0.3, 0.0, 0.45, 0.9] {
        let psi = WaveFunction::from_fn(grid, |q| Complex64::new(gaussian(q, centre, 0.12).sqrt(), 0.0)).unwrap();
        assert!(commutator_check(&grid, &psi).unwrap() <= 1e-8, "centre {centre}");
    }
}
