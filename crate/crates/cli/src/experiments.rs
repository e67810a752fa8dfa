// SPDX-License-Identifier: Apache-2.0

//! Execution of validated plans. Each experiment emits its tables through a
//! [`Sink`] as soon as they exist and returns its scalar metrics.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;

use mockq::classicalizer::{classical_characteristics, evolve_psi_equation, evolve_with_eta};
use mockq::dynamics::{ensemble, integrate_lv, integrate_lv_stochastic};
use mockq::io::{
    divergence_table, spectrum_table, thooft_table, trajectory_table, wavefunction_table, Column, Table,
};
use mockq::madelung::compose_psi;
use mockq::rng::stream_rng;
use mockq::schrodinger::{commutator_check, hermite_functions, solve_spectrum, uncertainty_report};
use mockq::thooft::{evolve_thooft, exponential_fit};
use mockq::wave::WaveFunction;

use crate::config::Plan;
use crate::error::CliError;

/// Error window of the 't Hooft exponential fit.
pub const FIT_WINDOW: (f64, f64) = (1e-12, 1e-6);

/// Receives output tables; implemented by the run directory writer.
pub trait Sink {
    fn emit(&mut self, file: &str, table: Table) -> Result<(), CliError>;
}

#[derive(Debug)]
pub enum Failure {
    Model(mockq::Error),
    Output(CliError),
}

impl From<mockq::Error> for Failure {
    fn from(e: mockq::Error) -> Self {
        Self::Model(e)
    }
}

impl From<CliError> for Failure {
    fn from(e: CliError) -> Self {
        Self::Output(e)
    }
}

/// Named scalar results; `headline` is one of the keys of `values`.
#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub headline: &'static str,
    pub values: BTreeMap<String, f64>,
}

impl Metrics {
    fn new(headline: &'static str, value: f64) -> Self {
        Self { headline, values: BTreeMap::from([(headline.to_string(), value)]) }
    }

    fn with(mut self, key: &str, value: f64) -> Self {
        self.values.insert(key.to_string(), value);
        self
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn execute(plan: &Plan, sink: &mut dyn Sink) -> Result<Metrics, Failure> {
    match plan {
        Plan::Classical { lv, initial, dt, t_end, method } => {
            let traj = integrate_lv(lv, initial, *dt, *t_end, *method)?;
            let end = traj.last().expect("trajectories hold the initial state").to_vec();
            let drift = traj.energy.as_ref().map(|e| e.iter().map(|h| ((h - e[0]) / e[0]).abs()).fold(0.0, f64::max));
            sink.emit("trajectory.csv", trajectory_table(&traj))?;
            let mut metrics = match drift {
                Some(d) => Metrics::new("max_relative_energy_drift", d),
                None => Metrics::new("final_N_1", end[0]),
            };
            for (i, n) in end.iter().enumerate() {
                metrics = metrics.with(&format!("final_N_{}", i + 1), *n);
            }
            Ok(metrics)
        }
        Plan::Stochastic { lv, initial, dt, t_end, noise, runs } => {
            let traj = integrate_lv_stochastic(lv, initial, *dt, *t_end, *noise)?;
            let mut table = trajectory_table(&traj);
            if !traj.warnings.is_empty() {
                table.set_meta("warnings", traj.warnings.join("; "));
            }
            sink.emit("trajectory.csv", table)?;
            let end = traj.last().expect("trajectories hold the initial state").to_vec();
            if *runs < 2 {
                return Ok(Metrics::new("final_N_1", end[0]));
            }
            let summary = ensemble(lv, initial, *dt, *t_end, *noise, *runs)?;
            let m = lv.species_count();
            let mut columns = vec![Column::new("t", "time")];
            columns.extend((1..=m).map(|i| Column::new(&format!("mean_N_{i}"), "population")));
            columns.extend((1..=m).map(|i| Column::new(&format!("se_N_{i}"), "population")));
            let mut table = Table::new("ensemble", columns).with_meta("runs", summary.runs);
            for ((t, mean), se) in summary.times.iter().zip(&summary.mean).zip(&summary.std_error) {
                let mut row = vec![*t];
                row.extend_from_slice(mean);
                row.extend_from_slice(se);
                table.push(row)?;
            }
            sink.emit("ensemble.csv", table)?;
            let (mean, se) = (summary.mean.last().unwrap(), summary.std_error.last().unwrap());
            Ok(Metrics::new("final_mean_N_1", mean[0]).with("final_se_N_1", se[0]).with("path_final_N_1", end[0]))
        }
        Plan::Spectrum { spec, levels } => {
            let result = solve_spectrum(spec, *levels)?;
            let ha = spec.params.harmonic();
            let hbar = spec.hbar().value();
            let harmonic_e0 = ha.offset + 0.5 * hbar * ha.frequency;
            let table = spectrum_table(&result)
                .with_meta("potential", format!("{:?}", spec.kind))
                .with_meta("harmonic_E0", harmonic_e0)
                .with_meta("hbar", hbar);
            sink.emit("spectrum.csv", table)?;
            sink.emit("ground_state.csv", wavefunction_table(&result.states[0]))?;
            let e0 = result.energies[0];
            let mut metrics = Metrics::new("E_0", e0)
                .with("E0_minus_harmonic", e0 - harmonic_e0)
                .with("max_residual", result.residuals.iter().copied().fold(0.0, f64::max))
                .with("orthonormality_error", result.orthonormality_error());
            if result.len() > 1 {
                metrics = metrics.with("gap_E1_E0", result.energies[1] - e0);
            }
            Ok(metrics)
        }
        Plan::PsiEquation { spec, fields, dt, t_end, oracle_dt } => {
            let psi0 = compose_psi(fields);
            sink.emit("psi_initial.csv", wavefunction_table(&psi0))?;
            let psi = evolve_psi_equation(spec, &psi0, *dt, *t_end)?;
            sink.emit("psi_final.csv", wavefunction_table(&psi))?;
            let oracle = classical_characteristics(spec, fields, *oracle_dt, *t_end)?;
            let oracle_psi = compose_psi(&oracle);
            let rho = psi.density();
            let columns = vec![
                Column::new("Q", "1"),
                Column::new("rho_grid", "1/Q"),
                Column::new("rho_characteristics", "1/Q"),
                Column::new("S_characteristics", "1/time"),
            ];
            let mut table = Table::new("density", columns);
            for (j, q) in spec.grid.nodes().into_iter().enumerate() {
                table.push(vec![q, rho[j], oracle.rho()[j], oracle.action()[j]])?;
            }
            sink.emit("density.csv", table)?;
            Ok(Metrics::new("overlap_defect", 1.0 - psi.overlap(&oracle_psi))
                .with("density_max_abs_diff", max_abs_diff(&rho, oracle.rho())))
        }
        Plan::Cancellation { spec, psi0, eta, dt, t_end } => {
            let run = evolve_with_eta(spec, psi0, eta, *dt, *t_end)?;
            let last = *run.divergence.last().expect("divergence series holds the initial record");
            let worst = run.divergence.iter().map(|r| r.distance).fold(0.0, f64::max);
            let table = divergence_table(&run.divergence)
                .with_meta("deficit", eta.deficit())
                .with_meta("noise_amplitude", eta.stochastic_amplitude())
                .with_meta("seed", eta.seed());
            sink.emit("divergence.csv", table)?;
            sink.emit("psi_final.csv", wavefunction_table(&run.psi))?;
            sink.emit("psi_linear.csv", wavefunction_table(&run.linear))?;
            Ok(Metrics::new("final_distance", last.distance)
                .with("max_distance", worst)
                .with("final_norm", last.norm)
                .with("final_min_rho", last.min_rho))
        }
        Plan::Thooft { system, state0, dt, t_end } => {
            let traj = evolve_thooft(system, *state0, *dt, *t_end)?;
            sink.emit("thooft.csv", thooft_table(&traj))?;
            let end = traj.last();
            let (root, _) = system.nearest_root(end.omega);
            let mut metrics = Metrics::new("terminal_gap", (end.omega - root).abs())
                .with("terminal_omega", end.omega)
                .with("attracting_root", root)
                .with("near_degenerate_root", if traj.near_degenerate_root { 1.0 } else { 0.0 });
            if let Some(fit) = exponential_fit(&traj, root, FIT_WINDOW.0, FIT_WINDOW.1) {
                metrics = metrics.with("fit_slope", fit.slope).with("fit_r_squared", fit.r_squared);
            }
            Ok(metrics)
        }
        Plan::Uncertainty { params, grid, levels, samples, seed } => {
            let states = hermite_functions(params, grid, levels - 1);
            let hbar = grid.hbar().value();
            let mut rng = stream_rng(*seed, 0);
            let mut random = Vec::with_capacity(*samples);
            for _ in 0..*samples {
                let mut values = vec![Complex64::new(0.0, 0.0); grid.points()];
                for s in &states {
                    let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                    values.iter_mut().zip(s.values()).for_each(|(v, z)| *v += c * z);
                }
                random.push(WaveFunction::new(*grid, values)?.normalized()?);
            }
            let columns = vec![
                Column::new("index", "1"),
                Column::new("level", "1"),
                Column::new("delta_q", "1"),
                Column::new("delta_p", "1/time"),
                Column::new("product", "1/time"),
                Column::new("ratio_to_bound", "1"),
            ];
            let mut table = Table::new("uncertainty", columns).with_meta("hbar", hbar);
            let mut min_ratio = f64::INFINITY;
            let mut violations = 0usize;
            for (k, psi) in states.iter().chain(&random).enumerate() {
                let r = uncertainty_report(psi);
                let ratio = r.product / (0.5 * hbar);
                min_ratio = min_ratio.min(ratio);
                violations += usize::from(!r.satisfies_bound);
                let level = if k < states.len() { k as f64 } else { -1.0 };
                table.push(vec![k as f64, level, r.delta_q, r.delta_p, r.product, ratio])?;
            }
            sink.emit("uncertainty.csv", table)?;
            Ok(Metrics::new("min_ratio_to_bound", min_ratio)
                .with("violations", violations as f64)
                .with("ground_commutator_residual", commutator_check(grid, &states[0])?))
        }
    }
}
