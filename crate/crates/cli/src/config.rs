// SPDX-License-Identifier: Apache-2.0

//! TOML experiment configuration and its validation into a [`Plan`].

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use mockq::classicalizer::EtaField;
use mockq::dynamics::{step_plan, Method, NoiseKind, NoiseSpec};
use mockq::grid::Grid1D;
use mockq::madelung::MadelungFields;
use mockq::model::{CanonicalModel, LVParams, MockPlanck, TwoSpeciesParams};
use mockq::schrodinger::{
    coherent_state, time_step_ratio, CoherentStateSpec, HamiltonianSpec, PotentialKind, TIME_STEP_LIMIT,
};
use mockq::thooft::{ThooftState, ThooftSystem};
use mockq::wave::WaveFunction;

use crate::error::{CliError, Result};

/// Environment variable that replaces the working directory as the root of
/// relative output paths.
pub const OUTPUT_ROOT_ENV: &str = "MOCKQ_OUTPUT_ROOT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Classical,
    Stochastic,
    Spectrum,
    PsiEquation,
    Cancellation,
    Thooft,
    Uncertainty,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Classical => "classical",
            Self::Stochastic => "stochastic",
            Self::Spectrum => "spectrum",
            Self::PsiEquation => "psi_equation",
            Self::Cancellation => "cancellation",
            Self::Thooft => "thooft",
            Self::Uncertainty => "uncertainty",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindConfig {
    #[default]
    LvFull,
    Harmonic,
    Free,
}

impl From<KindConfig> for PotentialKind {
    fn from(k: KindConfig) -> Self {
        match k {
            KindConfig::LvFull => PotentialKind::LvFull,
            KindConfig::Harmonic => PotentialKind::Harmonic,
            KindConfig::Free => PotentialKind::Free,
        }
    }
}

/// Either the reduced two-species triple or full LV coefficients.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default)]
    pub kind: KindConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_length")]
    pub length: f64,
    #[serde(default = "default_points")]
    pub points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { length: default_length(), points: default_points() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Numerics {
    #[serde(default = "default_hbar")]
    pub hbar: f64,
    /// Absent: `1e-3` for ODE experiments, 99% of the time-step guard for
    /// grid experiments.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub grid: GridConfig,
}

impl Default for Numerics {
    fn default() -> Self {
        Self { hbar: default_hbar(), dt: None, t_end: default_t_end(), seed: 0, grid: GridConfig::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodConfig {
    Rk4,
    #[default]
    Symplectic,
    Leapfrog,
    Euler,
}

impl From<MethodConfig> for Method {
    fn from(m: MethodConfig) -> Self {
        match m {
            MethodConfig::Rk4 => Method::Rk4,
            MethodConfig::Symplectic => Method::Symplectic,
            MethodConfig::Leapfrog => Method::Leapfrog,
            MethodConfig::Euler => Method::Euler,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseConfig {
    None,
    #[default]
    AdditiveGaussian,
    MultiplicativeGaussian,
}

impl From<NoiseConfig> for NoiseKind {
    fn from(n: NoiseConfig) -> Self {
        match n {
            NoiseConfig::None => NoiseKind::None,
            NoiseConfig::AdditiveGaussian => NoiseKind::AdditiveGaussian,
            NoiseConfig::MultiplicativeGaussian => NoiseKind::MultiplicativeGaussian,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalConfig {
    #[serde(default = "default_initial")]
    pub initial: Vec<f64>,
    #[serde(default)]
    pub method: MethodConfig,
}

impl Default for ClassicalConfig {
    fn default() -> Self {
        Self { initial: default_initial(), method: MethodConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StochasticConfig {
    #[serde(default = "default_initial")]
    pub initial: Vec<f64>,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(default = "default_noise_amplitude")]
    pub amplitude: f64,
    #[serde(default = "default_runs")]
    pub runs: usize,
}

impl Default for StochasticConfig {
    fn default() -> Self {
        Self {
            initial: default_initial(),
            noise: NoiseConfig::default(),
            amplitude: default_noise_amplitude(),
            runs: default_runs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    #[serde(default = "default_levels")]
    pub levels: usize,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self { levels: default_levels() }
    }
}

/// Gaussian bundle `rho ~ N(centre, width^2)` with
/// `S0 = focus (Q - centre)^2 / 2 + momentum Q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiEquationConfig {
    #[serde(default = "default_centre")]
    pub centre: f64,
    #[serde(default = "default_width")]
    pub width: f64,
    #[serde(default = "default_focus")]
    pub focus: f64,
    #[serde(default)]
    pub momentum: f64,
    #[serde(default = "default_oracle_dt")]
    pub oracle_dt: f64,
}

impl Default for PsiEquationConfig {
    fn default() -> Self {
        Self {
            centre: default_centre(),
            width: default_width(),
            focus: default_focus(),
            momentum: 0.0,
            oracle_dt: default_oracle_dt(),
        }
    }
}

/// Coherent initial state and the environment term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CancellationConfig {
    #[serde(default = "default_centre")]
    pub amplitude: f64,
    #[serde(default)]
    pub phase: f64,
    #[serde(default)]
    pub deficit: f64,
    #[serde(default)]
    pub noise: f64,
}

impl Default for CancellationConfig {
    fn default() -> Self {
        Self { amplitude: default_centre(), phase: 0.0, deficit: 0.0, noise: 0.0 }
    }
}

/// Either an explicit spectrum or the lowest `levels` harmonic levels of the
/// model divided by `hbar`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThooftConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default = "default_omega0")]
    pub omega0: f64,
    #[serde(default)]
    pub phi0: f64,
}

impl Default for ThooftConfig {
    fn default() -> Self {
        Self { spectrum: None, levels: None, kappa: default_kappa(), omega0: default_omega0(), phi0: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UncertaintyConfig {
    #[serde(default = "default_levels")]
    pub levels: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

impl Default for UncertaintyConfig {
    fn default() -> Self {
        Self { levels: default_levels(), samples: default_samples() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_output_dir")]
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: default_output_dir() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default)]
    pub classical: ClassicalConfig,
    #[serde(default)]
    pub stochastic: StochasticConfig,
    #[serde(default)]
    pub spectrum: SpectrumConfig,
    #[serde(default)]
    pub psi_equation: PsiEquationConfig,
    #[serde(default)]
    pub cancellation: CancellationConfig,
    #[serde(default)]
    pub thooft: ThooftConfig,
    #[serde(default)]
    pub uncertainty: UncertaintyConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_length() -> f64 {
    3.0
}
fn default_points() -> usize {
    256
}
fn default_hbar() -> f64 {
    0.01
}
fn default_t_end() -> f64 {
    1.0
}
fn default_initial() -> Vec<f64> {
    vec![2.0, 1.0]
}
fn default_noise_amplitude() -> f64 {
    0.05
}
fn default_runs() -> usize {
    100
}
fn default_levels() -> usize {
    10
}
fn default_centre() -> f64 {
    0.2
}
fn default_width() -> f64 {
    0.05
}
fn default_focus() -> f64 {
    1.0
}
fn default_oracle_dt() -> f64 {
    1e-3
}
fn default_kappa() -> f64 {
    1.0
}
fn default_omega0() -> f64 {
    1.4
}
fn default_samples() -> usize {
    100
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::ConfigRead { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_toml(&text)
    }

    /// Effective configuration, defaults included.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configurations serialize")
    }

    /// SHA-256 of the effective configuration.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }

    /// Output directory after applying [`OUTPUT_ROOT_ENV`].
    pub fn output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_ROOT_ENV) {
            Some(root) if self.output.dir.is_relative() => PathBuf::from(root).join(&self.output.dir),
            _ => self.output.dir.clone(),
        }
    }

    fn two_species(&self) -> Result<TwoSpeciesParams> {
        let m = &self.model;
        match (m.gamma, m.alpha1, m.alpha2, &m.epsilon, &m.beta, &m.alpha) {
            (Some(g), Some(a1), Some(a2), None, None, None) => Ok(TwoSpeciesParams::new(g, a1, a2)?),
            (None, None, None, Some(_), Some(_), Some(_)) => Ok(CanonicalModel::from_lv(&self.lv()?)?.params),
            _ => Err(CliError::Validation(
                "model needs either gamma, alpha1, alpha2 or epsilon, beta, alpha".into(),
            )),
        }
    }

    fn lv(&self) -> Result<LVParams> {
        let m = &self.model;
        match (&m.epsilon, &m.beta, &m.alpha) {
            (Some(e), Some(b), Some(a)) if m.gamma.is_none() && m.alpha1.is_none() && m.alpha2.is_none() => {
                Ok(LVParams::new(e.clone(), b.clone(), a.clone())?)
            }
            _ => Ok(self.two_species()?.to_lv()),
        }
    }

    fn grid(&self) -> Result<Grid1D> {
        let g = &self.numerics.grid;
        Ok(Grid1D::new(g.length, g.points, MockPlanck::new(self.numerics.hbar)?)?)
    }

    fn hamiltonian(&self) -> Result<HamiltonianSpec> {
        Ok(HamiltonianSpec::new(self.model.kind.into(), self.two_species()?, self.grid()?))
    }

    fn ode_dt(&self) -> Result<f64> {
        let dt = self.numerics.dt.unwrap_or(1e-3);
        step_plan(dt, self.numerics.t_end)?;
        Ok(dt)
    }

    fn grid_dt(&self, spec: &HamiltonianSpec) -> Result<f64> {
        let unit = time_step_ratio(spec, 1.0);
        let dt = self.numerics.dt.unwrap_or(0.99 * TIME_STEP_LIMIT / unit);
        step_plan(dt, self.numerics.t_end)?;
        let ratio = unit * dt;
        if ratio > TIME_STEP_LIMIT {
            return Err(CliError::Validation(format!(
                "dt = {dt} gives dt max(|T|,|V|)/hbar = {ratio:.4} > {TIME_STEP_LIMIT}"
            )));
        }
        Ok(dt)
    }

    /// Builds every domain object the experiment needs; nothing is written.
    pub fn validate(&self) -> Result<Plan> {
        let n = &self.numerics;
        let t_end = n.t_end;
        match self.experiment {
            ExperimentKind::Classical => {
                let c = &self.classical;
                let lv = self.lv()?;
                let method: Method = c.method.into();
                if matches!(method, Method::Symplectic | Method::Leapfrog) {
                    CanonicalModel::from_lv(&lv)?;
                }
                check_initial(&c.initial, lv.species_count())?;
                Ok(Plan::Classical { lv, initial: c.initial.clone(), dt: self.ode_dt()?, t_end, method })
            }
            ExperimentKind::Stochastic => {
                let s = &self.stochastic;
                let lv = self.lv()?;
                check_initial(&s.initial, lv.species_count())?;
                if s.runs == 0 {
                    return Err(CliError::Validation("stochastic.runs must be at least 1".into()));
                }
                let noise = NoiseSpec::new(s.noise.into(), s.amplitude, n.seed)?;
                Ok(Plan::Stochastic { lv, initial: s.initial.clone(), dt: self.ode_dt()?, t_end, noise, runs: s.runs })
            }
            ExperimentKind::Spectrum => {
                let spec = self.hamiltonian()?;
                let levels = self.spectrum.levels;
                check_levels(levels, &spec.grid)?;
                Ok(Plan::Spectrum { spec, levels })
            }
            ExperimentKind::PsiEquation => {
                let spec = self.hamiltonian()?;
                let p = &self.psi_equation;
                if !(p.width > 0.0 && p.width.is_finite()) {
                    return Err(CliError::Validation(format!("psi_equation.width must be positive, got {}", p.width)));
                }
                if !(p.oracle_dt > 0.0 && p.oracle_dt.is_finite()) {
                    return Err(CliError::Validation(format!(
                        "psi_equation.oracle_dt must be positive, got {}",
                        p.oracle_dt
                    )));
                }
                let (c, w) = (p.centre, p.width);
                let (focus, k) = (p.focus, p.momentum);
                let fields = MadelungFields::from_fn(
                    spec.grid,
                    |q| (-(q - c).powi(2) / (2.0 * w * w)).exp(),
                    |q| 0.5 * focus * (q - c).powi(2) + k * q,
                )?
                .normalized()?;
                let dt = self.grid_dt(&spec)?;
                Ok(Plan::PsiEquation { spec, fields, dt, t_end, oracle_dt: p.oracle_dt })
            }
            ExperimentKind::Cancellation => {
                let spec = self.hamiltonian()?;
                let c = &self.cancellation;
                let psi0 = coherent_state(&spec.params, &spec.grid, CoherentStateSpec::new(c.amplitude, c.phase)?)?;
                let eta = EtaField::new(spec.grid, c.deficit, c.noise, n.seed)?;
                let dt = self.grid_dt(&spec)?;
                Ok(Plan::Cancellation { spec, psi0, eta, dt, t_end })
            }
            ExperimentKind::Thooft => {
                let th = &self.thooft;
                let spectrum = match (&th.spectrum, th.levels) {
                    (Some(s), None) => s.clone(),
                    (None, Some(levels)) => {
                        let ha = self.two_species()?.harmonic();
                        (0..levels).map(|k| ha.offset / n.hbar + ha.frequency * (k as f64 + 0.5)).collect()
                    }
                    _ => {
                        return Err(CliError::Validation("thooft needs exactly one of spectrum or levels".into()))
                    }
                };
                MockPlanck::new(n.hbar)?;
                let system = ThooftSystem::new(spectrum, th.kappa)?;
                let state0 = ThooftState::new(th.phi0, th.omega0)?;
                Ok(Plan::Thooft { system, state0, dt: self.ode_dt()?, t_end })
            }
            ExperimentKind::Uncertainty => {
                let params = self.two_species()?;
                let grid = self.grid()?;
                let u = &self.uncertainty;
                check_levels(u.levels, &grid)?;
                Ok(Plan::Uncertainty { params, grid, levels: u.levels, samples: u.samples, seed: n.seed })
            }
        }
    }
}

fn check_initial(initial: &[f64], species: usize) -> Result<()> {
    if initial.len() != species {
        return Err(CliError::Validation(format!(
            "initial has {} populations for {species} species",
            initial.len()
        )));
    }
    if initial.iter().any(|&n| !(n > 0.0 && n.is_finite())) {
        return Err(CliError::Validation("initial populations must be positive".into()));
    }
    Ok(())
}

fn check_levels(levels: usize, grid: &Grid1D) -> Result<()> {
    if levels == 0 || levels > grid.points() / 4 {
        return Err(CliError::Validation(format!("levels must be in 1..={}, got {levels}", grid.points() / 4)));
    }
    Ok(())
}

/// A validated experiment, ready to run.
#[derive(Debug, Clone)]
pub enum Plan {
    Classical { lv: LVParams, initial: Vec<f64>, dt: f64, t_end: f64, method: Method },
    Stochastic { lv: LVParams, initial: Vec<f64>, dt: f64, t_end: f64, noise: NoiseSpec, runs: usize },
    Spectrum { spec: HamiltonianSpec, levels: usize },
    PsiEquation { spec: HamiltonianSpec, fields: MadelungFields, dt: f64, t_end: f64, oracle_dt: f64 },
    Cancellation { spec: HamiltonianSpec, psi0: WaveFunction, eta: EtaField, dt: f64, t_end: f64 },
    Thooft { system: ThooftSystem, state0: ThooftState, dt: f64, t_end: f64 },
    Uncertainty { params: TwoSpeciesParams, grid: Grid1D, levels: usize, samples: usize, seed: u64 },
}
