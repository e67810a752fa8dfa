// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("interaction matrix is not antisymmetric at ({row}, {col})")]
    NotAntisymmetric { row: usize, col: usize },

    #[error("interaction matrix is singular; the fixed point is not unique")]
    SingularInteractionMatrix,

    #[error("fixed point has non-positive components: {q:?}")]
    NonpositiveFixedPoint { q: Vec<f64> },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("non-finite value produced in {0}")]
    NonFinite(&'static str),

    #[error("integration blew up at t = {t}")]
    BlowUp { t: f64 },

    #[error("level set at E = {energy} did not close within t = {t_max}")]
    OpenOrbit { energy: f64, t_max: f64 },

    #[error("wave function has a node at grid index {index} (|psi| = {value:e})")]
    NodeEncountered { index: usize, value: f64 },

    #[error("spectral weight {weight:e} beyond 0.8 p_max exceeds 1e-10")]
    MomentumLeakage { weight: f64 },

    #[error("time step too large: dt max|H| / hbar = {ratio} > {limit}")]
    TimeStepTooLarge { ratio: f64, limit: f64 },

    #[error("grid too small: turning point {turning_point} exceeds L/4 = {quarter}")]
    GridTooSmall { turning_point: f64, quarter: f64 },

    #[error("eigensolver did not converge after {iterations} iterations (max residual {residual:e})")]
    ConvergenceFailure { iterations: usize, residual: f64 },

    #[error("characteristic jacobian changed sign at t = {t} (sample {sample})")]
    CausticEncountered { t: f64, sample: usize },

    #[error("density collapse suggests a caustic at t = {t}")]
    CausticSuspected { t: f64 },

    #[error("f^2 increased at t = {t} even after step halving")]
    StepTooLarge { t: f64 },

    #[error("spectrum is empty")]
    EmptySpectrum,

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("{0} requires a canonical P^2/2m kinetic term")]
    UnsupportedKinetic(&'static str),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}
