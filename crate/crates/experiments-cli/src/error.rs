use thiserror::Error;

use crate::ConvergenceReport;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("oscillator truncation not converged: change {} > {} between n_max {} and {}", .0.max_deviation, .0.tolerance, .0.n_max, .0.n_max_check)]
    Convergence(ConvergenceReport),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl ExperimentError {
    /// 2 for validation errors, 3 for convergence failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) => 2,
            Self::Convergence(_) => 3,
            _ => 1,
        }
    }
}

macro_rules! numerical {
    ($($t:ty),*) => {$(
        impl From<$t> for ExperimentError {
            fn from(e: $t) -> Self {
                Self::Numerical(e.to_string())
            }
        }
    )*};
}

numerical!(
    nvsim_linalg::LinalgError,
    nvsim_dynamics::DynamicsError,
    nvsim_observables::ObservablesError,
    nvsim_noise::NoiseError
);

impl From<nvsim_model::ModelError> for ExperimentError {
    fn from(e: nvsim_model::ModelError) -> Self {
        match e {
            nvsim_model::ModelError::InvalidParams(m) => Self::Validation(m),
            other => Self::Numerical(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for ExperimentError {
    fn from(e: serde_json::Error) -> Self {
        Self::Validation(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, ExperimentError>;
