//! Time evolution of states and density matrices.
//!
//! Closed systems use cached block spectral decompositions. Open systems
//! use either a direct adaptive Runge–Kutta integration of the master
//! equation or a secular eigenbasis scheme for large oscillator
//! truncations. Stochastic dephasing is integrated with piecewise-constant
//! noise, via Strang splitting or a first-order Magnus step in the
//! interaction picture.

mod dp45;
mod ensemble;
mod lindblad;
mod noisy;
mod plan;
mod pulses;
mod result;
mod secular;
mod unitary;

pub use dp45::{Dp45, Dp45Options, Dp45Stats};
pub use ensemble::{ensemble_average, EnsembleStats};
pub use lindblad::{evolve_lindblad, lindblad_rhs, LindbladSpec};
pub use noisy::{evolve_noisy, NoiseTerm, NoisyOptions, NoisyPropagator, NoisyScheme};
pub use plan::{sample_times, StepPlan};
pub use pulses::{apply_pi_pulse, cpmg_schedule, periodic_schedule, pulse_operator, PulseAxis, PulseSchedule};
pub use result::{EvolutionMeta, EvolutionResult, SampleState};
pub use secular::{SecularLindblad, SecularOptions, SecularSnapshot, SecularStats};
pub use unitary::{evolve_unitary, UnitaryPropagator};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error(transparent)]
    Linalg(#[from] nvsim_linalg::LinalgError),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("step size underflow at t = {t:.6e} s (h = {h:.3e} s)")]
    StepUnderflow { t: f64, h: f64 },
    #[error("positivity violated: eigenvalue {min_eigenvalue:.3e} at t = {t:.6e} s")]
    Positivity { t: f64, min_eigenvalue: f64 },
    #[error("trace drift {drift:.3e} exceeds tolerance")]
    TraceDrift { drift: f64 },
    #[error("norm drift {drift:.3e} exceeds tolerance")]
    NormDrift { drift: f64 },
}

pub type Result<T> = std::result::Result<T, DynamicsError>;
