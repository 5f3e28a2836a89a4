//! Target states on the nuclear subspace and fidelities against them.
//!
//! Nuclear basis index bits run n₁…n_N from most to least significant;
//! bit value 0 is spin up.

mod fidelity;
mod graph;
mod lu;
mod targets;

pub use fidelity::{entanglement_entropy, fidelity_curve, nuclear_fidelity, state_fidelity};
pub use graph::{graph_state, pulsed_graph_target, GraphSpec};
pub use lu::{find_local_unitaries, LocalUnitaries, LuOptions};
pub use targets::{bell_target, ghz_state, spin_flip_target, TargetState};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ObservablesError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("target has dimension {target}, nuclear subspace has {nuclear}")]
    DimensionMismatch { target: usize, nuclear: usize },
    #[error("no local unitary found: best overlap {best:.9}")]
    LuNotFound { best: f64 },
    #[error(transparent)]
    Linalg(#[from] nvsim_linalg::LinalgError),
    #[error(transparent)]
    Model(#[from] nvsim_model::ModelError),
    #[error(transparent)]
    Dynamics(#[from] nvsim_dynamics::DynamicsError),
}

pub type Result<T> = std::result::Result<T, ObservablesError>;
