//! Physical model of N NV centers (electron + nuclear spin each) sharing one
//! mechanical mode, in the frame rotating with the microwave drive.
//!
//! Basis convention: index 0 is spin up (σ_z = +1). Tensor order is
//! e₁…e_N, n₁…n_N, oscillator.

mod hamiltonians;
mod layout;
mod params;
pub mod pauli;
mod transforms;
pub mod verify;

pub use hamiltonians::{
    build_effective_hamiltonian, build_exact_hamiltonian, build_graph_hamiltonian,
    build_polaron_hamiltonian, build_sw_hamiltonian, coupling_constants, CouplingMatrix,
};
pub use layout::HilbertLayout;
pub use params::{SystemParams, TWO_PI};
pub use transforms::{
    displacement_diagonal, displacement_operator, polaron_unitary, schrieffer_wolff_unitary,
    sw_transform_nuclear_drive, NuclearDriveTransform,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("layout ({layout_n} centers, fock {layout_fock}) does not match parameters ({n} centers, fock {fock})")]
    LayoutMismatch { layout_n: usize, layout_fock: usize, n: usize, fock: usize },
    #[error(transparent)]
    Linalg(#[from] nvsim_linalg::LinalgError),
}

pub type Result<T> = std::result::Result<T, ModelError>;
