//! Dense complex linear algebra primitives.
//!
//! Operators are plain `ndarray` matrices of [`C64`]; states are vectors.
//! Everything here is layout-agnostic: tensor structure is described by a
//! [`TensorLayout`], a list of subsystem dimensions.

mod blocks;
mod eigen;
mod error;
pub mod exec;
mod expm;
mod ops;
mod policy;
mod trace;

pub use blocks::{Block, BlockSpectral};
pub use eigen::{spectral_decompose, Spectral};
pub use error::LinalgError;
pub use expm::{expm, expm_hermitian, expm_pade};
pub use ops::{
    check_density, check_finite, commutator, dagger, embed, hermiticity_defect, identity,
    inner, kron, kron_all, max_abs, operator_inner, project_coefficient, spectral_norm,
    state_norm, unitarity_defect,
};
pub use policy::{policy, set_policy, NumericalPolicy};
pub use trace::{partial_trace, reduce_pure, TensorLayout};

pub use num_complex::Complex64 as C64;

/// Square complex matrix.
pub type Operator = ndarray::Array2<C64>;
/// Complex state vector.
pub type StateVector = ndarray::Array1<C64>;
/// Density matrix; validated with [`check_density`].
pub type DensityMatrix = ndarray::Array2<C64>;

pub type Result<T> = std::result::Result<T, LinalgError>;

/// Shorthand for a real complex number.
#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Shorthand for an imaginary complex number.
#[inline]
pub fn im(x: f64) -> C64 {
    C64::new(0.0, x)
}
