use ndarray::Array1;
use nvsim_linalg::{partial_trace, reduce_pure, DensityMatrix, TensorLayout, C64};
use serde::Serialize;

use crate::Result;

#[derive(Debug, Clone)]
pub enum SampleState {
    Pure(Array1<C64>),
    Mixed(DensityMatrix),
}

impl SampleState {
    pub fn density(&self) -> DensityMatrix {
        match self {
            Self::Pure(psi) => {
                let n = psi.len();
                DensityMatrix::from_shape_fn((n, n), |(i, j)| psi[i] * psi[j].conj())
            }
            Self::Mixed(rho) => rho.clone(),
        }
    }

    /// Reduced density matrix of the `keep` factors.
    pub fn reduced(&self, layout: &TensorLayout, keep: &[usize]) -> Result<DensityMatrix> {
        Ok(match self {
            Self::Pure(psi) => reduce_pure(psi.view(), layout, keep)?,
            Self::Mixed(rho) => partial_trace(rho, layout, keep)?,
        })
    }

    /// Norm for pure states, trace for mixed ones.
    pub fn weight(&self) -> f64 {
        match self {
            Self::Pure(psi) => psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
            Self::Mixed(rho) => rho.diag().iter().map(|z| z.re).sum(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct EvolutionMeta {
    pub steps: usize,
    pub rejected_steps: usize,
    pub min_step: f64,
    pub max_step: f64,
    /// Largest deviation of norm (pure) or trace (mixed) from its initial value.
    pub max_drift: f64,
}

#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub times: Vec<f64>,
    pub states: Vec<SampleState>,
    pub meta: EvolutionMeta,
}

impl EvolutionResult {
    pub(crate) fn drift(states: &[SampleState], initial: f64) -> f64 {
        states.iter().map(|s| (s.weight() - initial).abs()).fold(0.0, f64::max)
    }
}
