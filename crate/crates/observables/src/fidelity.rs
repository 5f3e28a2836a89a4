use nvsim_dynamics::{EvolutionResult, SampleState};
use nvsim_linalg::{reduce_pure, spectral_decompose, DensityMatrix, StateVector, TensorLayout, C64};
use nvsim_model::HilbertLayout;

use crate::targets::TargetState;
use crate::{ObservablesError, Result};

/// ⟨target|ρ|target⟩ for a nuclear density matrix.
pub fn state_fidelity(rho: &DensityMatrix, target: &TargetState) -> Result<f64> {
    let t = &target.state;
    if rho.nrows() != t.len() {
        return Err(ObservablesError::DimensionMismatch { target: t.len(), nuclear: rho.nrows() });
    }
    let rt = rho.dot(t);
    Ok(t.iter().zip(rt.iter()).map(|(a, b)| a.conj() * b).sum::<C64>().re)
}

fn check(layout: &HilbertLayout, target: &TargetState) -> Result<()> {
    let dn = 1usize << layout.n_centers();
    if target.state.len() != dn {
        return Err(ObservablesError::DimensionMismatch { target: target.state.len(), nuclear: dn });
    }
    Ok(())
}

/// Fidelity of the nuclear marginal of a full-layout pure state.
pub fn nuclear_fidelity(psi: &StateVector, layout: &HilbertLayout, target: &TargetState) -> Result<f64> {
    check(layout, target)?;
    state_fidelity(&reduce_pure(psi.view(), layout.tensor(), &layout.nuclei())?, target)
}

/// ⟨target|Tr_{e,osc} ρ(t)|target⟩ at every sample.
pub fn fidelity_curve(result: &EvolutionResult, target: &TargetState, layout: &HilbertLayout) -> Result<Vec<f64>> {
    check(layout, target)?;
    result
        .states
        .iter()
        .map(|s| {
            let rho = match s {
                SampleState::Pure(p) => reduce_pure(p.view(), layout.tensor(), &layout.nuclei())?,
                SampleState::Mixed(_) => s.reduced(layout.tensor(), &layout.nuclei())?,
            };
            state_fidelity(&rho, target)
        })
        .collect()
}

/// Von Neumann entropy (bits) of spin `k` of an N-spin pure state.
pub fn entanglement_entropy(state: &StateVector, n: usize, k: usize) -> Result<f64> {
    if state.len() != 1usize << n || k >= n {
        return Err(ObservablesError::InvalidArgument(format!("spin {k} of a {n}-spin state of length {}", state.len())));
    }
    let rho = reduce_pure(state.view(), &TensorLayout::new(vec![2; n])?, &[k])?;
    let p = spectral_decompose(&rho)?.values;
    Ok(p.iter().filter(|&&x| x > 1e-15).map(|&x| -x * x.log2()).sum())
}
