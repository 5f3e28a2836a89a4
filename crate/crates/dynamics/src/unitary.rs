use ndarray::{Array1, ArrayView1};
use nvsim_linalg::{policy, BlockSpectral, Operator, TensorLayout, C64};

use crate::plan::{sample_times, StepPlan};
use crate::pulses::{apply_pi_pulse, PulseSchedule};
use crate::result::{EvolutionMeta, EvolutionResult, SampleState};
use crate::{DynamicsError, Result};

/// Closed-system propagator built from one cached block decomposition.
#[derive(Debug, Clone)]
pub struct UnitaryPropagator {
    spectral: BlockSpectral,
    layout: TensorLayout,
    nuclear_slots: Vec<usize>,
}

impl UnitaryPropagator {
    /// `nuclear_slots[i]` is the tensor factor of nuclear spin `i`, used to place pulses.
    pub fn new(h: &Operator, layout: TensorLayout, nuclear_slots: Vec<usize>) -> Result<Self> {
        if h.nrows() != layout.total_dim() {
            return Err(DynamicsError::InvalidArgument("Hamiltonian does not match layout".into()));
        }
        Ok(Self { spectral: BlockSpectral::new(h)?, layout, nuclear_slots })
    }

    pub fn spectral(&self) -> &BlockSpectral {
        &self.spectral
    }

    pub fn layout(&self) -> &TensorLayout {
        &self.layout
    }

    pub(crate) fn pulse_slots(nuclear_slots: &[usize], pulses: &PulseSchedule) -> Result<Vec<usize>> {
        pulses
            .targets
            .iter()
            .map(|&i| {
                nuclear_slots
                    .get(i)
                    .copied()
                    .ok_or_else(|| DynamicsError::InvalidArgument(format!("no nuclear spin {i}")))
            })
            .collect()
    }

    /// States at `samples` with instantaneous pulses interleaved.
    pub fn evolve(&self, psi0: ArrayView1<C64>, t_end: f64, samples: &[f64], pulses: &PulseSchedule) -> Result<EvolutionResult> {
        if psi0.len() != self.spectral.dim() {
            return Err(DynamicsError::InvalidArgument("state does not match Hamiltonian".into()));
        }
        let slots = Self::pulse_slots(&self.nuclear_slots, pulses)?;
        let plan = StepPlan::new(t_end, samples, &pulses.times, t_end)?;
        let norm0 = psi0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let mut states = Vec::with_capacity(samples.len());
        let mut c = self.spectral.to_eigen(psi0);
        for _ in 0..plan.initial_samples {
            states.push(SampleState::Pure(psi0.to_owned()));
        }
        for step in &plan.steps {
            self.spectral.advance(&mut c, plan.lengths[step.length]);
            if step.pulse.is_some() {
                let mut psi = self.spectral.to_bare(&c);
                apply_pi_pulse(&mut psi, &self.layout, &slots, pulses.axis)?;
                c = self.spectral.to_eigen(psi.view());
            }
            if step.samples.1 > step.samples.0 {
                let psi = self.spectral.to_bare(&c);
                for _ in step.samples.0..step.samples.1 {
                    states.push(SampleState::Pure(psi.clone()));
                }
            }
        }
        let drift = EvolutionResult::drift(&states, norm0);
        if drift > policy().norm_tol {
            return Err(DynamicsError::NormDrift { drift });
        }
        let meta = EvolutionMeta {
            steps: plan.steps.len(),
            rejected_steps: 0,
            min_step: plan.min_step(),
            max_step: plan.max_step(),
            max_drift: drift,
        };
        Ok(EvolutionResult { times: samples.to_vec(), states, meta })
    }
}

/// ψ(t_k) = e^{−iht_k}ψ₀ on `samples` equally spaced times in [0, T].
pub fn evolve_unitary(h: &Operator, psi0: &Array1<C64>, t_end: f64, samples: usize) -> Result<EvolutionResult> {
    let layout = TensorLayout::new(vec![h.nrows()])?;
    UnitaryPropagator::new(h, layout, Vec::new())?.evolve(psi0.view(), t_end, &sample_times(t_end, samples), &PulseSchedule::empty())
}
