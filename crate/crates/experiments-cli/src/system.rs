//! Shared setup: system construction, schedules, noise terms and the
//! drive-period average.

use nvsim_dynamics::{cpmg_schedule, periodic_schedule, NoiseTerm, PulseSchedule, SampleState, UnitaryPropagator};
use nvsim_linalg::{reduce_pure, BlockSpectral, Operator, StateVector};
use nvsim_model::pauli::{fock, plus};
use nvsim_model::{build_exact_hamiltonian, coupling_constants, CouplingMatrix, HilbertLayout, SystemParams};
use nvsim_noise::{calibrate_strength, NoiseParams};
use nvsim_observables::{state_fidelity, TargetState};

use crate::config::{PulseTiming, Resolved};
use crate::error::Result;
use crate::ConvergenceReport;

/// Exact model of N centers at one truncation, starting from |+⟩^{2N}|0⟩.
pub(crate) struct Setup {
    pub params: SystemParams,
    pub layout: HilbertLayout,
    pub h: Operator,
    pub psi0: StateVector,
}

impl Setup {
    pub fn new(cfg: &Resolved, n: usize, n_max: usize) -> Result<Self> {
        let params = cfg.params.system(n, n_max)?;
        let layout = HilbertLayout::for_params(&params)?;
        let h = build_exact_hamiltonian(&params, &layout)?;
        let mut parts = vec![plus(); 2 * n];
        parts.push(fock(n_max, 0));
        let psi0 = layout.product_state(&parts)?;
        Ok(Self { params, layout, h, psi0 })
    }

    pub fn couplings(&self) -> Result<CouplingMatrix> {
        Ok(coupling_constants(&self.params)?)
    }

    /// Nuclear coupling between centers 0 and 1, rad/s.
    pub fn jn(&self) -> Result<f64> {
        Ok(self.couplings()?.jn[[0, 1]])
    }

    pub fn propagator(&self) -> Result<UnitaryPropagator> {
        Ok(UnitaryPropagator::new(&self.h, self.layout.tensor().clone(), self.layout.nuclei())?)
    }

    /// Drive period 2π/Ω₁.
    pub fn drive_period(&self) -> f64 {
        std::f64::consts::TAU / self.params.rabi[0]
    }

    pub fn fidelity(&self, psi: &StateVector, target: &TargetState) -> Result<f64> {
        let rho = reduce_pure(psi.view(), self.layout.tensor(), &self.layout.nuclei())?;
        Ok(state_fidelity(&rho, target)?)
    }

    /// Mean fidelity over `points` midpoints of [t − P, t + P], each reached
    /// from `psi` (the state at t) with the noiseless Hamiltonian.
    pub fn drive_averaged(&self, spectral: &BlockSpectral, psi: &StateVector, target: &TargetState, points: usize) -> Result<f64> {
        if points == 0 {
            return self.fidelity(psi, target);
        }
        let p = self.drive_period();
        let mut sum = 0.0;
        for m in 0..points {
            let off = -p + (m as f64 + 0.5) * 2.0 * p / points as f64;
            sum += self.fidelity(&spectral.evolve(psi.view(), off), target)?;
        }
        Ok(sum / points as f64)
    }

    /// ½σ_z on every electron (or nucleus) as diagonal noise terms.
    pub fn noise_terms(&self, electrons: bool) -> Vec<NoiseTerm> {
        let l = &self.layout;
        let slots = if electrons { l.electrons() } else { l.nuclei() };
        slots.into_iter().map(|s| NoiseTerm::from_diagonal(l.diagonal(&[(s, &[0.5, -0.5])]))).collect()
    }
}

pub(crate) fn schedule(timing: PulseTiming, count: usize, t_end: f64, n: usize) -> Result<PulseSchedule> {
    if count == 0 {
        return Ok(PulseSchedule::empty());
    }
    let s = match timing {
        PulseTiming::Cpmg => cpmg_schedule(count, t_end)?,
        PulseTiming::Periodic => periodic_schedule(count, t_end)?,
    };
    Ok(s.on_all(n))
}

/// OU parameters for a coherence time, τ from the config.
pub(crate) fn noise_params(cfg: &Resolved, t2: f64) -> Result<NoiseParams> {
    Ok(NoiseParams::new(cfg.tau, calibrate_strength(t2)?)?)
}

/// Noiseless fidelity curve at `samples`, plus the drive-averaged final value.
pub(crate) fn noiseless_curve(
    setup: &Setup,
    prop: &UnitaryPropagator,
    pulses: &PulseSchedule,
    t_end: f64,
    samples: &[f64],
    target: &TargetState,
    avg_points: usize,
) -> Result<(Vec<f64>, f64)> {
    let res = prop.evolve(setup.psi0.view(), t_end, samples, pulses)?;
    let mut curve = Vec::with_capacity(samples.len());
    let mut last = None;
    for s in &res.states {
        let psi = match s {
            SampleState::Pure(p) => p,
            SampleState::Mixed(_) => unreachable!("unitary evolution yields pure states"),
        };
        curve.push(setup.fidelity(psi, target)?);
        last = Some(psi);
    }
    let last = last.expect("at least two samples");
    let avg = setup.drive_averaged(prop.spectral(), last, target, avg_points)?;
    Ok((curve, avg))
}

pub(crate) fn max_deviation(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Compares noiseless curves at `n_max` and `n_max + 4`.
pub(crate) fn convergence(
    cfg: &Resolved,
    n: usize,
    base: &[f64],
    mut rerun: impl FnMut(&Setup) -> Result<Vec<f64>>,
) -> Result<ConvergenceReport> {
    let check = cfg.n_max + 4;
    let other = rerun(&Setup::new(cfg, n, check)?)?;
    let dev = max_deviation(base, &other);
    Ok(ConvergenceReport {
        n_max: cfg.n_max,
        n_max_check: check,
        max_deviation: dev,
        tolerance: cfg.convergence_tol,
        passed: dev < cfg.convergence_tol,
    })
}
