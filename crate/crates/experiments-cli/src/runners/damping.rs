use nvsim_dynamics::{sample_times, LindbladSpec, SecularLindblad, SecularOptions, SecularSnapshot};
use nvsim_linalg::{partial_trace, Operator};
use nvsim_model::pauli::annihilation;
use nvsim_observables::{bell_target, state_fidelity, TargetState};
use serde_json::json;

use crate::config::Resolved;
use crate::error::{ExperimentError, Result};
use crate::system::{max_deviation, Setup};
use crate::{ConvergenceReport, ExperimentKind, RunOutput, Series};

struct Damped {
    curve: Vec<f64>,
    averaged: f64,
    trace_drift: f64,
    kept_tuples: usize,
    steps: usize,
}

fn fidelity_at(sec: &SecularLindblad, setup: &Setup, snap: &SecularSnapshot, offset: f64, target: &TargetState) -> Result<f64> {
    let rho = sec.density(snap, offset);
    let rho_n = partial_trace(&rho, setup.layout.tensor(), &setup.layout.nuclei())?;
    Ok(state_fidelity(&rho_n, target)?)
}

fn damped_run(cfg: &Resolved, setup: &Setup, q: f64, times: &[f64], target: &TargetState) -> Result<Damped> {
    let l = &setup.layout;
    let a = l.product(&[(l.oscillator(), &annihilation(l.fock_dim()))])?;
    let spec = LindbladSpec::from_quality(setup.params.osc_freq, q, cfg.n_bar)?;
    let opts = SecularOptions { delta: cfg.secular_delta, ..Default::default() };
    let sec = SecularLindblad::new(&setup.h, &spec, &a, opts)?;
    let psi = &setup.psi0;
    let rho0 = Operator::from_shape_fn((psi.len(), psi.len()), |(i, j)| psi[i] * psi[j].conj());
    let (snaps, stats) = sec.evolve(&rho0, times)?;
    let trace_drift = snaps.iter().map(|s| (sec.trace(s) - 1.0).abs()).fold(0.0, f64::max);
    if trace_drift > 1e-6 {
        return Err(ExperimentError::Numerical(format!("trace drifted by {trace_drift:.3e} at Q = {q}")));
    }
    let curve = snaps.iter().map(|s| fidelity_at(&sec, setup, s, 0.0, target)).collect::<Result<Vec<_>>>()?;
    let last = snaps.last().expect("samples");
    let averaged = match cfg.drive_average {
        0 => *curve.last().expect("samples"),
        m => {
            let p = setup.drive_period();
            let mut sum = 0.0;
            for k in 0..m {
                sum += fidelity_at(&sec, setup, last, -p + (k as f64 + 0.5) * 2.0 * p / m as f64, target)?;
            }
            sum / m as f64
        }
    };
    Ok(Damped { curve, averaged, trace_drift, kept_tuples: stats.kept_tuples, steps: stats.accepted_steps })
}

/// Bell-state preparation with a thermally damped oscillator, one run per Q.
/// The truncation check reruns the most strongly damped Q at n_max + 4.
pub(crate) fn bell_damping(cfg: &Resolved) -> Result<RunOutput> {
    let setup = Setup::new(cfg, 2, cfg.n_max)?;
    let t_end = cfg.t_end.unwrap_or(std::f64::consts::PI / (4.0 * setup.jn()?));
    let times = sample_times(t_end, cfg.samples);
    let target = bell_target(2)?;
    let q_check = cfg.q_factor.iter().copied().fold(f64::INFINITY, f64::min);
    let mut series = Vec::new();
    for &q in &cfg.q_factor {
        let run = damped_run(cfg, &setup, q, &times, &target)?;
        let mut s = Series::deterministic(format!("q-{q:e}"), times.clone(), run.curve.clone())
            .averaged(run.averaged, 0.0)
            .with_details(json!({
                "q_factor": q,
                "n_bar": cfg.n_bar,
                "gamma_per_s": setup.params.osc_freq / q,
                "trace_drift": run.trace_drift,
                "kept_tuples": run.kept_tuples,
                "accepted_steps": run.steps,
            }));
        if q == q_check {
            let check = Setup::new(cfg, 2, cfg.n_max + 4)?;
            let other = damped_run(cfg, &check, q, &times, &target)?;
            let dev = max_deviation(&run.curve, &other.curve);
            s = s.with_convergence(ConvergenceReport {
                n_max: cfg.n_max,
                n_max_check: cfg.n_max + 4,
                max_deviation: dev,
                tolerance: cfg.convergence_tol,
                passed: dev < cfg.convergence_tol,
            });
        }
        series.push(s);
    }
    Ok(RunOutput { experiment: ExperimentKind::BellDamping, series, extra: json!({ "t_end_s": t_end }) })
}
