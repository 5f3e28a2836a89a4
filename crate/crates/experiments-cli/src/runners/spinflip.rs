use nvsim_dynamics::{sample_times, PulseSchedule, SampleState, UnitaryPropagator};
use nvsim_linalg::TensorLayout;
use nvsim_model::build_effective_hamiltonian;
use nvsim_model::pauli::{kron_states, plus};
use nvsim_observables::spin_flip_target;
use serde_json::json;

use crate::config::Resolved;
use crate::error::Result;
use crate::system::{convergence, max_deviation, noiseless_curve, Setup};
use crate::{ExperimentKind, RunOutput, Series};

/// Nuclear spin flip |++⟩ → |−−⟩ under the exact and the effective model.
pub(crate) fn spinflip(cfg: &Resolved) -> Result<RunOutput> {
    let n = 2;
    let setup = Setup::new(cfg, n, cfg.n_max)?;
    let t_end = cfg.t_end.unwrap_or(5e-3);
    let times = sample_times(t_end, cfg.samples);
    let target = spin_flip_target(n)?;
    let none = PulseSchedule::empty();

    let curve = |s: &Setup| noiseless_curve(s, &s.propagator()?, &none, t_end, &times, &target, cfg.drive_average);
    let (exact, avg) = curve(&setup)?;
    let report = convergence(cfg, n, &exact, |s| Ok(curve(s)?.0))?;

    let j = setup.couplings()?;
    let h_eff = build_effective_hamiltonian(&j, n)?;
    let prop = UnitaryPropagator::new(&h_eff, TensorLayout::new(vec![2; n])?, (0..n).collect())?;
    let res = prop.evolve(kron_states(&vec![plus(); n]).view(), t_end, &times, &none)?;
    let effective: Vec<f64> = res
        .states
        .iter()
        .map(|s| match s {
            SampleState::Pure(psi) => target.overlap(psi),
            SampleState::Mixed(_) => unreachable!("closed evolution"),
        })
        .collect();

    let jn = j.jn[[0, 1]];
    let deviation = max_deviation(&exact, &effective);
    let flip_time = std::f64::consts::PI / (2.0 * jn);
    let series = vec![
        Series::deterministic("exact", times.clone(), exact)
            .averaged(avg, 0.0)
            .with_convergence(report)
            .with_details(json!({ "max_deviation_from_effective": deviation })),
        Series::deterministic("effective", times, effective),
    ];
    let extra = json!({ "jn_rad_s": jn, "flip_time_s": flip_time, "max_deviation": deviation });
    Ok(RunOutput { experiment: ExperimentKind::Spinflip, series, extra })
}
