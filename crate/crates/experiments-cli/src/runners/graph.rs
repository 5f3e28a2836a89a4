use nvsim_dynamics::{sample_times, SampleState, UnitaryPropagator};
use nvsim_linalg::TensorLayout;
use nvsim_model::build_graph_hamiltonian;
use nvsim_model::pauli::{kron_states, plus};
use nvsim_observables::{pulsed_graph_target, GraphSpec};
use serde_json::json;

use super::noise::{noisy_series, Dephasing};
use crate::config::Resolved;
use crate::error::Result;
use crate::system::{convergence, noiseless_curve, schedule, Setup};
use crate::{ExperimentKind, RunOutput, Series};

/// Complete-graph state preparation: ideal gate Hamiltonian, exact model
/// without noise, and exact model with both dephasing channels.
pub(crate) fn graph(cfg: &Resolved) -> Result<RunOutput> {
    let mut series = Vec::new();
    for &n in &cfg.n_centers {
        let setup = Setup::new(cfg, n, cfg.n_max)?;
        let j = setup.couplings()?;
        let t_end = cfg.t_end.unwrap_or(std::f64::consts::PI / (4.0 * j.jn[[0, 1]]));
        let times = sample_times(t_end, cfg.samples);
        for &count in &cfg.pulses {
            let pulses = schedule(cfg.pulse_timing, count, t_end, n)?;
            let target = pulsed_graph_target(&GraphSpec::complete(n), &j, &pulses, t_end)?;
            let tag = format!("n{n}_pulses-{count}");
            let details = json!({ "n_centers": n, "pulses": count });

            let ideal = UnitaryPropagator::new(&build_graph_hamiltonian(&j, n)?, TensorLayout::new(vec![2; n])?, (0..n).collect())?;
            let res = ideal.evolve(kron_states(&vec![plus(); n]).view(), t_end, &times, &pulses)?;
            let values = res
                .states
                .iter()
                .map(|s| match s {
                    SampleState::Pure(psi) => target.overlap(psi),
                    SampleState::Mixed(_) => unreachable!("closed evolution"),
                })
                .collect();
            series.push(Series::deterministic(format!("{tag}_ideal"), times.clone(), values).with_details(details.clone()));

            let curve = |s: &Setup| noiseless_curve(s, &s.propagator()?, &pulses, t_end, &times, &target, cfg.drive_average);
            let (values, avg) = curve(&setup)?;
            let report = convergence(cfg, n, &values, |s| Ok(curve(s)?.0))?;
            series.push(
                Series::deterministic(format!("{tag}_noiseless"), times.clone(), values)
                    .averaged(avg, 0.0)
                    .with_convergence(report)
                    .with_details(details.clone()),
            );

            let d = Dephasing { electron_t2: Some(cfg.t2e[0]), nuclear_t2: Some(cfg.t2n[0]) };
            let noisy = noisy_series(cfg, &setup, &pulses, t_end, &times, &target, d, format!("{tag}_noisy"))?;
            series.push(noisy.with_details(json!({ "n_centers": n, "pulses": count, "t2e_s": d.electron_t2, "t2n_s": d.nuclear_t2 })));
        }
    }
    Ok(RunOutput { experiment: ExperimentKind::Graph, series, extra: serde_json::Value::Null })
}
