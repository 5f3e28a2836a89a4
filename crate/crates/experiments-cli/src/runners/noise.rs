//! Bell-state preparation under OU dephasing.

use nvsim_dynamics::{sample_times, NoisyPropagator, NoisyScheme, PulseSchedule};
use nvsim_linalg::exec::{map_indexed, mean_stderr, Execution};
use nvsim_noise::{NoiseProcess, StreamKey};
use nvsim_observables::{bell_target, TargetState};
use serde_json::json;

use super::time_label;
use crate::config::Resolved;
use crate::error::Result;
use crate::system::{convergence, noise_params, noiseless_curve, schedule, Setup};
use crate::{ExperimentKind, RunOutput, Series};

/// Which species are noisy, by T₂*.
#[derive(Debug, Clone, Copy, Default)]
pub(super) struct Dephasing {
    pub electron_t2: Option<f64>,
    pub nuclear_t2: Option<f64>,
}

/// Column means and standard errors of equal-length rows.
pub(super) fn reduce(rows: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    (0..rows[0].len())
        .map(|k| {
            let col: Vec<f64> = rows.iter().map(|r| r[k]).collect();
            mean_stderr(&col)
        })
        .unzip()
}

/// Ensemble of noisy trajectories. Streams are keyed by realization and by
/// spin: electrons 0..N, nuclei N..2N.
#[allow(clippy::too_many_arguments)]
pub(super) fn noisy_series(
    cfg: &Resolved,
    setup: &Setup,
    pulses: &PulseSchedule,
    t_end: f64,
    times: &[f64],
    target: &TargetState,
    dephasing: Dephasing,
    label: String,
) -> Result<Series> {
    let n = setup.params.n_centers;
    let mut terms = Vec::new();
    let mut streams = Vec::new();
    for (electrons, t2, first) in [(true, dephasing.electron_t2, 0), (false, dephasing.nuclear_t2, n)] {
        if let Some(t2) = t2 {
            let p = noise_params(cfg, t2)?;
            for (i, term) in setup.noise_terms(electrons).into_iter().enumerate() {
                terms.push(term);
                streams.push((p, (first + i) as u32));
            }
        }
    }
    let dt = t_end / cfg.noise_steps as f64;
    let prop = NoisyPropagator::new(
        &setup.h,
        &terms,
        setup.layout.tensor().clone(),
        setup.layout.nuclei(),
        pulses,
        t_end,
        times,
        NoisyScheme::Interaction,
        dt,
    )?;
    let rows = map_indexed(Execution::default(), cfg.realizations, |r| -> Result<Vec<f64>> {
        let mut noise: Vec<NoiseProcess> = streams
            .iter()
            .map(|&(p, spin)| NoiseProcess::from_key(p, StreamKey { seed: cfg.seed, realization: r as u64, spin }))
            .collect();
        let states = prop.run(setup.psi0.view(), &mut noise)?;
        let mut row = states.iter().map(|psi| setup.fidelity(psi, target)).collect::<Result<Vec<f64>>>()?;
        let last = states.last().expect("samples");
        row.push(setup.drive_averaged(prop.spectral(), last, target, cfg.drive_average)?);
        Ok(row)
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let (mut mean, mut stderr) = reduce(&rows);
    let (am, ae) = (mean.pop().expect("row"), stderr.pop().expect("row"));
    Ok(Series::new(label, times.to_vec(), mean, stderr, cfg.realizations).averaged(am, ae))
}

/// Noiseless Bell run at `count` pulses with its truncation check.
fn noiseless_bell(cfg: &Resolved, setup: &Setup, count: usize, t_end: f64, times: &[f64], target: &TargetState) -> Result<Series> {
    let pulses = schedule(cfg.pulse_timing, count, t_end, 2)?;
    let curve = |s: &Setup| noiseless_curve(s, &s.propagator()?, &pulses, t_end, times, target, cfg.drive_average);
    let (values, avg) = curve(setup)?;
    let report = convergence(cfg, 2, &values, |s| Ok(curve(s)?.0))?;
    Ok(Series::deterministic(format!("noiseless_pulses-{count}"), times.to_vec(), values)
        .averaged(avg, 0.0)
        .with_convergence(report)
        .with_details(json!({ "pulses": count })))
}

struct Bell {
    setup: Setup,
    t_end: f64,
    times: Vec<f64>,
    target: TargetState,
}

impl Bell {
    fn new(cfg: &Resolved) -> Result<Self> {
        let setup = Setup::new(cfg, 2, cfg.n_max)?;
        let t_end = cfg.t_end.unwrap_or(std::f64::consts::PI / (4.0 * setup.jn()?));
        let times = sample_times(t_end, cfg.samples);
        Ok(Self { setup, t_end, times, target: bell_target(2)? })
    }

    fn noisy(&self, cfg: &Resolved, count: usize, dephasing: Dephasing, label: String) -> Result<Series> {
        let pulses = schedule(cfg.pulse_timing, count, self.t_end, 2)?;
        let s = noisy_series(cfg, &self.setup, &pulses, self.t_end, &self.times, &self.target, dephasing, label)?;
        Ok(s.with_details(json!({
            "pulses": count,
            "t2e_s": dephasing.electron_t2,
            "t2n_s": dephasing.nuclear_t2,
        })))
    }

    fn noiseless(&self, cfg: &Resolved, count: usize) -> Result<Series> {
        noiseless_bell(cfg, &self.setup, count, self.t_end, &self.times, &self.target)
    }
}

pub(crate) fn bell_nuclear_noise(cfg: &Resolved) -> Result<RunOutput> {
    let bell = Bell::new(cfg)?;
    let mut series = Vec::new();
    for &count in &cfg.pulses {
        series.push(bell.noiseless(cfg, count)?);
        for &t2 in &cfg.t2n {
            let d = Dephasing { nuclear_t2: Some(t2), ..Default::default() };
            series.push(bell.noisy(cfg, count, d, format!("t2n-{}_pulses-{count}", time_label(t2)))?);
        }
    }
    Ok(RunOutput { experiment: ExperimentKind::BellNuclearNoise, series, extra: json!({ "t_end_s": bell.t_end }) })
}

pub(crate) fn bell_electron_noise(cfg: &Resolved) -> Result<RunOutput> {
    let bell = Bell::new(cfg)?;
    let mut series = Vec::new();
    let mut counts: Vec<usize> = cfg.pulses.iter().chain(&cfg.combined_pulses).copied().collect();
    counts.sort_unstable();
    counts.dedup();
    for &count in &counts {
        series.push(bell.noiseless(cfg, count)?);
    }
    for &count in &cfg.pulses {
        for &t2 in &cfg.t2e {
            let d = Dephasing { electron_t2: Some(t2), ..Default::default() };
            series.push(bell.noisy(cfg, count, d, format!("t2e-{}_pulses-{count}", time_label(t2)))?);
        }
    }
    let (t2e, t2n) = (cfg.t2e[0], cfg.t2n[0]);
    let mut best: Option<(usize, f64)> = None;
    for &count in &cfg.combined_pulses {
        let d = Dephasing { electron_t2: Some(t2e), nuclear_t2: Some(t2n) };
        let s = bell.noisy(cfg, count, d, format!("combined_pulses-{count}"))?;
        let f = s.headline().0;
        if best.map_or(true, |(_, b)| f > b) {
            best = Some((count, f));
        }
        series.push(s);
    }
    let extra = json!({
        "t_end_s": bell.t_end,
        "combined_best": best.map(|(c, f)| json!({ "pulses": c, "averaged_mean": f })),
    });
    Ok(RunOutput { experiment: ExperimentKind::BellElectronNoise, series, extra })
}
