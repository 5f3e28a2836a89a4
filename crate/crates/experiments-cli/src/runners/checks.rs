use nvsim_linalg::exec::Execution;
use nvsim_model::verify::transform_report;
use nvsim_model::HilbertLayout;
use nvsim_noise::{autocorrelation, fit_decay_constant, free_induction_decay, Curve, DecayFit};
use serde_json::json;

use crate::config::Resolved;
use crate::error::{ExperimentError, Result};
use crate::system::noise_params;
use crate::{ExperimentKind, RunOutput, Series};

fn to_series(label: &str, c: Curve, realizations: usize) -> Series {
    Series::new(label, c.times, c.mean, c.stderr, realizations)
}

/// OU autocorrelation over five correlation times and the free induction
/// decay over three coherence times, each with a one-parameter fit.
pub(crate) fn noise_verify(cfg: &Resolved) -> Result<RunOutput> {
    let t2 = cfg.t2e[0];
    let p = noise_params(cfg, t2)?;
    let exec = Execution::default();
    let auto = autocorrelation(p, 5.0 * cfg.tau, cfg.samples, cfg.realizations, cfg.seed, exec);
    let fid = free_induction_decay(p, 3.0 * t2, cfg.samples, cfg.realizations, cfg.seed, 8, exec);
    let (tau_fit, _) = fit_decay_constant(&auto.times, &auto.mean, DecayFit::Exponential, cfg.tau / 10.0, cfg.tau * 10.0);
    let (t2_fit, _) = fit_decay_constant(&fid.times, &fid.mean, DecayFit::Gaussian, t2 / 10.0, t2 * 10.0);
    let extra = json!({
        "strength_rad_s": p.strength,
        "tau_s": cfg.tau,
        "tau_fit_s": tau_fit,
        "tau_rel_error": (tau_fit / cfg.tau - 1.0).abs(),
        "t2_s": t2,
        "t2_fit_s": t2_fit,
        "t2_rel_error": (t2_fit / t2 - 1.0).abs(),
    });
    let series = vec![to_series("autocorrelation", auto, cfg.realizations), to_series("fid", fid, cfg.realizations)];
    Ok(RunOutput { experiment: ExperimentKind::NoiseVerify, series, extra })
}

/// Residuals of the polaron and Schrieffer–Wolff transforms.
pub(crate) fn transform_check(cfg: &Resolved) -> Result<RunOutput> {
    let n = cfg.n_centers[0];
    if n < 2 {
        return Err(ExperimentError::Validation("transform-check needs N >= 2".into()));
    }
    let p = cfg.params.system(n, cfg.n_max)?;
    let report = transform_report(&p, &HilbertLayout::for_params(&p)?)?;
    let bound = 10.0 * p.max_beta().powi(3);
    let extra = json!({
        "report": report,
        "sw_bound": bound,
        "chain_within_bound": report.chain_residual_ground <= bound,
        "coupling_within_bound": report.coupling_residual <= 1e-9,
    });
    Ok(RunOutput { experiment: ExperimentKind::TransformCheck, series: Vec::new(), extra })
}
