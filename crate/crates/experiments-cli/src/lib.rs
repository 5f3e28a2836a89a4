//! Experiment runners for the NV-array simulations and their CSV/JSON
//! output. The `nvsim` binary is a thin shell over [`execute`].

pub mod config;
mod error;
pub mod output;
mod runners;
mod system;

use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use config::{ExperimentConfig, ExperimentKind, ParamsHz, Profile, PulseTiming, Resolved};
pub use error::{ExperimentError, Result};
pub use output::{write_csv, write_outputs, Sidecar};

/// Change of a noiseless observable between two oscillator truncations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub n_max: usize,
    pub n_max_check: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// One output curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub label: String,
    #[serde(skip)]
    pub times: Vec<f64>,
    #[serde(skip)]
    pub mean: Vec<f64>,
    #[serde(skip)]
    pub stderr: Vec<f64>,
    /// 1 for deterministic curves.
    pub realizations: usize,
    pub final_mean: f64,
    pub final_stderr: f64,
    /// Final value averaged over one drive period either side.
    pub averaged_mean: Option<f64>,
    pub averaged_stderr: Option<f64>,
    pub convergence: Option<ConvergenceReport>,
    /// Run-specific settings and derived numbers.
    pub details: serde_json::Value,
}

impl Series {
    pub(crate) fn new(label: impl Into<String>, times: Vec<f64>, mean: Vec<f64>, stderr: Vec<f64>, realizations: usize) -> Self {
        let final_mean = mean.last().copied().unwrap_or(f64::NAN);
        let final_stderr = stderr.last().copied().unwrap_or(f64::NAN);
        Self {
            label: label.into(),
            times,
            mean,
            stderr,
            realizations,
            final_mean,
            final_stderr,
            averaged_mean: None,
            averaged_stderr: None,
            convergence: None,
            details: serde_json::Value::Null,
        }
    }

    pub(crate) fn deterministic(label: impl Into<String>, times: Vec<f64>, values: Vec<f64>) -> Self {
        let zeros = vec![0.0; values.len()];
        Self::new(label, times, values, zeros, 1)
    }

    pub(crate) fn averaged(mut self, mean: f64, stderr: f64) -> Self {
        self.averaged_mean = Some(mean);
        self.averaged_stderr = Some(stderr);
        self
    }

    pub(crate) fn with_details(mut self, details: serde_json::Value) -> Self {
        self.details = details;
        self
    }

    pub(crate) fn with_convergence(mut self, report: ConvergenceReport) -> Self {
        self.convergence = Some(report);
        self
    }

    /// Averaged final value when present, else the last sample.
    pub fn headline(&self) -> (f64, f64) {
        match (self.averaged_mean, self.averaged_stderr) {
            (Some(m), Some(s)) => (m, s),
            _ => (self.final_mean, self.final_stderr),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOutput {
    pub experiment: ExperimentKind,
    pub series: Vec<Series>,
    /// Experiment-level results that are not curves.
    pub extra: serde_json::Value,
}

impl RunOutput {
    pub fn series(&self, label: &str) -> Option<&Series> {
        self.series.iter().find(|s| s.label == label)
    }

    pub fn convergence_failure(&self) -> Option<&ConvergenceReport> {
        self.series.iter().filter_map(|s| s.convergence.as_ref()).find(|c| !c.passed)
    }
}

/// Runs one experiment in memory.
pub fn run(cfg: &Resolved) -> Result<RunOutput> {
    use ExperimentKind::*;
    match cfg.experiment {
        Spinflip => runners::spinflip(cfg),
        BellDamping => runners::bell_damping(cfg),
        BellNuclearNoise => runners::bell_nuclear_noise(cfg),
        BellElectronNoise => runners::bell_electron_noise(cfg),
        Graph => runners::graph(cfg),
        NoiseVerify => runners::noise_verify(cfg),
        TransformCheck => runners::transform_check(cfg),
    }
}

/// Runs, writes every artifact under `cfg.out`, and reports a failed
/// truncation check as an error after the files are on disk.
pub fn execute(cfg: &Resolved) -> Result<RunOutput> {
    let start = Instant::now();
    let out = run(cfg)?;
    write_outputs(cfg, &out, start.elapsed().as_secs_f64())?;
    if let Some(c) = out.convergence_failure() {
        return Err(ExperimentError::Convergence(c.clone()));
    }
    Ok(out)
}
