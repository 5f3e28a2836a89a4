use std::path::PathBuf;

use nvsim_model::{SystemParams, TWO_PI};
use serde::{Deserialize, Serialize};

use crate::error::{ExperimentError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Spinflip,
    BellDamping,
    BellNuclearNoise,
    BellElectronNoise,
    Graph,
    NoiseVerify,
    TransformCheck,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Spinflip => "spinflip",
            Self::BellDamping => "bell-damping",
            Self::BellNuclearNoise => "bell-nuclear-noise",
            Self::BellElectronNoise => "bell-electron-noise",
            Self::Graph => "graph",
            Self::NoiseVerify => "noise-verify",
            Self::TransformCheck => "transform-check",
        }
    }
}

/// Realization presets: `ci` 300, `full` 3000 (the default).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    Ci,
    #[default]
    Full,
}

impl Profile {
    pub fn realizations(self) -> usize {
        match self {
            Self::Ci => 300,
            Self::Full => 3000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PulseTiming {
    #[default]
    Cpmg,
    Periodic,
}

/// Physical constants in Hz (converted to rad/s internally).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsHz {
    pub rabi_hz: f64,
    pub osc_freq_hz: f64,
    pub hyperfine_hz: f64,
    pub coupling_hz: f64,
}

impl Default for ParamsHz {
    fn default() -> Self {
        Self { rabi_hz: 15.25e6, osc_freq_hz: 2e6, hyperfine_hz: 3.05e6, coupling_hz: 0.1e6 }
    }
}

impl ParamsHz {
    pub fn system(&self, n: usize, n_max: usize) -> Result<SystemParams> {
        Ok(SystemParams::uniform(
            n,
            TWO_PI * self.rabi_hz,
            TWO_PI * self.osc_freq_hz,
            TWO_PI * self.hyperfine_hz,
            TWO_PI * self.coupling_hz,
            n_max,
        )?)
    }
}

/// JSON input; every field is optional and CLI flags override it.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<ExperimentKind>,
    pub profile: Option<Profile>,
    pub seed: Option<u64>,
    pub realizations: Option<usize>,
    pub n_centers: Option<Vec<usize>>,
    pub n_max: Option<usize>,
    pub params: Option<ParamsHz>,
    pub q_factor: Option<Vec<f64>>,
    pub n_bar: Option<f64>,
    /// Nuclear T₂* values, seconds.
    pub t2n: Option<Vec<f64>>,
    /// Electron T₂* values, seconds.
    pub t2e: Option<Vec<f64>>,
    /// OU correlation time, seconds.
    pub tau: Option<f64>,
    pub pulses: Option<Vec<usize>>,
    /// Pulse counts of the combined-noise sweep (bell-electron-noise).
    pub combined_pulses: Option<Vec<usize>>,
    pub pulse_timing: Option<PulseTiming>,
    pub t_end: Option<f64>,
    pub samples: Option<usize>,
    /// Noise steps per trajectory.
    pub noise_steps: Option<usize>,
    /// Points of the drive-period average at the final time (0 disables it).
    pub drive_average: Option<usize>,
    pub convergence_tol: Option<f64>,
    /// Secular cutoff of the damped runs, rad/s.
    pub secular_delta: Option<f64>,
    pub out: Option<PathBuf>,
}

/// Fully resolved configuration, recorded in every sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Resolved {
    pub experiment: ExperimentKind,
    pub profile: Profile,
    pub seed: u64,
    pub realizations: usize,
    pub n_centers: Vec<usize>,
    pub n_max: usize,
    pub params: ParamsHz,
    pub q_factor: Vec<f64>,
    pub n_bar: f64,
    pub t2n: Vec<f64>,
    pub t2e: Vec<f64>,
    pub tau: f64,
    pub pulses: Vec<usize>,
    pub combined_pulses: Vec<usize>,
    pub pulse_timing: PulseTiming,
    pub t_end: Option<f64>,
    pub samples: usize,
    pub noise_steps: usize,
    pub drive_average: usize,
    pub convergence_tol: f64,
    pub secular_delta: f64,
    pub out: PathBuf,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| ExperimentError::Validation(format!("config: {e}")))
    }

    /// Fields of `over` that are set replace ours.
    pub fn merge(self, over: ExperimentConfig) -> Self {
        macro_rules! pick {
            ($($f:ident),*) => { Self { $($f: over.$f.or(self.$f)),* } };
        }
        pick!(
            experiment, profile, seed, realizations, n_centers, n_max, params, q_factor, n_bar, t2n, t2e, tau, pulses,
            combined_pulses, pulse_timing, t_end, samples, noise_steps, drive_average, convergence_tol, secular_delta, out
        )
    }

    pub fn resolve(self) -> Result<Resolved> {
        use ExperimentKind::*;
        let kind = self.experiment.ok_or_else(|| ExperimentError::Validation("no experiment given".into()))?;
        let profile = self.profile.unwrap_or_default();
        let realizations = self.realizations.unwrap_or(match kind {
            NoiseVerify => 3000,
            _ => profile.realizations(),
        });
        let n_centers = self.n_centers.unwrap_or_else(|| if kind == Graph { vec![3, 4] } else { vec![2] });
        let n_max = self.n_max.unwrap_or(match kind {
            BellDamping => 24,
            Graph => 4,
            TransformCheck => 10,
            _ => 8,
        });
        let pulses = self.pulses.unwrap_or_else(|| match kind {
            BellNuclearNoise => vec![0, 1],
            BellElectronNoise => vec![0, 1, 13],
            Graph => vec![15],
            _ => vec![],
        });
        let r = Resolved {
            experiment: kind,
            profile,
            seed: self.seed.unwrap_or(1),
            realizations,
            n_centers,
            n_max,
            params: self.params.unwrap_or_default(),
            q_factor: self.q_factor.unwrap_or_else(|| vec![1e7, 1e6, 1e5]),
            n_bar: self.n_bar.unwrap_or(10.0),
            t2n: self.t2n.unwrap_or_else(|| if kind == BellNuclearNoise { vec![1e-3, 2e-3, 10e-3] } else { vec![1e-3] }),
            t2e: self.t2e.unwrap_or_else(|| vec![20e-6]),
            tau: self.tau.unwrap_or(0.02),
            pulses,
            combined_pulses: self.combined_pulses.unwrap_or_else(|| vec![5, 13, 25, 49]),
            pulse_timing: self.pulse_timing.unwrap_or_default(),
            t_end: self.t_end,
            samples: self.samples.unwrap_or(51),
            noise_steps: self.noise_steps.unwrap_or(500),
            drive_average: self.drive_average.unwrap_or(16),
            convergence_tol: self.convergence_tol.unwrap_or(1e-4),
            secular_delta: self.secular_delta.unwrap_or(3e5),
            out: self.out.unwrap_or_else(|| PathBuf::from("results")),
        };
        r.validate()?;
        Ok(r)
    }
}

impl Resolved {
    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(ExperimentError::Validation(m));
        let positive = |xs: &[f64]| xs.iter().all(|x| *x > 0.0 && x.is_finite());
        if self.realizations == 0 {
            return bad("realizations must be >= 1".into());
        }
        if self.samples < 2 {
            return bad("samples must be >= 2".into());
        }
        if self.n_max < 2 {
            return bad(format!("n_max must be >= 2, got {}", self.n_max));
        }
        if self.n_centers.is_empty() || self.n_centers.iter().any(|&n| n == 0 || n > 6) {
            return bad(format!("n_centers must lie in 1..=6, got {:?}", self.n_centers));
        }
        if self.experiment == ExperimentKind::Graph && self.n_centers.iter().any(|&n| n > 4) {
            return bad("graph runs support N <= 4".into());
        }
        if !matches!(self.experiment, ExperimentKind::Graph | ExperimentKind::NoiseVerify) && self.n_centers != [2] {
            return bad(format!("{} needs N = 2", self.experiment.name()));
        }
        if !positive(&self.q_factor) || !positive(&self.t2n) || !positive(&self.t2e) {
            return bad("quality factors and T2* values must be positive".into());
        }
        if !(self.tau > 0.0) || !(self.n_bar >= 0.0) || !(self.secular_delta > 0.0) || !(self.convergence_tol > 0.0) {
            return bad("tau, secular_delta and convergence_tol must be positive, n_bar non-negative".into());
        }
        if let Some(t) = self.t_end {
            if !(t > 0.0 && t.is_finite()) {
                return bad(format!("t_end must be positive, got {t}"));
            }
        }
        if self.noise_steps == 0 {
            return bad("noise_steps must be >= 1".into());
        }
        let p = self.params;
        if ![p.rabi_hz, p.osc_freq_hz, p.hyperfine_hz].iter().all(|x| *x > 0.0) || p.coupling_hz < 0.0 {
            return bad("frequencies must be positive (coupling non-negative)".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_per_kind() {
        let r = ExperimentConfig { experiment: Some(ExperimentKind::Graph), ..Default::default() }.resolve().unwrap();
        assert_eq!(r.n_centers, vec![3, 4]);
        assert_eq!(r.pulses, vec![15]);
        assert_eq!(r.realizations, 3000);
        let r = ExperimentConfig { experiment: Some(ExperimentKind::BellDamping), profile: Some(Profile::Ci), ..Default::default() }
            .resolve()
            .unwrap();
        assert_eq!((r.n_max, r.realizations), (24, 300));
    }

    #[test]
    fn json_and_merge() {
        let c = ExperimentConfig::from_json(r#"{"experiment": "bell-electron-noise", "seed": 9, "pulses": [13]}"#).unwrap();
        let c = c.merge(ExperimentConfig { seed: Some(4), ..Default::default() });
        let r = c.resolve().unwrap();
        assert_eq!((r.seed, r.pulses.clone()), (4, vec![13]));
        assert!(ExperimentConfig::from_json(r#"{"experimnt": "graph"}"#).is_err());
    }

    #[test]
    fn validation_errors() {
        let base = ExperimentConfig { experiment: Some(ExperimentKind::Spinflip), ..Default::default() };
        for bad in [
            ExperimentConfig { realizations: Some(0), ..base.clone() },
            ExperimentConfig { samples: Some(1), ..base.clone() },
            ExperimentConfig { t2n: Some(vec![-1.0]), ..base.clone() },
            ExperimentConfig { n_centers: Some(vec![3]), ..base.clone() },
            ExperimentConfig { experiment: Some(ExperimentKind::Graph), n_centers: Some(vec![5]), ..base.clone() },
        ] {
            assert!(matches!(bad.resolve(), Err(ExperimentError::Validation(_))));
        }
        assert!(matches!(ExperimentConfig::default().resolve(), Err(ExperimentError::Validation(_))));
    }
}
