//! Ornstein–Uhlenbeck noise: B(t+Δt) = B(t)e^{−Δt/τ} + 𝓑√(1−e^{−2Δt/τ})·n.

mod fit;
mod verify;

pub use fit::{fit_decay_constant, DecayFit};
pub use verify::{autocorrelation, free_induction_decay, Curve};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NoiseError {
    #[error("invalid noise parameters: {0}")]
    InvalidParams(String),
}

pub type Result<T> = std::result::Result<T, NoiseError>;

/// How the first value of a trajectory is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitMode {
    /// From the stationary distribution N(0, 𝓑²).
    #[default]
    Stationary,
    /// B(0) = 0.
    Zero,
}

/// Correlation time τ (s) and standard deviation 𝓑 (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub tau: f64,
    pub strength: f64,
    #[serde(default)]
    pub init: InitMode,
}

impl NoiseParams {
    pub fn new(tau: f64, strength: f64) -> Result<Self> {
        let p = Self { tau, strength, init: InitMode::Stationary };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0) {
            return Err(NoiseError::InvalidParams(format!("tau must be positive, got {}", self.tau)));
        }
        if !(self.strength >= 0.0 && self.strength.is_finite()) {
            return Err(NoiseError::InvalidParams(format!("strength must be >= 0, got {}", self.strength)));
        }
        Ok(())
    }
}

/// 𝓑 = √2 / T₂*. An infinite T₂* means no noise.
pub fn calibrate_strength(t2star: f64) -> Result<f64> {
    if t2star.is_infinite() && t2star > 0.0 {
        return Ok(0.0);
    }
    if !(t2star > 0.0) {
        return Err(NoiseError::InvalidParams(format!("T2* must be positive, got {t2star}")));
    }
    Ok(std::f64::consts::SQRT_2 / t2star)
}

/// Identifies one independent random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub seed: u64,
    pub realization: u64,
    pub spin: u32,
}

impl StreamKey {
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream((self.realization << 16) | u64::from(self.spin));
        rng
    }
}

/// One OU trajectory for one spin.
#[derive(Debug, Clone)]
pub struct NoiseProcess {
    params: NoiseParams,
    value: f64,
    rng: ChaCha8Rng,
}

/// Starts a trajectory; stationary by default.
pub fn ou_init(params: NoiseParams, mut rng: ChaCha8Rng) -> NoiseProcess {
    let n: f64 = rng.sample(StandardNormal);
    let value = match params.init {
        InitMode::Stationary => params.strength * n,
        InitMode::Zero => 0.0,
    };
    NoiseProcess { params, value, rng }
}

impl NoiseProcess {
    pub fn from_key(params: NoiseParams, key: StreamKey) -> Self {
        ou_init(params, key.rng())
    }

    /// A process that stays at zero.
    pub fn silent() -> Self {
        ou_init(NoiseParams { tau: 1.0, strength: 0.0, init: InitMode::Zero }, ChaCha8Rng::seed_from_u64(0))
    }

    /// A process pinned at `value` forever (the τ → ∞ limit without diffusion).
    pub fn frozen(value: f64) -> Self {
        let mut p = Self::silent();
        p.params.tau = f64::INFINITY;
        p.value = value;
        p
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn params(&self) -> &NoiseParams {
        &self.params
    }

    /// Exact OU update over `dt` seconds.
    pub fn step(&mut self, dt: f64) -> f64 {
        let f = (-dt / self.params.tau).exp();
        let n: f64 = self.rng.sample(StandardNormal);
        self.value = self.value * f + self.params.strength * (1.0 - f * f).max(0.0).sqrt() * n;
        self.value
    }
}

/// Free-function form of [`NoiseProcess::step`].
pub fn ou_step(proc: &mut NoiseProcess, dt: f64) -> f64 {
    proc.step(dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn key(r: u64, s: u32) -> StreamKey {
        StreamKey { seed: 42, realization: r, spin: s }
    }

    #[test]
    fn calibration_values() {
        let bn = calibrate_strength(1e-3).unwrap();
        assert!((bn / (2.0 * PI) - 225.0).abs() < 0.1);
        let be = calibrate_strength(20e-6).unwrap();
        assert!((be / (2.0 * PI) - 11.25e3).abs() < 5.0);
        assert_eq!(calibrate_strength(f64::INFINITY).unwrap(), 0.0);
        assert!(calibrate_strength(0.0).is_err());
        assert!(calibrate_strength(-1.0).is_err());
    }

    #[test]
    fn zero_strength_stays_zero() {
        let p = NoiseParams::new(0.02, 0.0).unwrap();
        let mut n = NoiseProcess::from_key(p, key(0, 0));
        assert_eq!(n.value(), 0.0);
        for _ in 0..10 {
            assert_eq!(n.step(1e-3), 0.0);
        }
    }

    #[test]
    fn limits_of_update() {
        let p = NoiseParams::new(0.02, 3.0).unwrap();
        let mut n = NoiseProcess::from_key(p, key(1, 0));
        let v0 = n.value();
        let v1 = n.step(1e-12);
        assert!((v1 - v0).abs() < 1e-4 * 3.0);
        // very long step: memory lost (e^{-dt/τ} underflows to 0)
        let mut m = NoiseProcess::from_key(p, key(1, 0));
        let mut fresh = key(1, 0).rng();
        let _: f64 = fresh.sample(StandardNormal);
        let n2: f64 = fresh.sample(StandardNormal);
        assert_eq!(m.step(1e3), 3.0 * n2);
    }

    #[test]
    fn init_statistics() {
        let p = NoiseParams::new(0.02, 2.0).unwrap();
        let xs: Vec<f64> = (0..3000).map(|r| NoiseProcess::from_key(p, key(r, 0)).value()).collect();
        let mean = xs.iter().sum::<f64>() / 3000.0;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 2999.0;
        assert!(mean.abs() < 3.0 * 2.0 / 3000f64.sqrt());
        assert!((var / 4.0 - 1.0).abs() < 0.1);
    }

    #[test]
    fn zero_init_mode() {
        let p = NoiseParams { tau: 0.02, strength: 2.0, init: InitMode::Zero };
        assert_eq!(NoiseProcess::from_key(p, key(3, 1)).value(), 0.0);
    }

    #[test]
    fn streams_reproducible_and_distinct() {
        let p = NoiseParams::new(0.02, 1.0).unwrap();
        let a = NoiseProcess::from_key(p, key(5, 2)).value();
        let b = NoiseProcess::from_key(p, key(5, 2)).value();
        let c = NoiseProcess::from_key(p, key(5, 3)).value();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
