use serde::{Deserialize, Serialize};

use crate::{ModelError, Result};

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Physical constants of the array. All frequencies are angular (rad/s).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub n_centers: usize,
    /// Electron Rabi frequency Ω_i per center.
    pub rabi: Vec<f64>,
    /// Oscillator frequency ν.
    pub osc_freq: f64,
    /// Longitudinal hyperfine constant A.
    pub hyperfine: f64,
    /// Spin-oscillator coupling g_i per center.
    pub coupling: Vec<f64>,
    /// Oscillator Fock-space dimension.
    pub fock_dim: usize,
    /// Optional nuclear Rabi frequencies; zero means undriven.
    #[serde(default)]
    pub nuclear_rabi: Vec<f64>,
}

impl SystemParams {
    /// Uniform array: every center has the same Ω and g.
    pub fn uniform(n: usize, rabi: f64, osc_freq: f64, hyperfine: f64, coupling: f64, fock_dim: usize) -> Result<Self> {
        let p = Self {
            n_centers: n,
            rabi: vec![rabi; n],
            osc_freq,
            hyperfine,
            coupling: vec![coupling; n],
            fock_dim,
            nuclear_rabi: vec![0.0; n],
        };
        p.validate()?;
        Ok(p)
    }

    /// The reference parameter set: Ω = 2π·15.25 MHz, ν = 2π·2 MHz,
    /// A = 2π·3.05 MHz, g = 2π·0.1 MHz.
    pub fn baseline(n: usize, fock_dim: usize) -> Result<Self> {
        Self::uniform(n, TWO_PI * 15.25e6, TWO_PI * 2e6, TWO_PI * 3.05e6, TWO_PI * 0.1e6, fock_dim)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(ModelError::InvalidParams(m));
        if self.n_centers == 0 {
            return bad("need at least one center".into());
        }
        if self.rabi.len() != self.n_centers || self.coupling.len() != self.n_centers {
            return bad("per-center vectors must have n_centers entries".into());
        }
        if !self.nuclear_rabi.is_empty() && self.nuclear_rabi.len() != self.n_centers {
            return bad("nuclear_rabi must be empty or have n_centers entries".into());
        }
        if !(self.osc_freq > 0.0 && self.osc_freq.is_finite()) {
            return bad(format!("oscillator frequency must be positive, got {}", self.osc_freq));
        }
        if let Some(o) = self.rabi.iter().find(|&&o| !(o > 0.0 && o.is_finite())) {
            return bad(format!("Rabi frequencies must be positive, got {o}"));
        }
        let all = self.coupling.iter().chain(&self.nuclear_rabi).chain(std::iter::once(&self.hyperfine));
        if all.clone().any(|x| !x.is_finite()) {
            return bad("non-finite coupling".into());
        }
        if self.fock_dim < 2 {
            return bad(format!("fock_dim must be at least 2, got {}", self.fock_dim));
        }
        Ok(())
    }

    pub fn with_fock_dim(&self, fock_dim: usize) -> Self {
        Self { fock_dim, ..self.clone() }
    }

    /// α_i = g_i / ν.
    pub fn alpha(&self, i: usize) -> f64 {
        self.coupling[i] / self.osc_freq
    }

    /// β_i = A / (4 Ω_i).
    pub fn beta(&self, i: usize) -> f64 {
        self.hyperfine / (4.0 * self.rabi[i])
    }

    pub fn max_alpha(&self) -> f64 {
        (0..self.n_centers).map(|i| self.alpha(i).abs()).fold(0.0, f64::max)
    }

    pub fn max_beta(&self) -> f64 {
        (0..self.n_centers).map(|i| self.beta(i).abs()).fold(0.0, f64::max)
    }

    /// Raised when either expansion parameter exceeds 0.15.
    pub fn outside_perturbative_regime(&self) -> bool {
        self.max_alpha() > 0.15 || self.max_beta() > 0.15
    }

    /// Ω̃_i = Ω_i e^{-2α_i²}.
    pub fn polaron_rabi(&self, i: usize) -> f64 {
        self.rabi[i] * (-2.0 * self.alpha(i).powi(2)).exp()
    }

    /// Ω̄_i = (1 + 2β_i²) Ω̃_i.
    pub fn dressed_rabi(&self, i: usize) -> f64 {
        (1.0 + 2.0 * self.beta(i).powi(2)) * self.polaron_rabi(i)
    }

    pub fn nuclear_rabi(&self, i: usize) -> f64 {
        self.nuclear_rabi.get(i).copied().unwrap_or(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn baseline_expansion_parameters() {
        let p = SystemParams::baseline(2, 8).unwrap();
        assert!((p.alpha(0) - 0.05).abs() < 1e-15);
        assert!((p.beta(1) - 0.05).abs() < 1e-15);
        assert!(!p.outside_perturbative_regime());
    }

    #[test]
    fn renormalized_rabi() {
        let p = SystemParams::baseline(1, 8).unwrap();
        assert!((p.polaron_rabi(0) / p.rabi[0] - (-1.0f64 / 200.0).exp()).abs() < 1e-15);
        assert!((p.dressed_rabi(0) / p.rabi[0] - 1.0).abs() < 2.5e-5);
    }

    #[test]
    fn validation() {
        assert!(SystemParams::baseline(0, 8).is_err());
        assert!(SystemParams::baseline(2, 1).is_err());
        let mut p = SystemParams::baseline(2, 8).unwrap();
        p.osc_freq = 0.0;
        assert!(p.validate().is_err());
        let mut p = SystemParams::baseline(2, 8).unwrap();
        p.coupling = vec![TWO_PI * 1e6; 2];
        p.validate().unwrap();
        assert!(p.outside_perturbative_regime());
    }
}
