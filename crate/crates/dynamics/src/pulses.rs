use ndarray::Array1;
use nvsim_linalg::{Operator, TensorLayout, C64};
use serde::{Deserialize, Serialize};

use crate::{DynamicsError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PulseAxis {
    #[default]
    X,
    Y,
}

/// Instantaneous π pulses exp(−iπτ_axis/2) on a set of nuclear spins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseSchedule {
    pub times: Vec<f64>,
    pub axis: PulseAxis,
    /// Nuclear-spin indices; every pulse acts on all of them at once.
    pub targets: Vec<usize>,
}

impl PulseSchedule {
    pub fn new(times: Vec<f64>, axis: PulseAxis, targets: Vec<usize>) -> Result<Self> {
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(DynamicsError::InvalidArgument("pulse times must be strictly increasing".into()));
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(DynamicsError::InvalidArgument("pulse times must be finite".into()));
        }
        Ok(Self { times, axis, targets })
    }

    pub fn empty() -> Self {
        Self { times: Vec::new(), axis: PulseAxis::X, targets: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Checks every pulse lies strictly inside (0, t_end).
    pub fn check_window(&self, t_end: f64) -> Result<()> {
        if self.times.iter().any(|&t| !(t > 0.0 && t < t_end)) {
            return Err(DynamicsError::InvalidArgument(format!("pulse outside (0, {t_end})")));
        }
        Ok(())
    }

    /// Same schedule acting on every one of `n` spins.
    pub fn on_all(mut self, n: usize) -> Self {
        self.targets = (0..n).collect();
        self
    }
}

/// t_k = (2k−1)T/(2n), k = 1..n.
pub fn cpmg_schedule(n_pulses: usize, t_end: f64) -> Result<PulseSchedule> {
    if n_pulses == 0 {
        return Err(DynamicsError::InvalidArgument("CPMG needs at least one pulse".into()));
    }
    let times = (1..=n_pulses).map(|k| (2 * k - 1) as f64 * t_end / (2 * n_pulses) as f64).collect();
    PulseSchedule::new(times, PulseAxis::X, Vec::new())
}

/// t_k = kT/(n+1), k = 1..n.
pub fn periodic_schedule(n_pulses: usize, t_end: f64) -> Result<PulseSchedule> {
    if n_pulses == 0 {
        return Err(DynamicsError::InvalidArgument("need at least one pulse".into()));
    }
    let times = (1..=n_pulses).map(|k| k as f64 * t_end / (n_pulses + 1) as f64).collect();
    PulseSchedule::new(times, PulseAxis::X, Vec::new())
}

/// Applies −iσ_axis (= exp(−iπσ_axis/2)) on each listed tensor factor, in place.
pub fn apply_pi_pulse(psi: &mut Array1<C64>, layout: &TensorLayout, subsystems: &[usize], axis: PulseAxis) -> Result<()> {
    let dims = layout.dims();
    if psi.len() != layout.total_dim() {
        return Err(DynamicsError::InvalidArgument("state does not match layout".into()));
    }
    for &k in subsystems {
        if k >= dims.len() || dims[k] != 2 {
            return Err(DynamicsError::InvalidArgument(format!("subsystem {k} is not a qubit")));
        }
        let stride: usize = dims[k + 1..].iter().product();
        let block = 2 * stride;
        let mi = C64::new(0.0, -1.0);
        for base in (0..psi.len()).step_by(block) {
            for off in 0..stride {
                let (iu, id) = (base + off, base + stride + off);
                let (u, d) = (psi[iu], psi[id]);
                match axis {
                    // −iσ_x: (u, d) → (−i d, −i u)
                    PulseAxis::X => {
                        psi[iu] = mi * d;
                        psi[id] = mi * u;
                    }
                    // −iσ_y: (u, d) → (−d, u)
                    PulseAxis::Y => {
                        psi[iu] = -d;
                        psi[id] = u;
                    }
                }
            }
        }
    }
    Ok(())
}

/// Dense form of [`apply_pi_pulse`].
pub fn pulse_operator(layout: &TensorLayout, subsystems: &[usize], axis: PulseAxis) -> Result<Operator> {
    let n = layout.total_dim();
    let mut out = Operator::zeros((n, n));
    for j in 0..n {
        let mut e = Array1::zeros(n);
        e[j] = C64::new(1.0, 0.0);
        apply_pi_pulse(&mut e, layout, subsystems, axis)?;
        out.column_mut(j).assign(&e);
    }
    Ok(out)
}
