use nvsim_linalg::{StateVector, C64};
use nvsim_model::pauli::{kron_states, minus, plus};

use crate::{ObservablesError, Result};

/// A labelled unit vector on the 2^N nuclear subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetState {
    pub label: String,
    pub state: StateVector,
}

impl TargetState {
    pub fn new(label: impl Into<String>, state: StateVector) -> Result<Self> {
        let n = state.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(ObservablesError::InvalidArgument(format!("target dimension {n} is not 2^N")));
        }
        let norm = state.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(ObservablesError::InvalidArgument(format!("target norm {norm} != 1")));
        }
        Ok(Self { label: label.into(), state })
    }

    pub fn n_spins(&self) -> usize {
        self.state.len().trailing_zeros() as usize
    }

    /// |⟨self|other⟩|²
    pub fn overlap(&self, other: &StateVector) -> f64 {
        self.state.iter().zip(other).map(|(a, b)| a.conj() * b).sum::<C64>().norm_sqr()
    }
}

/// (|++⟩ + i|−−⟩)/√2.
pub fn bell_target(n: usize) -> Result<TargetState> {
    if n != 2 {
        return Err(ObservablesError::InvalidArgument(format!("Bell target needs N = 2, got {n}")));
    }
    let s = (kron_states(&[plus(), plus()]) + kron_states(&[minus(), minus()]) * C64::new(0.0, 1.0))
        * C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    TargetState::new("bell", s)
}

/// |−⟩^{⊗N}, the image of |+⟩^{⊗N} under a complete Ising flip.
pub fn spin_flip_target(n: usize) -> Result<TargetState> {
    if n < 1 {
        return Err(ObservablesError::InvalidArgument("need at least one spin".into()));
    }
    TargetState::new("spin-flip", kron_states(&vec![minus(); n]))
}

/// (|↑…↑⟩ + |↓…↓⟩)/√2.
pub fn ghz_state(n: usize) -> Result<TargetState> {
    if n < 2 {
        return Err(ObservablesError::InvalidArgument(format!("GHZ needs N >= 2, got {n}")));
    }
    let d = 1usize << n;
    let mut s = StateVector::zeros(d);
    s[0] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    s[d - 1] = s[0];
    TargetState::new(format!("ghz{n}"), s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nvsim_linalg::{reduce_pure, TensorLayout};

    #[test]
    fn bell_properties() {
        let b = bell_target(2).unwrap();
        assert!((b.overlap(&b.state) - 1.0).abs() < 1e-15);
        let r = reduce_pure(b.state.view(), &TensorLayout::new(vec![2, 2]).unwrap(), &[0]).unwrap();
        for ((i, j), z) in r.indexed_iter() {
            let want = if i == j { 0.5 } else { 0.0 };
            assert!((z - C64::new(want, 0.0)).norm() < 1e-15);
        }
        assert!(bell_target(3).is_err());
    }

    #[test]
    fn ghz_reduced_is_rank_two_diagonal() {
        let g = ghz_state(2).unwrap();
        assert_eq!(g.state[0], g.state[3]);
        assert_eq!(g.state[1], C64::new(0.0, 0.0));
        let g4 = ghz_state(4).unwrap();
        let r = reduce_pure(g4.state.view(), &TensorLayout::new(vec![2; 4]).unwrap(), &[0, 2]).unwrap();
        let nonzero: Vec<_> = r.indexed_iter().filter(|(_, z)| z.norm() > 1e-15).map(|(ij, _)| ij).collect();
        assert_eq!(nonzero, vec![(0, 0), (3, 3)]);
        assert!(ghz_state(1).is_err());
    }

    #[test]
    fn rejects_bad_targets() {
        assert!(TargetState::new("x", StateVector::zeros(3)).is_err());
        assert!(TargetState::new("x", StateVector::zeros(4)).is_err());
    }
}
