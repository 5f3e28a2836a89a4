//! Single-subsystem operators and states in the up = index 0 convention.

use ndarray::{array, Array1, Array2};
use nvsim_linalg::{Operator, StateVector, C64};

const O: C64 = C64::new(0.0, 0.0);
const I1: C64 = C64::new(1.0, 0.0);
const J: C64 = C64::new(0.0, 1.0);

pub fn sigma_x() -> Operator {
    array![[O, I1], [I1, O]]
}

pub fn sigma_y() -> Operator {
    array![[O, -J], [J, O]]
}

pub fn sigma_z() -> Operator {
    array![[I1, O], [O, -I1]]
}

/// Truncated annihilation operator on `n` Fock levels.
pub fn annihilation(n: usize) -> Operator {
    let mut a = Array2::zeros((n, n));
    for k in 1..n {
        a[[k - 1, k]] = C64::new((k as f64).sqrt(), 0.0);
    }
    a
}

pub fn number(n: usize) -> Operator {
    Array2::from_diag(&Array1::from_iter((0..n).map(|k| C64::new(k as f64, 0.0))))
}

pub fn up() -> StateVector {
    array![I1, O]
}

pub fn down() -> StateVector {
    array![O, I1]
}

/// (|↑⟩ + |↓⟩)/√2.
pub fn plus() -> StateVector {
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    array![s, s]
}

/// (|↑⟩ − |↓⟩)/√2.
pub fn minus() -> StateVector {
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    array![s, -s]
}

pub fn fock(n: usize, k: usize) -> StateVector {
    let mut v = Array1::zeros(n);
    v[k] = I1;
    v
}

/// Tensor product of vectors, left factor most significant.
pub fn kron_states(parts: &[StateVector]) -> StateVector {
    let mut acc = array![I1];
    for p in parts {
        let mut next = Array1::zeros(acc.len() * p.len());
        for (i, a) in acc.iter().enumerate() {
            for (j, b) in p.iter().enumerate() {
                next[i * p.len() + j] = a * b;
            }
        }
        acc = next;
    }
    acc
}
