//! Constructive search for single-spin unitaries U₁⊗…⊗U_N with
//! |⟨to|U|from⟩| = 1, by alternating exact one-site maximisation.

use nalgebra::Matrix2;
use nvsim_linalg::{Operator, StateVector, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{ObservablesError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LuOptions {
    pub restarts: usize,
    pub sweeps: usize,
    /// Success threshold on |⟨to|U|from⟩|².
    pub threshold: f64,
    pub seed: u64,
}

impl Default for LuOptions {
    fn default() -> Self {
        Self { restarts: 32, sweeps: 400, threshold: 1.0 - 1e-6, seed: 1 }
    }
}

#[derive(Debug, Clone)]
pub struct LocalUnitaries {
    /// One 2×2 unitary per spin.
    pub unitaries: Vec<Operator>,
    /// |⟨to|U|from⟩|²
    pub overlap: f64,
}

fn apply_local(u: &Matrix2<C64>, k: usize, n: usize, psi: &mut StateVector) {
    let stride = 1usize << (n - 1 - k);
    for base in (0..psi.len()).step_by(2 * stride) {
        for off in 0..stride {
            let (i0, i1) = (base + off, base + off + stride);
            let (a, b) = (psi[i0], psi[i1]);
            psi[i0] = u[(0, 0)] * a + u[(0, 1)] * b;
            psi[i1] = u[(1, 0)] * a + u[(1, 1)] * b;
        }
    }
}

fn random_unitary(rng: &mut ChaCha8Rng) -> Matrix2<C64> {
    let v: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
    let a = C64::new(v[0], v[1]) / norm;
    let b = C64::new(v[2], v[3]) / norm;
    Matrix2::new(a, -b.conj(), b, a.conj())
}

fn amplitude(us: &[Matrix2<C64>], from: &StateVector, to: &StateVector, n: usize) -> C64 {
    let mut psi = from.clone();
    for (k, u) in us.iter().enumerate() {
        apply_local(u, k, n, &mut psi);
    }
    to.iter().zip(&psi).map(|(a, b)| a.conj() * b).sum()
}

/// One-site optimum for spin `k` with the others fixed.
fn optimize_site(us: &mut [Matrix2<C64>], k: usize, from: &StateVector, to: &StateVector, n: usize) {
    let mut psi = from.clone();
    for (i, u) in us.iter().enumerate() {
        if i != k {
            apply_local(u, i, n, &mut psi);
        }
    }
    // E[s, r] = Σ_rest conj(to[s, rest]) ψ[r, rest];  overlap = Tr(U Eᵀ)
    let stride = 1usize << (n - 1 - k);
    let mut e = Matrix2::<C64>::zeros();
    for base in (0..psi.len()).step_by(2 * stride) {
        for off in 0..stride {
            let idx = [base + off, base + off + stride];
            for s in 0..2 {
                for r in 0..2 {
                    e[(s, r)] += to[idx[s]].conj() * psi[idx[r]];
                }
            }
        }
    }
    let svd = e.transpose().svd(true, true);
    let (x, yh) = (svd.u.expect("u"), svd.v_t.expect("v_t"));
    us[k] = yh.adjoint() * x.adjoint();
}

/// Finds U₁⊗…⊗U_N maximising |⟨to|U|from⟩|². Fails with the best overlap
/// seen when no restart reaches `opts.threshold`.
pub fn find_local_unitaries(from: &StateVector, to: &StateVector, n: usize, opts: &LuOptions) -> Result<LocalUnitaries> {
    if from.len() != 1usize << n || to.len() != from.len() {
        return Err(ObservablesError::InvalidArgument(format!("states must both have dimension 2^{n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best = 0.0;
    for restart in 0..=opts.restarts {
        let mut us: Vec<Matrix2<C64>> = if restart == 0 {
            vec![Matrix2::identity(); n]
        } else {
            (0..n).map(|_| random_unitary(&mut rng)).collect()
        };
        let mut last = 0.0;
        for _ in 0..opts.sweeps {
            for k in 0..n {
                optimize_site(&mut us, k, from, to, n);
            }
            let f = amplitude(&us, from, to, n).norm_sqr();
            if f >= opts.threshold && (f - last).abs() < 1e-15 {
                break;
            }
            last = f;
        }
        let f = amplitude(&us, from, to, n).norm_sqr();
        if f > best {
            best = f;
        }
        if f >= opts.threshold {
            let unitaries = us.iter().map(|u| Operator::from_shape_fn((2, 2), |(i, j)| u[(i, j)])).collect();
            return Ok(LocalUnitaries { unitaries, overlap: f });
        }
    }
    Err(ObservablesError::LuNotFound { best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nvsim_model::pauli::{kron_states, plus, up};

    #[test]
    fn product_states_are_equivalent() {
        let a = kron_states(&[up(), up(), up()]);
        let b = kron_states(&[plus(), up(), plus()]);
        let r = find_local_unitaries(&a, &b, 3, &LuOptions::default()).unwrap();
        assert!(r.overlap > 1.0 - 1e-12);
        for u in &r.unitaries {
            let p = u.t().mapv(|z| z.conj()).dot(u);
            assert!((p[[0, 0]].re - 1.0).abs() < 1e-12 && p[[0, 1]].norm() < 1e-12);
        }
    }

    #[test]
    fn entangled_vs_product_fails_honestly() {
        let bell = crate::bell_target(2).unwrap().state;
        let prod = kron_states(&[up(), up()]);
        match find_local_unitaries(&prod, &bell, 2, &LuOptions { restarts: 4, ..Default::default() }) {
            Err(ObservablesError::LuNotFound { best }) => assert!((best - 0.5).abs() < 1e-6),
            other => panic!("unexpected {other:?}"),
        }
    }
}
