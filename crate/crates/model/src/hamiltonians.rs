use ndarray::{Array1, Array2};
use nvsim_linalg::{Operator, C64};

use crate::layout::diag_op;
use crate::pauli::{annihilation, number, sigma_x, sigma_z};
use crate::{HilbertLayout, ModelError, Result, SystemParams};

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Electron (J_e) and nuclear (J_n) spin-spin couplings, rad/s.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    pub je: Array2<f64>,
    pub jn: Array2<f64>,
}

impl CouplingMatrix {
    pub fn n(&self) -> usize {
        self.jn.nrows()
    }

    /// Uniform nuclear coupling with no electron coupling (for target construction).
    pub fn uniform_nuclear(n: usize, jn: f64) -> Self {
        let mut m = Array2::from_elem((n, n), jn);
        m.diag_mut().fill(0.0);
        Self { je: Array2::zeros((n, n)), jn: m }
    }

    fn validate(&self, n: usize) -> Result<()> {
        for m in [&self.je, &self.jn] {
            if m.dim() != (n, n) {
                return Err(ModelError::InvalidParams(format!("coupling matrix must be {n}x{n}")));
            }
            for i in 0..n {
                if m[[i, i]] != 0.0 {
                    return Err(ModelError::InvalidParams("coupling diagonal must vanish".into()));
                }
                for j in 0..i {
                    if (m[[i, j]] - m[[j, i]]).abs() > 1e-12 * m[[i, j]].abs().max(1.0) {
                        return Err(ModelError::InvalidParams("coupling matrix must be symmetric".into()));
                    }
                }
            }
        }
        Ok(())
    }
}

/// J_e^{ij} = 2α_iα_j(1−2β_i²−2β_j²)ν and J_n^{ij} = 8α_iα_jβ_iβ_jν.
pub fn coupling_constants(p: &SystemParams) -> Result<CouplingMatrix> {
    p.validate()?;
    let n = p.n_centers;
    let mut je = Array2::zeros((n, n));
    let mut jn = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let (ai, aj, bi, bj) = (p.alpha(i), p.alpha(j), p.beta(i), p.beta(j));
            je[[i, j]] = 2.0 * ai * aj * (1.0 - 2.0 * bi * bi - 2.0 * bj * bj) * p.osc_freq;
            jn[[i, j]] = 8.0 * ai * aj * bi * bj * p.osc_freq;
        }
    }
    Ok(CouplingMatrix { je, jn })
}

fn oscillator_terms(l: &HilbertLayout, nu: f64) -> Result<Operator> {
    Ok(l.product(&[(l.oscillator(), &number(l.fock_dim()))])? * c(nu))
}

/// H = ν a†a + Σ_i (Ω_i/2)σ_x + (A/4)σ_zτ_z + g_i(a+a†)σ_z.
pub fn build_exact_hamiltonian(p: &SystemParams, l: &HilbertLayout) -> Result<Operator> {
    l.check(p)?;
    let a = annihilation(l.fock_dim());
    let x = &a + &a.t();
    let (sx, sz) = (sigma_x(), sigma_z());
    let z = [1.0, -1.0];
    let mut h = oscillator_terms(l, p.osc_freq)?;
    for i in 0..p.n_centers {
        h = h + l.product(&[(l.electron(i), &sx)])? * c(p.rabi[i] / 2.0);
        h = h + diag_op(&l.diagonal(&[(l.electron(i), &z), (l.nucleus(i), &z)])) * c(p.hyperfine / 4.0);
        h = h + l.product(&[(l.electron(i), &sz), (l.oscillator(), &x)])? * c(p.coupling[i]);
    }
    Ok(h)
}

/// Polaron-frame Hamiltonian with the renormalized drive Ω̃ and the full
/// double sum −ν Σ_{i,j} α_iα_j σ_zσ_z (i = j terms are constants).
pub fn build_polaron_hamiltonian(p: &SystemParams, l: &HilbertLayout) -> Result<Operator> {
    l.check(p)?;
    let sx = sigma_x();
    let z = [1.0, -1.0];
    let mut h = oscillator_terms(l, p.osc_freq)?;
    let mut diag = Array1::<f64>::zeros(l.dim());
    for i in 0..p.n_centers {
        h = h + l.product(&[(l.electron(i), &sx)])? * c(p.polaron_rabi(i) / 2.0);
        diag = diag + l.diagonal(&[(l.electron(i), &z), (l.nucleus(i), &z)]) * (p.hyperfine / 4.0);
        for j in 0..p.n_centers {
            let zz = if i == j {
                Array1::from_elem(l.dim(), 1.0)
            } else {
                l.diagonal(&[(l.electron(i), &z), (l.electron(j), &z)])
            };
            diag = diag - zz * (p.osc_freq * p.alpha(i) * p.alpha(j));
        }
    }
    Ok(h + diag_op(&diag))
}

/// H_S = ν a†a + Σ (Ω̄_i/2)σ_x − Σ_{i<j} [J_e σ_zσ_z + J_n σ_xσ_x τ_zτ_z].
pub fn build_sw_hamiltonian(p: &SystemParams, l: &HilbertLayout) -> Result<Operator> {
    l.check(p)?;
    let j = coupling_constants(p)?;
    let sx = sigma_x();
    let z = [1.0, -1.0];
    let mut h = oscillator_terms(l, p.osc_freq)?;
    for i in 0..p.n_centers {
        h = h + l.product(&[(l.electron(i), &sx)])? * c(p.dressed_rabi(i) / 2.0);
        for k in i + 1..p.n_centers {
            let zz = l.diagonal(&[(l.electron(i), &z), (l.electron(k), &z)]);
            h = h - diag_op(&zz) * c(j.je[[i, k]]);
            let tt = diag_op(&l.diagonal(&[(l.nucleus(i), &z), (l.nucleus(k), &z)]));
            let xx = l.product(&[(l.electron(i), &sx), (l.electron(k), &sx)])?;
            h = h - xx.dot(&tt) * c(j.jn[[i, k]]);
        }
    }
    Ok(h)
}

/// τ_z eigenvalue (+1 up, −1 down) of nuclear spin `i` in an N-spin basis index.
pub(crate) fn z_of(index: usize, i: usize, n: usize) -> f64 {
    if (index >> (n - 1 - i)) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// H_eff = −Σ_{i<j} J_n^{ij} τ_zτ_z on the 2^N nuclear subspace.
pub fn build_effective_hamiltonian(j: &CouplingMatrix, n: usize) -> Result<Operator> {
    j.validate(n)?;
    let d = Array1::from_iter((0..1usize << n).map(|s| {
        let mut e = 0.0;
        for a in 0..n {
            for b in a + 1..n {
                e -= j.jn[[a, b]] * z_of(s, a, n) * z_of(s, b, n);
            }
        }
        e
    }));
    Ok(diag_op(&d))
}

/// H_graph = 4 Σ_{i<j} J_n^{ij} [(1+τ_z^i)/2][(1−τ_z^j)/2] on the nuclear subspace.
pub fn build_graph_hamiltonian(j: &CouplingMatrix, n: usize) -> Result<Operator> {
    j.validate(n)?;
    let d = Array1::from_iter((0..1usize << n).map(|s| {
        let mut e = 0.0;
        for a in 0..n {
            for b in a + 1..n {
                e += 4.0 * j.jn[[a, b]] * (1.0 + z_of(s, a, n)) / 2.0 * (1.0 - z_of(s, b, n)) / 2.0;
            }
        }
        e
    }));
    Ok(diag_op(&d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::TWO_PI;
    use nvsim_linalg::{hermiticity_defect, max_abs, spectral_decompose};

    fn table(n: usize, f: usize) -> (SystemParams, HilbertLayout) {
        let p = SystemParams::baseline(n, f).unwrap();
        let l = HilbertLayout::for_params(&p).unwrap();
        (p, l)
    }

    #[test]
    fn baseline_nuclear_coupling() {
        let (p, _) = table(2, 4);
        let j = coupling_constants(&p).unwrap();
        let want = TWO_PI * 100.0;
        assert!((j.jn[[0, 1]] - want).abs() <= 1e-12 * want);
        let closed = p.hyperfine.powi(2) * p.coupling[0].powi(2) / (2.0 * p.rabi[0].powi(2) * p.osc_freq);
        assert!((j.jn[[0, 1]] - closed).abs() <= 1e-12 * want);
        assert_eq!(j.jn[[0, 0]], 0.0);
    }

    #[test]
    fn no_mediator_no_coupling() {
        let mut p = SystemParams::baseline(3, 4).unwrap();
        p.coupling = vec![0.0; 3];
        let j = coupling_constants(&p).unwrap();
        assert!(j.je.iter().chain(j.jn.iter()).all(|&x| x == 0.0));
    }

    #[test]
    fn decoupled_spectrum() {
        let mut p = SystemParams::baseline(1, 4).unwrap();
        p.coupling = vec![0.0];
        p.hyperfine = 0.0;
        let l = HilbertLayout::for_params(&p).unwrap();
        let h = build_exact_hamiltonian(&p, &l).unwrap();
        let s = spectral_decompose(&h).unwrap();
        let mut want: Vec<f64> = Vec::new();
        for k in 0..4 {
            for sgn in [-1.0, 1.0] {
                for _nuc in 0..2 {
                    want.push(p.osc_freq * k as f64 + sgn * p.rabi[0] / 2.0);
                }
            }
        }
        want.sort_by(f64::total_cmp);
        for (a, b) in s.values.iter().zip(&want) {
            assert!((a - b).abs() < 1e-6 * p.rabi[0], "{a} vs {b}");
        }
    }

    #[test]
    fn builders_are_hermitian() {
        let (p, l) = table(2, 5);
        for h in [
            build_exact_hamiltonian(&p, &l).unwrap(),
            build_polaron_hamiltonian(&p, &l).unwrap(),
            build_sw_hamiltonian(&p, &l).unwrap(),
        ] {
            assert!(hermiticity_defect(&h) <= 1e-10 * max_abs(&h));
        }
    }

    #[test]
    fn polaron_equals_exact_without_coupling() {
        let mut p = SystemParams::baseline(2, 4).unwrap();
        p.coupling = vec![0.0; 2];
        let l = HilbertLayout::for_params(&p).unwrap();
        let a = build_exact_hamiltonian(&p, &l).unwrap();
        let b = build_polaron_hamiltonian(&p, &l).unwrap();
        assert!(max_abs(&(&a - &b)) <= 1e-15 * max_abs(&a));
    }

    #[test]
    fn polaron_electron_coupling_coefficient() {
        let (p, l) = table(2, 3);
        let h = build_polaron_hamiltonian(&p, &l).unwrap();
        let zz = l.product(&[(0, &sigma_z()), (1, &sigma_z())]).unwrap();
        let coef = nvsim_linalg::project_coefficient(&h, &zz).re;
        let want = -2.0 * p.osc_freq * p.alpha(0).powi(2);
        assert!((coef - want).abs() < 1e-9 * want.abs());
        assert!((want + TWO_PI * 10e3).abs() < 1e-6);
    }

    #[test]
    fn effective_and_graph_hamiltonians() {
        let jn = TWO_PI * 100.0;
        let j = CouplingMatrix::uniform_nuclear(2, jn);
        let h = build_effective_hamiltonian(&j, 2).unwrap();
        let d: Vec<f64> = h.diag().iter().map(|z| z.re).collect();
        assert_eq!(d, vec![-jn, jn, jn, -jn]);
        let g = build_graph_hamiltonian(&j, 2).unwrap();
        assert_eq!(g[[0, 0]].re, 0.0);
        assert!((g[[1, 1]].re - 4.0 * jn).abs() < 1e-12);
        assert!(build_effective_hamiltonian(&CouplingMatrix::uniform_nuclear(3, 0.0), 3).unwrap().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn effective_three_spin_enumeration() {
        let j = CouplingMatrix::uniform_nuclear(3, 1.0);
        let h = build_effective_hamiltonian(&j, 3).unwrap();
        // up=+1: ↑↑↑ → −3, one flip → +1, etc.
        let want = [-3.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, -3.0];
        for (s, w) in want.iter().enumerate() {
            assert_eq!(h[[s, s]].re, *w);
        }
    }

    #[test]
    fn rejects_bad_coupling() {
        let mut j = CouplingMatrix::uniform_nuclear(2, 1.0);
        j.jn[[0, 1]] = 2.0;
        assert!(build_effective_hamiltonian(&j, 2).is_err());
        assert!(build_graph_hamiltonian(&CouplingMatrix::uniform_nuclear(2, 1.0), 3).is_err());
    }
}
