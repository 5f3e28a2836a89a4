use ndarray::{Array1, Array2};
use nvsim_linalg::{identity, kron_all, Operator, StateVector, TensorLayout, C64};

use crate::{ModelError, Result, SystemParams};

/// Tensor layout e₁…e_N, n₁…n_N, oscillator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertLayout {
    n_centers: usize,
    fock_dim: usize,
    tensor: TensorLayout,
}

impl HilbertLayout {
    pub fn new(n_centers: usize, fock_dim: usize) -> Result<Self> {
        if n_centers == 0 || fock_dim < 2 {
            return Err(ModelError::InvalidParams(format!(
                "layout needs N >= 1 and fock_dim >= 2, got {n_centers}, {fock_dim}"
            )));
        }
        let mut dims = vec![2; 2 * n_centers];
        dims.push(fock_dim);
        let tensor = TensorLayout::new(dims)?;
        if tensor.total_dim() > nvsim_linalg::policy().max_dim {
            return Err(nvsim_linalg::LinalgError::Capacity {
                dim: tensor.total_dim(),
                max: nvsim_linalg::policy().max_dim,
            }
            .into());
        }
        Ok(Self { n_centers, fock_dim, tensor })
    }

    pub fn for_params(p: &SystemParams) -> Result<Self> {
        Self::new(p.n_centers, p.fock_dim)
    }

    pub(crate) fn check(&self, p: &SystemParams) -> Result<()> {
        p.validate()?;
        if p.n_centers != self.n_centers || p.fock_dim != self.fock_dim {
            return Err(ModelError::LayoutMismatch {
                layout_n: self.n_centers,
                layout_fock: self.fock_dim,
                n: p.n_centers,
                fock: p.fock_dim,
            });
        }
        Ok(())
    }

    pub fn n_centers(&self) -> usize {
        self.n_centers
    }

    pub fn fock_dim(&self) -> usize {
        self.fock_dim
    }

    pub fn tensor(&self) -> &TensorLayout {
        &self.tensor
    }

    pub fn dim(&self) -> usize {
        self.tensor.total_dim()
    }

    pub fn electron(&self, i: usize) -> usize {
        i
    }

    pub fn nucleus(&self, i: usize) -> usize {
        self.n_centers + i
    }

    pub fn oscillator(&self) -> usize {
        2 * self.n_centers
    }

    pub fn nuclei(&self) -> Vec<usize> {
        (0..self.n_centers).map(|i| self.nucleus(i)).collect()
    }

    pub fn electrons(&self) -> Vec<usize> {
        (0..self.n_centers).collect()
    }

    /// Flat index of a basis state; spins given as 0 (up) / 1 (down).
    pub fn index(&self, electrons: &[usize], nuclei: &[usize], fock: usize) -> usize {
        let mut idx = 0;
        for &s in electrons.iter().chain(nuclei) {
            idx = idx * 2 + s;
        }
        idx * self.fock_dim + fock
    }

    /// Product of local operators; unspecified factors are identities.
    pub fn product(&self, factors: &[(usize, &Operator)]) -> Result<Operator> {
        let ops: Vec<Operator> = self
            .tensor
            .dims()
            .iter()
            .enumerate()
            .map(|(k, &d)| {
                let mut op = identity(d);
                for (slot, f) in factors {
                    if *slot == k {
                        op = op.dot(*f);
                    }
                }
                op
            })
            .collect();
        Ok(kron_all(&ops)?)
    }

    /// Diagonal of a product of diagonal local operators.
    pub fn diagonal(&self, factors: &[(usize, &[f64])]) -> Array1<f64> {
        let dims = self.tensor.dims();
        let n = self.dim();
        let mut out = Array1::from_elem(n, 1.0);
        let mut stride = n;
        for (k, &d) in dims.iter().enumerate() {
            stride /= d;
            for (slot, vals) in factors {
                if *slot == k {
                    for (i, x) in out.iter_mut().enumerate() {
                        *x *= vals[(i / stride) % d];
                    }
                }
            }
        }
        out
    }

    /// Product state from one vector per subsystem, in layout order.
    pub fn product_state(&self, parts: &[StateVector]) -> Result<StateVector> {
        let dims = self.tensor.dims();
        if parts.len() != dims.len() || parts.iter().zip(dims).any(|(p, &d)| p.len() != d) {
            return Err(ModelError::InvalidParams("product state factors do not match layout".into()));
        }
        Ok(crate::pauli::kron_states(parts))
    }

    /// Embeds a nuclear-subspace operator (dim 2^N) into the full space.
    pub fn embed_nuclear(&self, op: &Operator) -> Result<Operator> {
        let dn = 1usize << self.n_centers;
        if op.nrows() != dn {
            return Err(nvsim_linalg::LinalgError::DimensionMismatch { expected: dn, got: op.nrows() }.into());
        }
        let left = identity(dn);
        let right = identity(self.fock_dim);
        Ok(kron_all(&[left, op.clone(), right])?)
    }
}

/// Diagonal operator from real entries.
pub(crate) fn diag_op(d: &Array1<f64>) -> Operator {
    Array2::from_diag(&d.mapv(|x| C64::new(x, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{sigma_x, sigma_z};
    use nvsim_linalg::{commutator, embed, max_abs};

    #[test]
    fn dimensions_and_slots() {
        let l = HilbertLayout::new(2, 5).unwrap();
        assert_eq!(l.dim(), 4 * 4 * 5);
        assert_eq!(l.nucleus(1), 3);
        assert_eq!(l.oscillator(), 4);
        // bits e1 e2 n1 n2 = 0110
        assert_eq!(l.index(&[0, 1], &[1, 0], 3), 6 * 5 + 3);
    }

    #[test]
    fn product_matches_embed() {
        let l = HilbertLayout::new(1, 3).unwrap();
        let sx = sigma_x();
        let a = l.product(&[(1, &sx)]).unwrap();
        let b = embed(&sx, 1, l.tensor().dims()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn disjoint_embeddings_commute() {
        let l = HilbertLayout::new(2, 3).unwrap();
        let x0 = l.product(&[(0, &sigma_x())]).unwrap();
        let z1 = l.product(&[(3, &sigma_z())]).unwrap();
        assert_eq!(max_abs(&commutator(&x0, &z1)), 0.0);
    }

    #[test]
    fn diagonal_matches_product() {
        let l = HilbertLayout::new(2, 3).unwrap();
        let z = [1.0, -1.0];
        let d = l.diagonal(&[(1, &z), (2, &z)]);
        let full = l.product(&[(1, &sigma_z()), (2, &sigma_z())]).unwrap();
        assert_eq!(diag_op(&d), full);
    }
}
