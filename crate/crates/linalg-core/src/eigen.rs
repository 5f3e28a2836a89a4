use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{Array1, Array2};

use crate::ops::{hermiticity_defect, max_abs};
use crate::{policy, LinalgError, Operator, Result, C64};

/// Eigen-decomposition `h = V diag(values) V†` with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct Spectral {
    pub values: Array1<f64>,
    pub vectors: Operator,
}

impl Spectral {
    /// `V diag(f(λ)) V†`.
    pub fn apply_fn(&self, f: impl Fn(f64) -> C64) -> Operator {
        let mut scaled = self.vectors.clone();
        for (j, &l) in self.values.iter().enumerate() {
            let v = f(l);
            scaled.column_mut(j).mapv_inplace(|z| z * v);
        }
        scaled.dot(&self.vectors.t().mapv(|z| z.conj()))
    }
}

pub(crate) fn to_nalgebra(a: &Operator) -> DMatrix<C64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

pub(crate) fn from_nalgebra(m: &DMatrix<C64>) -> Operator {
    Array2::from_shape_fn((m.nrows(), m.ncols()), |(i, j)| m[(i, j)])
}

/// Hermitian eigen-decomposition.
pub fn spectral_decompose(h: &Operator) -> Result<Spectral> {
    let (r, c) = h.dim();
    if r != c {
        return Err(LinalgError::NotSquare { rows: r, cols: c });
    }
    crate::ops::check_finite(h.iter())?;
    let scale = max_abs(h).max(1.0);
    let asym = hermiticity_defect(h);
    if asym > policy().hermitian_tol * scale {
        return Err(LinalgError::NotHermitian { asymmetry: asym });
    }
    if r == 0 {
        return Ok(Spectral { values: Array1::zeros(0), vectors: Array2::zeros((0, 0)) });
    }
    let eig = SymmetricEigen::new(to_nalgebra(h));
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = Array1::from_iter(order.iter().map(|&k| eig.eigenvalues[k]));
    let vectors = Array2::from_shape_fn((r, r), |(i, j)| eig.eigenvectors[(i, order[j])]);
    Ok(Spectral { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::{dagger, identity};
    use ndarray::array;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn pauli_spectra() {
        let sz = array![[c(1.0), c(0.0)], [c(0.0), c(-1.0)]];
        let s = spectral_decompose(&sz).unwrap();
        assert_eq!(s.values.to_vec(), vec![-1.0, 1.0]);
        let om = 2.0 * std::f64::consts::PI * 15.25e6;
        let sx = array![[c(0.0), c(om / 2.0)], [c(om / 2.0), c(0.0)]];
        let s = spectral_decompose(&sx).unwrap();
        assert!((s.values[0] + om / 2.0).abs() < 1e-6);
        assert!((s.values[1] - om / 2.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = array![[c(0.0), c(1.0)], [c(0.0), c(0.0)]];
        match spectral_decompose(&a) {
            Err(LinalgError::NotHermitian { asymmetry }) => assert_eq!(asymmetry, 1.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reconstruction_random_20() {
        // deterministic pseudo-random Hermitian matrix
        let mut state = 12345u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let n = 20;
        let mut h = Operator::zeros((n, n));
        for i in 0..n {
            h[[i, i]] = c(next());
            for j in i + 1..n {
                let z = C64::new(next(), next());
                h[[i, j]] = z;
                h[[j, i]] = z.conj();
            }
        }
        let s = spectral_decompose(&h).unwrap();
        let back = s.apply_fn(c);
        assert!(max_abs(&(&back - &h)) < 1e-12);
        let gram = dagger(&s.vectors).dot(&s.vectors);
        assert!(max_abs(&(gram - identity(n))) < 1e-12);
        assert!(s.values.windows(2).into_iter().all(|w| w[0] <= w[1]));
    }
}
