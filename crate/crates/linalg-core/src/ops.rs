use ndarray::{Array2, ArrayView1, ArrayView2};

use crate::eigen::spectral_decompose;
use crate::{policy, LinalgError, Operator, Result, C64};

fn ensure_square(a: &ArrayView2<C64>) -> Result<usize> {
    let (r, c) = a.dim();
    if r != c {
        return Err(LinalgError::NotSquare { rows: r, cols: c });
    }
    Ok(r)
}

/// Tensor product `a ⊗ b`.
pub fn kron(a: &Operator, b: &Operator) -> Result<Operator> {
    let na = ensure_square(&a.view())?;
    let nb = ensure_square(&b.view())?;
    let dim = na
        .checked_mul(nb)
        .ok_or(LinalgError::Capacity { dim: usize::MAX, max: policy().max_dim })?;
    if dim > policy().max_dim {
        return Err(LinalgError::Capacity { dim, max: policy().max_dim });
    }
    let mut out = Array2::zeros((dim, dim));
    for ia in 0..na {
        for ja in 0..na {
            let x = a[[ia, ja]];
            if x == C64::new(0.0, 0.0) {
                continue;
            }
            let mut blk = out.slice_mut(ndarray::s![ia * nb..(ia + 1) * nb, ja * nb..(ja + 1) * nb]);
            blk.zip_mut_with(b, |o, &y| *o = x * y);
        }
    }
    Ok(out)
}

/// Left-to-right tensor product of a list of operators.
pub fn kron_all(ops: &[Operator]) -> Result<Operator> {
    let mut acc = Array2::from_elem((1, 1), C64::new(1.0, 0.0));
    for op in ops {
        acc = kron(&acc, op)?;
    }
    Ok(acc)
}

pub fn identity(n: usize) -> Operator {
    Array2::eye(n)
}

/// `op` acting on subsystem `k` of a tensor product with the given dimensions.
pub fn embed(op: &Operator, k: usize, dims: &[usize]) -> Result<Operator> {
    if k >= dims.len() {
        return Err(LinalgError::InvalidArgument(format!(
            "subsystem {k} out of range for {} factors",
            dims.len()
        )));
    }
    if op.nrows() != dims[k] {
        return Err(LinalgError::DimensionMismatch { expected: dims[k], got: op.nrows() });
    }
    let left: usize = dims[..k].iter().product();
    let right: usize = dims[k + 1..].iter().product();
    kron(&kron(&identity(left), op)?, &identity(right))
}

pub fn dagger(a: &Operator) -> Operator {
    a.t().mapv(|z| z.conj())
}

pub fn commutator(a: &Operator, b: &Operator) -> Operator {
    a.dot(b) - b.dot(a)
}

pub fn max_abs(a: &Operator) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// Largest entrywise |a - a†|.
pub fn hermiticity_defect(a: &Operator) -> f64 {
    let n = a.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[[i, j]] - a[[j, i]].conj()).norm());
        }
    }
    worst
}

/// Largest entrywise |u†u - 1|.
pub fn unitarity_defect(u: &Operator) -> f64 {
    let g = dagger(u).dot(u);
    max_abs(&(g - identity(u.nrows())))
}

/// Spectral (operator 2-) norm.
pub fn spectral_norm(a: &Operator) -> Result<f64> {
    ensure_square(&a.view())?;
    let scale = max_abs(a);
    if scale == 0.0 {
        return Ok(0.0);
    }
    if hermiticity_defect(a) <= 1e-13 * scale {
        let s = spectral_decompose(&a.mapv(|z| z / scale))?;
        let lam = s.values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        return Ok(lam * scale);
    }
    let b = a.mapv(|z| z / scale);
    let g = dagger(&b).dot(&b);
    let s = spectral_decompose(&((&g + &dagger(&g)) * C64::new(0.5, 0.0)))?;
    Ok(s.values.last().copied().unwrap_or(0.0).max(0.0).sqrt() * scale)
}

/// Hilbert-Schmidt inner product Tr(a† b).
pub fn operator_inner(a: &Operator, b: &Operator) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Coefficient of `basis` in `x` under the Hilbert-Schmidt inner product.
pub fn project_coefficient(x: &Operator, basis: &Operator) -> C64 {
    operator_inner(basis, x) / operator_inner(basis, basis)
}

/// ⟨a|b⟩.
pub fn inner(a: ArrayView1<C64>, b: ArrayView1<C64>) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn state_norm(a: ArrayView1<C64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn check_finite<'a>(entries: impl IntoIterator<Item = &'a C64>) -> Result<()> {
    if entries.into_iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(LinalgError::NonFinite)
    }
}

/// Checks Hermiticity, unit trace and positivity against the global policy.
pub fn check_density(rho: &Operator) -> Result<()> {
    ensure_square(&rho.view())?;
    check_finite(rho.iter())?;
    let p = policy();
    let asym = hermiticity_defect(rho);
    if asym > p.hermitian_tol {
        return Err(LinalgError::InvalidDensity(format!("asymmetry {asym:.3e}")));
    }
    let tr: C64 = rho.diag().sum();
    if (tr - C64::new(1.0, 0.0)).norm() > p.trace_tol {
        return Err(LinalgError::InvalidDensity(format!("trace {tr}")));
    }
    let herm = (rho + &dagger(rho)) * C64::new(0.5, 0.0);
    let s = spectral_decompose(&herm)?;
    if let Some(&min) = s.values.first() {
        if min < -p.positivity_tol {
            return Err(LinalgError::InvalidDensity(format!("eigenvalue {min:.3e}")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn kron_identities() {
        let i2 = identity(2);
        assert_eq!(kron(&i2, &i2).unwrap(), identity(4));
        let sz = array![[c(1.0), c(0.0)], [c(0.0), c(-1.0)]];
        let k = kron(&sz, &i2).unwrap();
        let d: Vec<f64> = k.diag().iter().map(|z| z.re).collect();
        assert_eq!(d, vec![1.0, 1.0, -1.0, -1.0]);
        assert_eq!(max_abs(&(&k - &Operator::from_diag(&k.diag()))), 0.0);
    }

    #[test]
    fn kron_matches_index_formula() {
        let a = Operator::from_shape_fn((3, 3), |(i, j)| C64::new(i as f64 + 0.3 * j as f64, j as f64 - 1.0));
        let b = Operator::from_shape_fn((2, 2), |(i, j)| C64::new(0.5 - i as f64, 2.0 * j as f64 + 0.1));
        let k = kron(&a, &b).unwrap();
        for ia in 0..3 {
            for ib in 0..2 {
                for ja in 0..3 {
                    for jb in 0..2 {
                        assert_eq!(k[[ia * 2 + ib, ja * 2 + jb]], a[[ia, ja]] * b[[ib, jb]]);
                    }
                }
            }
        }
    }

    #[test]
    fn kron_capacity_error() {
        let big = identity(policy().max_dim / 2 + 1);
        let err = kron(&big, &identity(2)).unwrap_err();
        assert!(matches!(err, LinalgError::Capacity { .. }));
    }

    #[test]
    fn embed_rejects_wrong_dimension() {
        assert!(embed(&identity(3), 0, &[2, 2]).is_err());
        assert!(embed(&identity(2), 2, &[2, 2]).is_err());
    }

    #[test]
    fn spectral_norm_of_nonnormal() {
        let a = array![[c(0.0), c(2.0)], [c(0.0), c(0.0)]];
        assert!((spectral_norm(&a).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn density_checks() {
        let mut rho = identity(2) * c(0.5);
        check_density(&rho).unwrap();
        rho[[0, 0]] = c(0.7);
        assert!(check_density(&rho).is_err());
        let bad = array![[c(1.2), c(0.0)], [c(0.0), c(-0.2)]];
        assert!(check_density(&bad).is_err());
    }
}
