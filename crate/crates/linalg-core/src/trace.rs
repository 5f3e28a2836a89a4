use ndarray::{Array2, ArrayView1};

use crate::{LinalgError, Operator, Result, C64};

/// Ordered list of tensor-factor dimensions, leftmost factor most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorLayout {
    dims: Vec<usize>,
}

impl TensorLayout {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(LinalgError::InvalidArgument(format!("bad factor dimensions {dims:?}")));
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// For each kept multi-index (row) and traced multi-index (column), the
    /// flat index into the full space.
    fn split_table(&self, keep: &[usize]) -> Result<(Vec<usize>, usize, usize)> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.is_empty() {
            return Err(LinalgError::InvalidArgument("empty keep set".into()));
        }
        if let Some(&k) = keep.iter().find(|&&k| k >= self.dims.len()) {
            return Err(LinalgError::InvalidArgument(format!("subsystem {k} not in layout")));
        }
        let n = self.dims.len();
        let mut strides = vec![1usize; n];
        for k in (0..n.saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        let traced: Vec<usize> = (0..n).filter(|k| !keep.contains(k)).collect();
        let dk: usize = keep.iter().map(|&k| self.dims[k]).product();
        let dt: usize = traced.iter().map(|&k| self.dims[k]).product();
        let offsets = |sub: &[usize], count: usize| -> Vec<usize> {
            (0..count)
                .map(|mut r| {
                    let mut off = 0;
                    for &k in sub.iter().rev() {
                        off += (r % self.dims[k]) * strides[k];
                        r /= self.dims[k];
                    }
                    off
                })
                .collect()
        };
        let ko = offsets(&keep, dk);
        let to = offsets(&traced, dt);
        let mut table = Vec::with_capacity(dk * dt);
        for &a in &ko {
            for &b in &to {
                table.push(a + b);
            }
        }
        Ok((table, dk, dt))
    }
}

/// Reduced density matrix over the `keep` subsystems, in layout order.
pub fn partial_trace(rho: &Operator, layout: &TensorLayout, keep: &[usize]) -> Result<Operator> {
    let d = layout.total_dim();
    if rho.nrows() != d || rho.ncols() != d {
        return Err(LinalgError::DimensionMismatch { expected: d, got: rho.nrows() });
    }
    let (table, dk, dt) = layout.split_table(keep)?;
    let mut out = Array2::zeros((dk, dk));
    for i in 0..dk {
        for j in 0..dk {
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..dt {
                acc += rho[[table[i * dt + t], table[j * dt + t]]];
            }
            out[[i, j]] = acc;
        }
    }
    Ok(out)
}

/// Reduced density matrix of the pure state `psi` over the `keep` subsystems.
pub fn reduce_pure(psi: ArrayView1<C64>, layout: &TensorLayout, keep: &[usize]) -> Result<Operator> {
    let d = layout.total_dim();
    if psi.len() != d {
        return Err(LinalgError::DimensionMismatch { expected: d, got: psi.len() });
    }
    let (table, dk, dt) = layout.split_table(keep)?;
    let m = Array2::from_shape_fn((dk, dt), |(i, t)| psi[table[i * dt + t]]);
    Ok(m.dot(&m.t().mapv(|z| z.conj())))
}
