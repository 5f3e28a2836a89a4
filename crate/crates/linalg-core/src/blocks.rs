use ndarray::{Array1, Array2, ArrayView1};

use crate::eigen::{spectral_decompose, Spectral};
use crate::{LinalgError, Operator, Result, C64};

/// One invariant subspace of a block-diagonal Hermitian operator.
#[derive(Debug, Clone)]
pub struct Block {
    /// Full-space basis indices spanning the block, ascending.
    pub indices: Vec<usize>,
    pub spectral: Spectral,
}

impl Block {
    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    /// The block's submatrix of a full-space operator.
    pub fn restrict(&self, op: &Operator) -> Operator {
        Array2::from_shape_fn((self.dim(), self.dim()), |(i, j)| op[[self.indices[i], self.indices[j]]])
    }

    /// Submatrix coupling this block (rows) to `other` (columns).
    pub fn restrict_to(&self, other: &Block, op: &Operator) -> Operator {
        Array2::from_shape_fn((self.dim(), other.dim()), |(i, j)| op[[self.indices[i], other.indices[j]]])
    }

    /// `V† X V` for a block-local operator.
    pub fn to_eigenbasis(&self, x: &Operator) -> Operator {
        let v = &self.spectral.vectors;
        v.t().mapv(|z| z.conj()).dot(&x.dot(v))
    }

    /// `V† X W` for an operator mapping block `other` (eigenvectors W) into this one.
    pub fn to_eigenbasis_pair(&self, other: &Block, x: &Operator) -> Operator {
        self.spectral.vectors.t().mapv(|z| z.conj()).dot(&x.dot(&other.spectral.vectors))
    }
}

/// Eigen-decomposition of a Hermitian operator split into its connected
/// blocks (components of the non-zero pattern).
#[derive(Debug, Clone)]
pub struct BlockSpectral {
    dim: usize,
    blocks: Vec<Block>,
    /// full index -> (block, local index)
    locate: Vec<(usize, usize)>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

impl BlockSpectral {
    pub fn new(h: &Operator) -> Result<Self> {
        let n = h.nrows();
        if h.ncols() != n {
            return Err(LinalgError::NotSquare { rows: n, cols: h.ncols() });
        }
        let mut parent: Vec<usize> = (0..n).collect();
        for i in 0..n {
            for j in i + 1..n {
                if h[[i, j]] != C64::new(0.0, 0.0) || h[[j, i]] != C64::new(0.0, 0.0) {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut root_slot = vec![usize::MAX; n];
        for i in 0..n {
            let r = find(&mut parent, i);
            if root_slot[r] == usize::MAX {
                root_slot[r] = groups.len();
                groups.push(Vec::new());
            }
            groups[root_slot[r]].push(i);
        }
        let mut locate = vec![(0, 0); n];
        let mut blocks = Vec::with_capacity(groups.len());
        for (b, indices) in groups.into_iter().enumerate() {
            for (l, &i) in indices.iter().enumerate() {
                locate[i] = (b, l);
            }
            let sub = Array2::from_shape_fn((indices.len(), indices.len()), |(i, j)| h[[indices[i], indices[j]]]);
            blocks.push(Block { indices, spectral: spectral_decompose(&sub)? });
        }
        Ok(Self { dim: n, blocks, locate })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// (block, local index) of a full-space basis index.
    pub fn locate(&self, i: usize) -> (usize, usize) {
        self.locate[i]
    }

    /// True when `op` has no entries connecting different blocks.
    pub fn preserves_blocks(&self, op: &Operator) -> bool {
        op.indexed_iter()
            .all(|((i, j), z)| *z == C64::new(0.0, 0.0) || self.locate[i].0 == self.locate[j].0)
    }

    /// Per-block eigenbasis coefficients of a full-space vector.
    pub fn to_eigen(&self, psi: ArrayView1<C64>) -> Vec<Array1<C64>> {
        self.blocks
            .iter()
            .map(|b| {
                let v = &b.spectral.vectors;
                let local = Array1::from_iter(b.indices.iter().map(|&i| psi[i]));
                v.t().mapv(|z| z.conj()).dot(&local)
            })
            .collect()
    }

    /// Full-space vector from per-block eigenbasis coefficients.
    pub fn to_bare(&self, coeffs: &[Array1<C64>]) -> Array1<C64> {
        let mut out = Array1::zeros(self.dim);
        for (b, c) in self.blocks.iter().zip(coeffs) {
            let local = b.spectral.vectors.dot(c);
            for (&i, z) in b.indices.iter().zip(local.iter()) {
                out[i] = *z;
            }
        }
        out
    }

    /// Multiply eigenbasis coefficients by `exp(-i E t)`.
    pub fn advance(&self, coeffs: &mut [Array1<C64>], t: f64) {
        for (b, c) in self.blocks.iter().zip(coeffs.iter_mut()) {
            for (z, &e) in c.iter_mut().zip(b.spectral.values.iter()) {
                *z *= C64::from_polar(1.0, -e * t);
            }
        }
    }

    /// `exp(-i h t) psi`.
    pub fn evolve(&self, psi: ArrayView1<C64>, t: f64) -> Array1<C64> {
        let mut c = self.to_eigen(psi);
        self.advance(&mut c, t);
        self.to_bare(&c)
    }
}
