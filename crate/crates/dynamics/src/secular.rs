//! Master equation in the interaction picture of the system Hamiltonian,
//! keeping only dissipator terms whose Bohr-frequency mismatch is below a
//! cutoff δ. Blocks of the Hamiltonian that the jump operator does not
//! mix evolve as independent (i, j) pairs of the density matrix.

use ndarray::Array1;
use nvsim_linalg::exec::{map_indexed, Execution};
use nvsim_linalg::{dagger, BlockSpectral, DensityMatrix, Operator, C64};
use serde::Serialize;

use crate::dp45::{Dp45, Dp45Options};
use crate::lindblad::LindbladSpec;
use crate::{DynamicsError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecularOptions {
    /// Frequency cutoff δ in rad/s.
    pub delta: f64,
    /// Matrix elements below this fraction of the largest one are dropped.
    pub drop_tol: f64,
    pub ode: Dp45Options,
    pub exec: Execution,
}

impl Default for SecularOptions {
    fn default() -> Self {
        Self { delta: 3e5, drop_tol: 1e-6, ode: Dp45Options::default(), exec: Execution::default() }
    }
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    r: u32,
    c: u32,
    val: C64,
    w: f64,
}

/// Entries of an eigenbasis operator with |value| above the threshold and
/// |frequency| below `wmax`.
fn entries(op: &Operator, e: &Array1<f64>, thresh: f64, wmax: f64) -> Vec<Entry> {
    op.indexed_iter()
        .filter_map(|((r, c), &val)| {
            let w = e[r] - e[c];
            (val.norm() > thresh && w.abs() < wmax).then_some(Entry { r: r as u32, c: c as u32, val, w })
        })
        .collect()
}

/// Jump term J X J'† restricted to near-resonant pairs of entries.
#[derive(Debug, Clone)]
struct Jump {
    coef: f64,
    left: Vec<Entry>,
    /// sorted by frequency
    right: Vec<Entry>,
    ranges: Vec<(u32, u32)>,
}

impl Jump {
    fn new(coef: f64, left: Vec<Entry>, mut right: Vec<Entry>, delta: f64) -> Self {
        right.sort_by(|a, b| a.w.total_cmp(&b.w));
        let ranges = left
            .iter()
            .map(|a| {
                let lo = right.partition_point(|b| b.w <= a.w - delta);
                let hi = right.partition_point(|b| b.w < a.w + delta);
                (lo as u32, hi.max(lo) as u32)
            })
            .collect();
        Self { coef, left, right, ranges }
    }

    fn tuples(&self) -> usize {
        self.ranges.iter().map(|(a, b)| (b - a) as usize).sum()
    }
}

#[derive(Debug, Clone)]
struct Pair {
    i: usize,
    j: usize,
    di: usize,
    dj: usize,
    jumps: Vec<Jump>,
    /// one-sided G = c₁a†a + c₂aa† on each side
    left: Vec<Entry>,
    right: Vec<Entry>,
}

impl Pair {
    fn rhs(&self, t: f64, x: &[C64], y: &mut [C64]) {
        let dj = self.dj;
        y.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        for jump in &self.jumps {
            let rv: Vec<C64> = jump.right.iter().map(|b| b.val.conj() * C64::from_polar(1.0, -b.w * t)).collect();
            for (a, &(lo, hi)) in jump.left.iter().zip(&jump.ranges) {
                let lv = a.val * C64::from_polar(2.0 * jump.coef, a.w * t);
                let (k, m) = (a.r as usize, a.c as usize);
                let xrow = &x[m * dj..(m + 1) * dj];
                let yrow = &mut y[k * dj..(k + 1) * dj];
                for (b, r) in jump.right[lo as usize..hi as usize].iter().zip(&rv[lo as usize..hi as usize]) {
                    yrow[b.r as usize] += lv * r * xrow[b.c as usize];
                }
            }
        }
        for a in &self.left {
            let g = a.val * C64::from_polar(1.0, a.w * t);
            let (k, m) = (a.r as usize, a.c as usize);
            for l in 0..dj {
                y[k * dj + l] -= g * x[m * dj + l];
            }
        }
        for b in &self.right {
            let g = b.val * C64::from_polar(1.0, b.w * t);
            let (n, l) = (b.r as usize, b.c as usize);
            for k in 0..self.di {
                y[k * dj + l] -= g * x[k * dj + n];
            }
        }
    }
}

/// Density matrix in interaction-picture eigenbasis pieces at time `t`.
#[derive(Debug, Clone)]
pub struct SecularSnapshot {
    pub t: f64,
    /// X_ij for the stored pairs (i ≤ j).
    blocks: Vec<Operator>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct SecularStats {
    pub pairs: usize,
    pub kept_tuples: usize,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

#[derive(Debug, Clone)]
pub struct SecularLindblad {
    spectral: BlockSpectral,
    pairs: Vec<Pair>,
    opts: SecularOptions,
}

impl SecularLindblad {
    pub fn new(h: &Operator, spec: &LindbladSpec, a: &Operator, opts: SecularOptions) -> Result<Self> {
        spec.validate()?;
        if !(opts.delta > 0.0) {
            return Err(DynamicsError::InvalidArgument("secular cutoff must be positive".into()));
        }
        let spectral = BlockSpectral::new(h)?;
        if a.dim() != h.dim() || !spectral.preserves_blocks(a) {
            return Err(DynamicsError::InvalidArgument("jump operator mixes Hamiltonian blocks".into()));
        }
        let (c1, c2) = spec.rates();
        let blocks = spectral.blocks();
        // per block: L, L†, G in the eigenbasis
        let local: Vec<(Operator, Operator, Operator)> = blocks
            .iter()
            .map(|b| {
                let l = b.to_eigenbasis(&b.restrict(a));
                let ld = dagger(&l);
                let g = ld.dot(&l) * C64::new(c1, 0.0) + l.dot(&ld) * C64::new(c2, 0.0);
                (l, ld, g)
            })
            .collect();
        let amax = local.iter().flat_map(|(l, _, _)| l.iter()).map(|z| z.norm()).fold(0.0, f64::max);
        let gmax = local.iter().flat_map(|(_, _, g)| g.iter()).map(|z| z.norm()).fold(0.0, f64::max);
        let (lt, gt) = (opts.drop_tol * amax, opts.drop_tol * gmax);
        let mut pairs = Vec::new();
        for i in 0..blocks.len() {
            for j in i..blocks.len() {
                let (ei, ej) = (&blocks[i].spectral.values, &blocks[j].spectral.values);
                let mut jumps = Vec::new();
                if c1 > 0.0 {
                    jumps.push(Jump::new(c1, entries(&local[i].0, ei, lt, f64::INFINITY), entries(&local[j].0, ej, lt, f64::INFINITY), opts.delta));
                }
                if c2 > 0.0 {
                    jumps.push(Jump::new(c2, entries(&local[i].1, ei, lt, f64::INFINITY), entries(&local[j].1, ej, lt, f64::INFINITY), opts.delta));
                }
                let (left, right) = if c1 + c2 > 0.0 {
                    (entries(&local[i].2, ei, gt, opts.delta), entries(&local[j].2, ej, gt, opts.delta))
                } else {
                    (Vec::new(), Vec::new())
                };
                pairs.push(Pair { i, j, di: ei.len(), dj: ej.len(), jumps, left, right });
            }
        }
        Ok(Self { spectral, pairs, opts })
    }

    pub fn spectral(&self) -> &BlockSpectral {
        &self.spectral
    }

    pub fn kept_tuples(&self) -> usize {
        self.pairs.iter().flat_map(|p| &p.jumps).map(Jump::tuples).sum()
    }

    /// Snapshots at each sample time (non-decreasing, starting from t = 0).
    pub fn evolve(&self, rho0: &DensityMatrix, samples: &[f64]) -> Result<(Vec<SecularSnapshot>, SecularStats)> {
        if rho0.dim() != (self.spectral.dim(), self.spectral.dim()) {
            return Err(DynamicsError::InvalidArgument("rho0 does not match h".into()));
        }
        if samples.windows(2).any(|w| w[1] < w[0]) || samples.iter().any(|&t| t < 0.0) {
            return Err(DynamicsError::InvalidArgument("sample times must be sorted and non-negative".into()));
        }
        let blocks = self.spectral.blocks();
        let runs = map_indexed(self.opts.exec, self.pairs.len(), |p| {
            let pair = &self.pairs[p];
            let (bi, bj) = (&blocks[pair.i], &blocks[pair.j]);
            let x0 = bi.to_eigenbasis_pair(bj, &bi.restrict_to(bj, rho0));
            let mut y: Vec<C64> = x0.iter().copied().collect();
            let mut ode = Dp45::new(self.opts.ode);
            let mut out = Vec::with_capacity(samples.len());
            let mut t = 0.0;
            for &ts in samples {
                ode.integrate(|t, x, dx| pair.rhs(t, x, dx), &mut y, t, ts)?;
                t = t.max(ts);
                out.push(Operator::from_shape_vec((pair.di, pair.dj), y.clone()).expect("shape"));
            }
            Ok((out, ode.stats()))
        });
        let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
        let mut stats = SecularStats { pairs: self.pairs.len(), kept_tuples: self.kept_tuples(), ..Default::default() };
        for (_, s) in &runs {
            stats.accepted_steps += s.accepted;
            stats.rejected_steps += s.rejected;
        }
        let mut per_pair: Vec<std::vec::IntoIter<Operator>> = runs.into_iter().map(|(o, _)| o.into_iter()).collect();
        let snaps = samples
            .iter()
            .map(|&t| SecularSnapshot { t, blocks: per_pair.iter_mut().map(|it| it.next().expect("sample")).collect() })
            .collect();
        Ok((snaps, stats))
    }

    /// Full density matrix at `snap.t + offset`, moving the snapshot by
    /// the closed-system evolution over `offset`.
    pub fn density(&self, snap: &SecularSnapshot, offset: f64) -> DensityMatrix {
        let n = self.spectral.dim();
        let blocks = self.spectral.blocks();
        let tau = snap.t + offset;
        let mut rho = DensityMatrix::zeros((n, n));
        for (pair, x) in self.pairs.iter().zip(&snap.blocks) {
            let (bi, bj) = (&blocks[pair.i], &blocks[pair.j]);
            let (ei, ej) = (&bi.spectral.values, &bj.spectral.values);
            let xs = Operator::from_shape_fn(x.dim(), |(k, l)| x[[k, l]] * C64::from_polar(1.0, -(ei[k] - ej[l]) * tau));
            let y = bi.spectral.vectors.dot(&xs).dot(&dagger(&bj.spectral.vectors));
            for (k, &r) in bi.indices.iter().enumerate() {
                for (l, &c) in bj.indices.iter().enumerate() {
                    rho[[r, c]] = y[[k, l]];
                    if pair.i != pair.j {
                        rho[[c, r]] = y[[k, l]].conj();
                    }
                }
            }
        }
        rho
    }

    pub fn trace(&self, snap: &SecularSnapshot) -> f64 {
        self.pairs
            .iter()
            .zip(&snap.blocks)
            .filter(|(p, _)| p.i == p.j)
            .map(|(_, x)| x.diag().iter().map(|z| z.re).sum::<f64>())
            .sum()
    }
}
