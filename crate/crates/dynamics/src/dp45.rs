//! Dormand–Prince 5(4) with FSAL and standard step control, over flat
//! complex vectors. Errors are measured in the max norm.

use nvsim_linalg::C64;

use crate::{DynamicsError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dp45Options {
    pub atol: f64,
    pub rtol: f64,
    /// First trial step; estimated from the derivative when `None`.
    pub initial_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for Dp45Options {
    fn default() -> Self {
        Self { atol: 1e-8, rtol: 1e-8, initial_step: None, max_steps: 50_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dp45Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
    pub min_step: f64,
    pub max_step: f64,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// 5th minus 4th order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrator state; reuse one instance across consecutive intervals so
/// the step size carries over.
#[derive(Debug, Clone)]
pub struct Dp45 {
    opts: Dp45Options,
    stats: Dp45Stats,
    h: Option<f64>,
    k: Vec<Vec<C64>>,
    tmp: Vec<C64>,
    y_new: Vec<C64>,
}

impl Dp45 {
    pub fn new(opts: Dp45Options) -> Self {
        Self {
            opts,
            stats: Dp45Stats { min_step: f64::INFINITY, ..Default::default() },
            h: opts.initial_step,
            k: Vec::new(),
            tmp: Vec::new(),
            y_new: Vec::new(),
        }
    }

    pub fn stats(&self) -> Dp45Stats {
        self.stats
    }

    /// Largest component error relative to atol + rtol·|y| (max norm).
    fn scaled_norm(&self, err: impl Iterator<Item = (C64, f64)>) -> f64 {
        err.map(|(e, y)| e.norm() / (self.opts.atol + self.opts.rtol * y)).fold(0.0, f64::max)
    }

    /// Advances `y` from `t0` to `t1` exactly. `f(t, y, dy)` writes dy/dt.
    pub fn integrate<F>(&mut self, mut f: F, y: &mut [C64], t0: f64, t1: f64) -> Result<()>
    where
        F: FnMut(f64, &[C64], &mut [C64]),
    {
        let n = y.len();
        if self.k.len() != 7 || self.k[0].len() != n {
            self.k = vec![vec![C64::new(0.0, 0.0); n]; 7];
            self.tmp = vec![C64::new(0.0, 0.0); n];
            self.y_new = vec![C64::new(0.0, 0.0); n];
        }
        if t1 <= t0 {
            return Ok(());
        }
        let span = t1 - t0;
        f(t0, y, &mut self.k[0]);
        self.stats.evaluations += 1;
        let mut h = match self.h {
            Some(h) => h,
            None => {
                let d0 = self.scaled_norm(y.iter().map(|z| (*z, z.norm())));
                let d1 = self.scaled_norm(self.k[0].iter().zip(y.iter()).map(|(k, z)| (*k, z.norm())));
                if d0 < 1e-5 || d1 < 1e-5 {
                    1e-6 * span
                } else {
                    0.01 * d0 / d1
                }
            }
        };
        let mut t = t0;
        let mut steps = 0usize;
        while t < t1 {
            let last = t + h >= t1 - 1e-13 * span;
            let hs = if last { t1 - t } else { h };
            for s in 1..7 {
                let (done, rest) = self.k.split_at_mut(s);
                for i in 0..n {
                    let mut acc = C64::new(0.0, 0.0);
                    for (kj, a) in done.iter().zip(&A[s][..s]) {
                        if *a != 0.0 {
                            acc += kj[i] * *a;
                        }
                    }
                    self.tmp[i] = y[i] + acc * hs;
                }
                f(t + C[s] * hs, &self.tmp, &mut rest[0]);
                self.stats.evaluations += 1;
            }
            // stage 7 was evaluated at the 5th-order solution, now in tmp
            self.y_new.copy_from_slice(&self.tmp);
            let err = self.scaled_norm(
                (0..n).map(|i| {
                    let mut e = C64::new(0.0, 0.0);
                    for (j, w) in E.iter().enumerate() {
                        if *w != 0.0 {
                            e += self.k[j][i] * *w;
                        }
                    }
                    (e * hs, y[i].norm().max(self.y_new[i].norm()))
                }),
            );
            steps += 1;
            if steps > self.opts.max_steps {
                return Err(DynamicsError::StepUnderflow { t, h: hs });
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                t = if last { t1 } else { t + hs };
                y.copy_from_slice(&self.y_new);
                self.k.swap(0, 6);
                self.stats.accepted += 1;
                self.stats.min_step = self.stats.min_step.min(hs);
                self.stats.max_step = self.stats.max_step.max(hs);
                if !last || hs >= h {
                    h = hs * factor;
                }
            } else {
                self.stats.rejected += 1;
                h = hs * factor.min(1.0);
                if h < 1e-14 * t1.abs().max(span) {
                    return Err(DynamicsError::StepUnderflow { t, h });
                }
            }
        }
        self.h = Some(h);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_and_rotation() {
        let lam = C64::new(-0.5, 3.0);
        let mut y = vec![C64::new(1.0, 0.0), C64::new(0.0, 2.0)];
        let mut ode = Dp45::new(Dp45Options { atol: 1e-10, rtol: 1e-10, ..Default::default() });
        let f = |_t: f64, y: &[C64], dy: &mut [C64]| {
            for (d, v) in dy.iter_mut().zip(y) {
                *d = lam * v;
            }
        };
        ode.integrate(f, &mut y, 0.0, 1.0).unwrap();
        ode.integrate(f, &mut y, 1.0, 2.0).unwrap();
        let want = (lam * 2.0).exp();
        assert!((y[0] - want).norm() < 1e-8);
        assert!((y[1] - want * C64::new(0.0, 2.0)).norm() < 2e-8);
        assert!(ode.stats().accepted > 10);
    }

    #[test]
    fn time_dependent_rhs() {
        // y' = cos t  =>  y = sin t
        let mut y = vec![C64::new(0.0, 0.0)];
        let mut ode = Dp45::new(Dp45Options::default());
        ode.integrate(|t, _y, dy| dy[0] = C64::new(t.cos(), 0.0), &mut y, 0.0, 4.0).unwrap();
        assert!((y[0].re - 4f64.sin()).abs() < 1e-7);
    }

    #[test]
    fn fifth_order_local_error() {
        let one_step = |h: f64| {
            let mut y = vec![C64::new(1.0, 0.0)];
            let mut ode = Dp45::new(Dp45Options { atol: 1e3, rtol: 1e3, initial_step: Some(h), max_steps: 10 });
            ode.integrate(|_t, y, dy| dy[0] = C64::new(0.0, 5.0) * y[0], &mut y, 0.0, h).unwrap();
            (y[0] - C64::new(0.0, 5.0 * h).exp()).norm()
        };
        // local error is O(h^6)
        let ratio = one_step(0.1) / one_step(0.05);
        assert!(ratio > 40.0 && ratio < 90.0, "{ratio}");
    }
}
