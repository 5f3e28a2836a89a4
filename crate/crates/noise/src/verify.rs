use nvsim_linalg::exec::{map_indexed, mean_stderr, Execution};

use crate::{NoiseParams, NoiseProcess, StreamKey};

/// Ensemble-averaged curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub times: Vec<f64>,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
}

fn sample_times(t_end: f64, samples: usize) -> Vec<f64> {
    match samples {
        0 => Vec::new(),
        1 => vec![t_end],
        n => (0..n).map(|k| t_end * k as f64 / (n - 1) as f64).collect(),
    }
}

fn average(times: Vec<f64>, rows: Vec<Vec<f64>>) -> Curve {
    let n = times.len();
    let (mut mean, mut stderr) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for k in 0..n {
        let col: Vec<f64> = rows.iter().map(|r| r[k]).collect();
        let (m, s) = mean_stderr(&col);
        mean.push(m);
        stderr.push(s);
    }
    Curve { times, mean, stderr }
}

/// ⟨σ_x⟩(t) of one qubit under H = B(t)σ_z/2 starting in |+⟩, with B held
/// constant over `steps_per_sample` sub-steps of each sampling interval.
pub fn free_induction_decay(
    params: NoiseParams,
    t_end: f64,
    samples: usize,
    n_realizations: usize,
    seed: u64,
    steps_per_sample: usize,
    exec: Execution,
) -> Curve {
    let times = sample_times(t_end, samples);
    let sub = steps_per_sample.max(1);
    let rows = map_indexed(exec, n_realizations, |r| {
        let mut b = NoiseProcess::from_key(params, StreamKey { seed, realization: r as u64, spin: 0 });
        let mut phase = 0.0;
        let mut out = Vec::with_capacity(times.len());
        let mut t_prev = 0.0;
        for &t in &times {
            let h = (t - t_prev) / sub as f64;
            if h > 0.0 {
                for _ in 0..sub {
                    phase += b.value() * h;
                    b.step(h);
                }
            }
            t_prev = t;
            out.push(phase.cos());
        }
        out
    });
    average(times, rows)
}

/// ⟨B(0)B(t)⟩ / 𝓑² (identically zero when 𝓑 = 0).
pub fn autocorrelation(
    params: NoiseParams,
    t_end: f64,
    samples: usize,
    n_realizations: usize,
    seed: u64,
    exec: Execution,
) -> Curve {
    let times = sample_times(t_end, samples);
    let norm = params.strength * params.strength;
    let rows = map_indexed(exec, n_realizations, |r| {
        let mut b = NoiseProcess::from_key(params, StreamKey { seed, realization: r as u64, spin: 0 });
        let b0 = b.value();
        let mut t_prev = 0.0;
        times
            .iter()
            .map(|&t| {
                if t > t_prev {
                    b.step(t - t_prev);
                }
                t_prev = t;
                if norm > 0.0 {
                    b0 * b.value() / norm
                } else {
                    0.0
                }
            })
            .collect()
    });
    average(times, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn silent_noise_curves() {
        let p = NoiseParams::new(0.02, 0.0).unwrap();
        let f = free_induction_decay(p, 1e-3, 11, 5, 1, 4, Execution::Sequential);
        assert!(f.mean.iter().all(|&x| x == 1.0));
        let a = autocorrelation(p, 0.04, 11, 5, 1, Execution::Sequential);
        assert!(a.mean.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn worker_count_does_not_change_bits() {
        let p = NoiseParams::new(0.02, 1e3).unwrap();
        let a = free_induction_decay(p, 2e-3, 21, 64, 9, 5, Execution::Sequential);
        let b = free_induction_decay(p, 2e-3, 21, 64, 9, 5, Execution::Parallel);
        assert_eq!(a, b);
    }
}
