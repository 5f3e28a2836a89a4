use crate::{DynamicsError, Result};

/// `n` equally spaced times from 0 to `t_end`; a single sample sits at `t_end`.
pub fn sample_times(t_end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![t_end],
        _ => (0..n).map(|k| t_end * k as f64 / (n - 1) as f64).collect(),
    }
}

/// One propagation step and what happens at its end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanStep {
    /// Index into [`StepPlan::lengths`].
    pub length: usize,
    /// Pulse index applied after the step.
    pub pulse: Option<usize>,
    /// Apply pulses first, then record these samples (a range into the sample list).
    pub samples: (usize, usize),
}

/// Step sequence that lands exactly on every pulse and sample time.
///
/// Each interval between events is cut into full `dt` steps plus one
/// shorter remainder. A pulse and a sample at the same instant record
/// the post-pulse state.
#[derive(Debug, Clone)]
pub struct StepPlan {
    pub steps: Vec<PlanStep>,
    /// Distinct step lengths in seconds.
    pub lengths: Vec<f64>,
    /// Samples recorded before the first step (requested at t = 0).
    pub initial_samples: usize,
    n_samples: usize,
}

impl StepPlan {
    /// `samples` must be non-decreasing within [0, t_end]; pulses strictly inside (0, t_end).
    pub fn new(t_end: f64, samples: &[f64], pulses: &[f64], dt: f64) -> Result<Self> {
        if !(t_end > 0.0 && t_end.is_finite()) {
            return Err(DynamicsError::InvalidArgument(format!("evolution time must be positive, got {t_end}")));
        }
        if !(dt > 0.0) {
            return Err(DynamicsError::InvalidArgument(format!("step must be positive, got {dt}")));
        }
        if samples.windows(2).any(|w| w[1] < w[0]) || samples.iter().any(|&t| !(0.0..=t_end).contains(&t)) {
            return Err(DynamicsError::InvalidArgument("sample times must be sorted and inside [0, T]".into()));
        }
        if pulses.windows(2).any(|w| !(w[1] > w[0])) || pulses.iter().any(|&t| !(t > 0.0 && t < t_end)) {
            return Err(DynamicsError::InvalidArgument("pulse times must be increasing and inside (0, T)".into()));
        }
        let tol = 1e-12 * t_end;
        // event list: (time, pulse, sample_lo, sample_hi)
        let mut events: Vec<(f64, Option<usize>, usize, usize)> = Vec::new();
        let initial = samples.iter().take_while(|&&t| t <= tol).count();
        let (mut si, mut pi) = (initial, 0);
        loop {
            let ts = samples.get(si).copied();
            let tp = pulses.get(pi).copied();
            let t = match (ts, tp) {
                (None, None) => break,
                (Some(a), Some(b)) => a.min(b),
                (Some(a), None) => a,
                (None, Some(b)) => b,
            };
            let pulse = match tp {
                Some(b) if b <= t + tol => {
                    pi += 1;
                    Some(pi - 1)
                }
                _ => None,
            };
            let lo = si;
            while si < samples.len() && samples[si] <= t + tol {
                si += 1;
            }
            events.push((t, pulse, lo, si));
        }
        if events.last().map_or(true, |e| e.0 < t_end - tol) {
            events.push((t_end, None, si, si));
        }

        let mut lengths: Vec<f64> = Vec::new();
        let mut intern = |h: f64| -> usize {
            match lengths.iter().position(|&x| (x - h).abs() <= 1e-13 * x) {
                Some(i) => i,
                None => {
                    lengths.push(h);
                    lengths.len() - 1
                }
            }
        };
        let mut steps = Vec::new();
        let mut prev = 0.0;
        for (t, pulse, lo, hi) in events {
            let span = t - prev;
            prev = t;
            if span <= tol {
                // coincides with the previous event (or with t = 0)
                match steps.last_mut() {
                    Some(PlanStep { pulse: p, samples: s, .. }) => {
                        if pulse.is_some() {
                            *p = pulse;
                        }
                        s.1 = hi;
                    }
                    None => {
                        return Err(DynamicsError::InvalidArgument("pulse at t = 0".into()));
                    }
                }
                continue;
            }
            let full = (span / dt * (1.0 + 1e-12)).floor() as usize;
            let rem = span - full as f64 * dt;
            let mut seg: Vec<usize> = Vec::new();
            if full == 0 {
                seg.push(intern(span));
            } else if rem <= 1e-9 * dt {
                let h = span / full as f64;
                let k = intern(h);
                seg.extend(std::iter::repeat(k).take(full));
            } else {
                let k = intern(dt);
                seg.extend(std::iter::repeat(k).take(full));
                seg.push(intern(rem));
            }
            let last = seg.len() - 1;
            for (n, k) in seg.into_iter().enumerate() {
                let (pulse, samples) = if n == last { (pulse, (lo, hi)) } else { (None, (hi, hi)) };
                steps.push(PlanStep { length: k, pulse, samples });
            }
        }
        Ok(Self { steps, lengths, initial_samples: initial, n_samples: samples.len() })
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn min_step(&self) -> f64 {
        self.lengths.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_step(&self) -> f64 {
        self.lengths.iter().copied().fold(0.0, f64::max)
    }

    pub fn total_time(&self) -> f64 {
        self.steps.iter().map(|s| self.lengths[s.length]).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_grid() {
        assert_eq!(sample_times(1.0, 3), vec![0.0, 0.5, 1.0]);
        assert_eq!(sample_times(2.0, 1), vec![2.0]);
    }

    #[test]
    fn plan_hits_events_exactly() {
        let samples = sample_times(1.0, 5);
        let p = StepPlan::new(1.0, &samples, &[0.3, 0.5], 0.07).unwrap();
        assert_eq!(p.initial_samples, 1);
        let mut t = 0.0;
        let mut seen_pulses = vec![];
        let mut recorded = vec![0.0];
        for s in &p.steps {
            t += p.lengths[s.length];
            if let Some(k) = s.pulse {
                seen_pulses.push((k, t));
            }
            for _ in s.samples.0..s.samples.1 {
                recorded.push(t);
            }
            assert!(p.lengths[s.length] <= 0.07 * (1.0 + 1e-12));
        }
        assert!((t - 1.0).abs() < 1e-14);
        assert_eq!(seen_pulses.len(), 2);
        assert!((seen_pulses[0].1 - 0.3).abs() < 1e-14 && (seen_pulses[1].1 - 0.5).abs() < 1e-14);
        for (a, b) in recorded.iter().zip(&samples) {
            assert!((a - b).abs() < 1e-14);
        }
        // the pulse at 0.5 and the sample at 0.5 share a step
        let shared = p.steps.iter().find(|s| s.pulse == Some(1)).unwrap();
        assert_eq!(shared.samples, (2, 3));
    }

    #[test]
    fn exact_multiples_use_one_length() {
        let p = StepPlan::new(1.0, &[1.0], &[], 0.1).unwrap();
        assert_eq!(p.steps.len(), 10);
        assert_eq!(p.lengths.len(), 1);
        let q = StepPlan::new(1.0, &[1.0], &[], 0.3).unwrap();
        assert_eq!(q.steps.len(), 4);
        assert!((q.min_step() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(StepPlan::new(1.0, &[0.5, 0.2], &[], 0.1).is_err());
        assert!(StepPlan::new(1.0, &[], &[1.0], 0.1).is_err());
        assert!(StepPlan::new(1.0, &[2.0], &[], 0.1).is_err());
        assert!(StepPlan::new(0.0, &[], &[], 0.1).is_err());
    }
}
