use nvsim_linalg::exec::{map_indexed, mean_stderr, Execution};
use serde::Serialize;

use crate::{DynamicsError, Result};

/// Per-sample mean and standard error over realizations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleStats {
    pub realizations: usize,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
}

/// Runs `runner(seed, realization)` for every realization and reduces the
/// returned series in realization order, so the result does not depend on
/// the execution mode.
pub fn ensemble_average<F>(n_realizations: usize, seed: u64, exec: Execution, runner: F) -> Result<EnsembleStats>
where
    F: Fn(u64, u64) -> Result<Vec<f64>> + Sync + Send,
{
    if n_realizations == 0 {
        return Err(DynamicsError::InvalidArgument("need at least one realization".into()));
    }
    let runs = map_indexed(exec, n_realizations, |r| runner(seed, r as u64));
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let len = runs[0].len();
    if runs.iter().any(|r| r.len() != len) {
        return Err(DynamicsError::InvalidArgument("realizations returned series of different lengths".into()));
    }
    let (mean, stderr) = (0..len)
        .map(|k| {
            let xs: Vec<f64> = runs.iter().map(|r| r[k]).collect();
            mean_stderr(&xs)
        })
        .unzip();
    Ok(EnsembleStats { realizations: n_realizations, mean, stderr })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_realization_is_the_trajectory() {
        let s = ensemble_average(1, 7, Execution::Sequential, |seed, r| Ok(vec![seed as f64, r as f64 + 0.5])).unwrap();
        assert_eq!(s.mean, vec![7.0, 0.5]);
        assert_eq!(s.stderr, vec![0.0, 0.0]);
    }

    #[test]
    fn errors_propagate() {
        let r = ensemble_average(3, 0, Execution::Sequential, |_, r| {
            if r == 2 {
                Err(DynamicsError::InvalidArgument("boom".into()))
            } else {
                Ok(vec![1.0])
            }
        });
        assert!(r.is_err());
        assert!(ensemble_average(0, 0, Execution::Sequential, |_, _| Ok(vec![])).is_err());
    }
}
