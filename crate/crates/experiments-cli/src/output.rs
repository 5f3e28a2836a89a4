//! Atomic CSV and JSON sidecar writers.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::Resolved;
use crate::error::{ExperimentError, Result};
use crate::{RunOutput, Series};

pub const CSV_HEADER: &str = "time_s,mean_fidelity,stderr";

#[derive(Debug, Serialize)]
pub struct Sidecar<'a> {
    pub experiment: &'static str,
    pub label: Option<&'a str>,
    pub version: &'static str,
    pub seed: u64,
    pub wall_clock_s: f64,
    pub config: &'a Resolved,
    pub series: Option<&'a Series>,
    pub extra: &'a serde_json::Value,
}

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| ExperimentError::Io(e.error))?;
    Ok(())
}

/// Writes `time_s,mean_fidelity,stderr` rows with LF line endings.
pub fn write_csv(path: &Path, s: &Series) -> Result<()> {
    let mut text = String::with_capacity(64 * (s.times.len() + 1));
    text.push_str(CSV_HEADER);
    text.push('\n');
    for ((t, m), e) in s.times.iter().zip(&s.mean).zip(&s.stderr) {
        text.push_str(&format!("{t},{m},{e}\n"));
    }
    atomic_write(path, text.as_bytes())
}

fn json(value: &impl Serialize) -> Result<Vec<u8>> {
    let mut v = serde_json::to_vec_pretty(value).map_err(|e| ExperimentError::Numerical(e.to_string()))?;
    v.push(b'\n');
    Ok(v)
}

/// One CSV and one sidecar per series, named `<experiment>_<label>`; runs
/// without curves get a single `<experiment>.json`. Returns the paths written.
pub fn write_outputs<'a>(cfg: &'a Resolved, out: &'a RunOutput, wall_clock_s: f64) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(&cfg.out)?;
    let name = cfg.experiment.name();
    let sidecar = |series: Option<&'a Series>| Sidecar {
        experiment: name,
        label: series.map(|s| s.label.as_str()),
        version: env!("CARGO_PKG_VERSION"),
        seed: cfg.seed,
        wall_clock_s,
        config: cfg,
        series,
        extra: &out.extra,
    };
    let mut written = Vec::new();
    if out.series.is_empty() {
        let p = cfg.out.join(format!("{name}.json"));
        atomic_write(&p, &json(&sidecar(None))?)?;
        written.push(p);
    }
    for s in &out.series {
        let stem = format!("{name}_{}", s.label);
        let csv = cfg.out.join(format!("{stem}.csv"));
        write_csv(&csv, s)?;
        let side = cfg.out.join(format!("{stem}.json"));
        atomic_write(&side, &json(&sidecar(Some(s)))?)?;
        written.extend([csv, side]);
    }
    Ok(written)
}
