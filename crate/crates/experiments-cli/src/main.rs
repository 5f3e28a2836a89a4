//! nvsim: run one experiment, write CSV + JSON sidecars.
//!
//! Exit codes: 0 ok, 2 invalid input, 3 oscillator truncation not converged,
//! 1 any other failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use nvsim_experiments::{execute, ExperimentConfig, ExperimentError, ExperimentKind, Profile};

#[derive(Debug, Parser)]
#[command(name = "nvsim", version, about = "NV-center array + mechanical oscillator experiments")]
struct Args {
    /// Experiment to run (same as --experiment).
    #[arg(value_enum)]
    kind: Option<ExperimentKind>,
    #[arg(long, value_enum)]
    experiment: Option<ExperimentKind>,
    /// JSON config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    realizations: Option<usize>,
    /// Pulse counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    pulses: Option<Vec<usize>>,
    /// Oscillator Fock-space dimension.
    #[arg(long)]
    n_max: Option<usize>,
    /// Mechanical quality factors, comma separated.
    #[arg(long, value_delimiter = ',')]
    q_factor: Option<Vec<f64>>,
    /// Electron T2* in seconds, comma separated.
    #[arg(long, value_delimiter = ',')]
    t2e: Option<Vec<f64>>,
    /// Nuclear T2* in seconds, comma separated.
    #[arg(long, value_delimiter = ',')]
    t2n: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    profile: Option<Profile>,
}

fn run(args: Args) -> Result<(), ExperimentError> {
    if let (Some(a), Some(b)) = (args.kind, args.experiment) {
        if a != b {
            return Err(ExperimentError::Validation(format!("conflicting experiments {} and {}", a.name(), b.name())));
        }
    }
    let file = match &args.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| ExperimentError::Validation(format!("{}: {e}", p.display())))?;
            ExperimentConfig::from_json(&text)?
        }
        None => ExperimentConfig::default(),
    };
    let flags = ExperimentConfig {
        experiment: args.kind.or(args.experiment),
        out: args.out,
        seed: args.seed,
        realizations: args.realizations,
        pulses: args.pulses,
        n_max: args.n_max,
        q_factor: args.q_factor,
        t2e: args.t2e,
        t2n: args.t2n,
        profile: args.profile,
        ..Default::default()
    };
    let cfg = file.merge(flags).resolve()?;
    let out = execute(&cfg)?;
    for s in &out.series {
        let (m, e) = s.headline();
        println!("{:<40} final {m:.5} ± {e:.5}", s.label);
    }
    if out.series.is_empty() {
        println!("{}", serde_json::to_string_pretty(&out.extra).unwrap_or_default());
    }
    eprintln!("wrote {}", cfg.out.display());
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
