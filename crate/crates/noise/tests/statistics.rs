use nvsim_linalg::exec::Execution;
use nvsim_noise::*;

const TAU: f64 = 20e-3;

fn stream(seed: u64, r: u64, s: u32) -> StreamKey {
    StreamKey { seed, realization: r, spin: s }
}

#[test]
fn stationarity_of_variance() {
    let p = NoiseParams::new(TAU, 5.0).unwrap();
    let n = 3000;
    let mut procs: Vec<NoiseProcess> = (0..n).map(|r| NoiseProcess::from_key(p, stream(3, r, 0))).collect();
    for step in 0..8 {
        let var = procs.iter().map(|q| q.value().powi(2)).sum::<f64>() / n as f64;
        assert!((var / 25.0 - 1.0).abs() < 0.1, "step {step}: {var}");
        for q in procs.iter_mut() {
            q.step(TAU / 3.0);
        }
    }
}

#[test]
fn streams_uncorrelated() {
    let p = NoiseParams::new(TAU, 1.0).unwrap();
    let n = 3000;
    let a: Vec<f64> = (0..n).map(|r| NoiseProcess::from_key(p, stream(11, r, 0)).value()).collect();
    let b: Vec<f64> = (0..n).map(|r| NoiseProcess::from_key(p, stream(11, r, 1)).value()).collect();
    let c: Vec<f64> = (0..n).map(|r| NoiseProcess::from_key(p, stream(11, r + 1, 0)).value()).collect();
    let corr = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(u, v)| u * v).sum::<f64>() / n as f64;
    let bound = 3.0 / (n as f64).sqrt();
    assert!(corr(&a, &b).abs() < bound);
    assert!(corr(&a, &c).abs() < bound);
}

#[test]
fn autocorrelation_recovers_tau() {
    let p = NoiseParams::new(TAU, 2.0).unwrap();
    let curve = autocorrelation(p, 2.0 * TAU, 41, 3000, 2024, Execution::default());
    for (t, m) in curve.times.iter().zip(&curve.mean) {
        let want = (-t / TAU).exp();
        assert!((m - want).abs() < 0.1 * want.max(0.3), "t={t}: {m} vs {want}");
    }
    let (tau, _) = fit_decay_constant(&curve.times, &curve.mean, DecayFit::Exponential, 1e-4, 1.0);
    assert!((tau / TAU - 1.0).abs() < 0.1, "tau {tau}");
}

#[test]
fn fid_recovers_t2star() {
    // 𝓑τ = √2·1000 so T₂* = τ/1000
    let t2 = TAU / 1000.0;
    let b = calibrate_strength(t2).unwrap();
    let p = NoiseParams::new(TAU, b).unwrap();
    let curve = free_induction_decay(p, 1.5 * t2, 31, 3000, 77, 4, Execution::default());
    for (t, m) in curve.times.iter().zip(&curve.mean) {
        assert!((m - (-(t / t2).powi(2)).exp()).abs() < 0.03);
    }
    let (fit, _) = fit_decay_constant(&curve.times, &curve.mean, DecayFit::Gaussian, 1e-7, 1e-2);
    assert!((fit / t2 - 1.0).abs() < 0.05, "T2 fit {fit}");
}

#[test]
fn fid_short_time_expansion() {
    // t ≪ τ: ⟨σ_x⟩ ≈ 1 − 𝓑²t²/2
    let b = 1e3;
    let p = NoiseParams::new(TAU, b).unwrap();
    let curve = free_induction_decay(p, 1e-4, 11, 3000, 5, 2, Execution::default());
    for (t, m) in curve.times.iter().zip(&curve.mean) {
        let x = b * t;
        let series = 1.0 - x * x / 2.0;
        // residual is fourth order plus sampling noise on the x² term
        assert!((m - series).abs() < x.powi(4) / 8.0 + 4.0 * x * x / 3000f64.sqrt() + 1e-12, "t={t}");
    }
}

#[test]
fn electron_calibration_fid() {
    let t2 = 20e-6;
    let p = NoiseParams::new(TAU, calibrate_strength(t2).unwrap()).unwrap();
    let curve = free_induction_decay(p, 2.0 * t2, 41, 3000, 8, 2, Execution::default());
    let (fit, _) = fit_decay_constant(&curve.times, &curve.mean, DecayFit::Gaussian, 1e-7, 1e-2);
    assert!((fit / t2 - 1.0).abs() < 0.05);
}

#[test]
fn update_preserves_variance_for_any_step() {
    let p = NoiseParams::new(TAU, 1.0).unwrap();
    for dt in [1e-5, 1e-3, 5e-2] {
        let xs: Vec<f64> = (0..3000)
            .map(|r| {
                let mut q = NoiseProcess::from_key(p, stream(99, r, 0));
                q.step(dt)
            })
            .collect();
        let var = xs.iter().map(|x| x * x).sum::<f64>() / 3000.0;
        assert!((var - 1.0).abs() < 0.1, "dt {dt}: {var}");
    }
}
