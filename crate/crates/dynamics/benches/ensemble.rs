use criterion::{criterion_group, criterion_main, Criterion};
use ndarray::Array1;
use nvsim_dynamics::{cpmg_schedule, ensemble_average, sample_times, NoiseTerm, NoisyPropagator, NoisyScheme};
use nvsim_linalg::exec::Execution;
use nvsim_linalg::C64;
use nvsim_model::{build_exact_hamiltonian, HilbertLayout, SystemParams};
use nvsim_noise::{calibrate_strength, NoiseParams, NoiseProcess, StreamKey};

fn bench(c: &mut Criterion) {
    let p = SystemParams::baseline(2, 4).unwrap();
    let l = HilbertLayout::for_params(&p).unwrap();
    let h = build_exact_hamiltonian(&p, &l).unwrap();
    let t_end = 1e-5;
    let pulses = cpmg_schedule(1, t_end).unwrap().on_all(2);
    let terms: Vec<NoiseTerm> = (0..2)
        .map(|i| NoiseTerm::from_diagonal(l.diagonal(&[(l.electron(i), &[0.5, -0.5])])))
        .collect();
    let prop = NoisyPropagator::new(&h, &terms, l.tensor().clone(), l.nuclei(), &pulses, t_end, &sample_times(t_end, 5), NoisyScheme::Interaction, t_end / 100.0).unwrap();
    let psi0 = Array1::from_elem(l.dim(), C64::new(1.0 / (l.dim() as f64).sqrt(), 0.0));
    let noise = NoiseParams::new(0.02, calibrate_strength(20e-6).unwrap()).unwrap();
    let run = |exec| {
        ensemble_average(16, 1, exec, |seed, r| {
            let mut procs: Vec<NoiseProcess> = (0..2).map(|s| NoiseProcess::from_key(noise, StreamKey { seed, realization: r, spin: s })).collect();
            let states = prop.run(psi0.view(), &mut procs)?;
            Ok(states.iter().map(|s| s[0].norm_sqr()).collect())
        })
        .unwrap()
    };
    let mut g = c.benchmark_group("ensemble_16");
    g.sample_size(10);
    g.bench_function("sequential", |b| b.iter(|| run(Execution::Sequential)));
    g.bench_function("parallel", |b| b.iter(|| run(Execution::Parallel)));
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
