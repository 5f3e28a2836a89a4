use ndarray::{Array1, ArrayView1};
use nvsim_linalg::{BlockSpectral, Operator, TensorLayout, C64};
use nvsim_noise::NoiseProcess;

use crate::plan::{sample_times, StepPlan};
use crate::pulses::{apply_pi_pulse, PulseSchedule};
use crate::result::{EvolutionMeta, EvolutionResult, SampleState};
use crate::unitary::UnitaryPropagator;
use crate::{DynamicsError, Result};

/// A diagonal noise operator; the field amplitude multiplies it.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseTerm {
    diag: Array1<f64>,
}

impl NoiseTerm {
    /// Rejects operators with off-diagonal or complex entries.
    pub fn from_operator(op: &Operator) -> Result<Self> {
        let scale = op.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
        for ((i, j), z) in op.indexed_iter() {
            if (i != j && z.norm() > 1e-12 * scale) || (i == j && z.im.abs() > 1e-12 * scale) {
                return Err(DynamicsError::InvalidArgument(format!("noise operator is not real diagonal at ({i}, {j})")));
            }
        }
        Ok(Self { diag: op.diag().mapv(|z| z.re) })
    }

    pub fn from_diagonal(diag: Array1<f64>) -> Self {
        Self { diag }
    }

    pub fn diagonal(&self) -> &Array1<f64> {
        &self.diag
    }
}

/// How a noise step is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoisyScheme {
    /// e^{−iH_n h/2} e^{−iH h} e^{−iH_n h/2} with the noise phases diagonal in the bare basis.
    #[default]
    Strang,
    /// Exact base evolution times a first-order Magnus step of the noise in the interaction picture.
    Interaction,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoisyOptions {
    pub scheme: NoisyScheme,
    /// Noise step; `None` picks min(τ/200, T/4000).
    pub dt: Option<f64>,
}

#[derive(Debug, Clone)]
enum Projected {
    /// The term is a multiple of the identity on the block.
    Scalar(f64),
    /// V†OV for the interaction scheme.
    Dense(Operator),
    /// Bare diagonal for the splitting scheme.
    Diagonal(Array1<f64>),
}

#[derive(Debug, Clone)]
struct LengthCache {
    /// e^{−iEh}
    phase: Array1<C64>,
    /// φ_kl = ∫₀ʰ e^{i(E_k−E_l)s} ds (interaction) or V e^{−iEh} V† (splitting).
    matrix: Operator,
}

#[derive(Debug, Clone)]
struct BlockCache {
    terms: Vec<Projected>,
    lengths: Vec<LengthCache>,
}

/// One trajectory of stochastic dephasing on top of a fixed Hamiltonian.
/// Everything that depends only on the step plan is cached, so one
/// instance serves a whole ensemble.
#[derive(Debug, Clone)]
pub struct NoisyPropagator {
    spectral: BlockSpectral,
    layout: TensorLayout,
    slots: Vec<usize>,
    pulses: PulseSchedule,
    plan: StepPlan,
    scheme: NoisyScheme,
    blocks: Vec<BlockCache>,
    n_terms: usize,
}

fn phi(w: f64, h: f64) -> C64 {
    let x = w * h;
    if x.abs() < 1e-4 {
        // series of (e^{ix} − 1)/(ix)
        C64::new(h * (1.0 - x * x / 6.0), h * (x / 2.0 - x * x * x / 24.0))
    } else {
        (C64::new(0.0, x).exp() - 1.0) / C64::new(0.0, w)
    }
}

/// v ← exp(−iM)v by Taylor series with scaling for large ‖M‖.
fn expm_apply(m: &Operator, v: &mut Array1<C64>) {
    let norm = m.rows().into_iter().map(|r| r.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
    if norm == 0.0 {
        return;
    }
    let s = norm.ceil().max(1.0) as usize;
    for _ in 0..s {
        let mut term = v.clone();
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for k in 1..=60 {
            term = m.dot(&term) * C64::new(0.0, -1.0 / (s * k) as f64);
            *v += &term;
            let tn = term.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if tn <= 1e-17 * vnorm {
                break;
            }
        }
    }
}

impl NoisyPropagator {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        h_base: &Operator,
        terms: &[NoiseTerm],
        layout: TensorLayout,
        nuclear_slots: Vec<usize>,
        pulses: &PulseSchedule,
        t_end: f64,
        samples: &[f64],
        scheme: NoisyScheme,
        dt: f64,
    ) -> Result<Self> {
        let dim = h_base.nrows();
        if layout.total_dim() != dim {
            return Err(DynamicsError::InvalidArgument("Hamiltonian does not match layout".into()));
        }
        if terms.iter().any(|t| t.diag.len() != dim) {
            return Err(DynamicsError::InvalidArgument("noise term does not match Hamiltonian".into()));
        }
        pulses.check_window(t_end)?;
        let slots = UnitaryPropagator::pulse_slots(&nuclear_slots, pulses)?;
        let plan = StepPlan::new(t_end, samples, &pulses.times, dt)?;
        let spectral = BlockSpectral::new(h_base)?;
        let blocks = spectral
            .blocks()
            .iter()
            .map(|b| {
                let e = &b.spectral.values;
                let v = &b.spectral.vectors;
                let projected = terms
                    .iter()
                    .map(|t| {
                        let local: Vec<f64> = b.indices.iter().map(|&i| t.diag[i]).collect();
                        let first = local[0];
                        if local.iter().all(|&x| x == first) {
                            Projected::Scalar(first)
                        } else if scheme == NoisyScheme::Interaction {
                            let ov = Operator::from_shape_fn(v.dim(), |(i, j)| v[[i, j]] * local[i]);
                            Projected::Dense(v.t().mapv(|z| z.conj()).dot(&ov))
                        } else {
                            Projected::Diagonal(Array1::from(local))
                        }
                    })
                    .collect();
                let lengths = plan
                    .lengths
                    .iter()
                    .map(|&h| {
                        let phase = e.mapv(|x| C64::from_polar(1.0, -x * h));
                        let matrix = match scheme {
                            NoisyScheme::Interaction => Operator::from_shape_fn((e.len(), e.len()), |(k, l)| phi(e[k] - e[l], h)),
                            NoisyScheme::Strang => {
                                let vp = Operator::from_shape_fn(v.dim(), |(i, j)| v[[i, j]] * phase[j]);
                                vp.dot(&v.t().mapv(|z| z.conj()))
                            }
                        };
                        LengthCache { phase, matrix }
                    })
                    .collect();
                BlockCache { terms: projected, lengths }
            })
            .collect();
        Ok(Self { spectral, layout, slots, pulses: pulses.clone(), plan, scheme, blocks, n_terms: terms.len() })
    }

    pub fn spectral(&self) -> &BlockSpectral {
        &self.spectral
    }

    pub fn plan(&self) -> &StepPlan {
        &self.plan
    }

    pub fn scheme(&self) -> NoisyScheme {
        self.scheme
    }

    fn split(&self, psi: ArrayView1<C64>) -> Vec<Array1<C64>> {
        match self.scheme {
            NoisyScheme::Interaction => self.spectral.to_eigen(psi),
            NoisyScheme::Strang => {
                self.spectral.blocks().iter().map(|b| b.indices.iter().map(|&i| psi[i]).collect()).collect()
            }
        }
    }

    fn join(&self, parts: &[Array1<C64>]) -> Array1<C64> {
        match self.scheme {
            NoisyScheme::Interaction => self.spectral.to_bare(parts),
            NoisyScheme::Strang => {
                let mut out = Array1::zeros(self.spectral.dim());
                for (b, p) in self.spectral.blocks().iter().zip(parts) {
                    for (&i, z) in b.indices.iter().zip(p) {
                        out[i] = *z;
                    }
                }
                out
            }
        }
    }

    fn step_block(&self, cache: &BlockCache, k: usize, h: f64, values: &[f64], c: &mut Array1<C64>) {
        let lc = &cache.lengths[k];
        let mut scalar = 0.0;
        match self.scheme {
            NoisyScheme::Interaction => {
                let mut m: Option<Operator> = None;
                for (t, &b) in cache.terms.iter().zip(values) {
                    match t {
                        Projected::Scalar(x) => scalar += b * x,
                        Projected::Dense(o) if b != 0.0 => match m.as_mut() {
                            Some(m) => m.scaled_add(C64::new(b, 0.0), o),
                            None => m = Some(o * C64::new(b, 0.0)),
                        },
                        _ => {}
                    }
                }
                if let Some(mut m) = m {
                    m.zip_mut_with(&lc.matrix, |x, p| *x *= p);
                    expm_apply(&m, c);
                }
                let g = C64::from_polar(1.0, -scalar * h);
                c.zip_mut_with(&lc.phase, |z, p| *z *= p * g);
            }
            NoisyScheme::Strang => {
                let mut diag: Option<Array1<f64>> = None;
                for (t, &b) in cache.terms.iter().zip(values) {
                    match t {
                        Projected::Scalar(x) => scalar += b * x,
                        Projected::Diagonal(d) if b != 0.0 => match diag.as_mut() {
                            Some(acc) => acc.scaled_add(b, d),
                            None => diag = Some(d * b),
                        },
                        _ => {}
                    }
                }
                let half = diag.map(|d| d.mapv(|x| C64::from_polar(1.0, -0.5 * x * h)));
                if let Some(hp) = &half {
                    c.zip_mut_with(hp, |z, p| *z *= p);
                }
                *c = lc.matrix.dot(&*c);
                let g = C64::from_polar(1.0, -scalar * h);
                match &half {
                    Some(hp) => c.zip_mut_with(hp, |z, p| *z *= p * g),
                    None => c.mapv_inplace(|z| z * g),
                }
            }
        }
    }

    /// Bare-basis states at every sample time. `noise[j]` drives term `j`;
    /// each amplitude is held for one step, then advanced by the OU rule.
    pub fn run(&self, psi0: ArrayView1<C64>, noise: &mut [NoiseProcess]) -> Result<Vec<Array1<C64>>> {
        if noise.len() != self.n_terms {
            return Err(DynamicsError::InvalidArgument(format!("expected {} noise processes, got {}", self.n_terms, noise.len())));
        }
        if psi0.len() != self.spectral.dim() {
            return Err(DynamicsError::InvalidArgument("state does not match Hamiltonian".into()));
        }
        let mut out = Vec::with_capacity(self.plan.n_samples());
        for _ in 0..self.plan.initial_samples {
            out.push(psi0.to_owned());
        }
        let mut parts = self.split(psi0);
        let mut values: Vec<f64> = noise.iter().map(|n| n.value()).collect();
        for step in &self.plan.steps {
            let h = self.plan.lengths[step.length];
            for (cache, c) in self.blocks.iter().zip(parts.iter_mut()) {
                self.step_block(cache, step.length, h, &values, c);
            }
            for (v, n) in values.iter_mut().zip(noise.iter_mut()) {
                *v = n.step(h);
            }
            if step.pulse.is_some() {
                let mut psi = self.join(&parts);
                apply_pi_pulse(&mut psi, &self.layout, &self.slots, self.pulses.axis)?;
                parts = self.split(psi.view());
            }
            if step.samples.1 > step.samples.0 {
                let psi = self.join(&parts);
                for _ in step.samples.0..step.samples.1 {
                    out.push(psi.clone());
                }
            }
        }
        Ok(out)
    }
}

/// One stochastic trajectory sampled at `samples` equally spaced times.
#[allow(clippy::too_many_arguments)]
pub fn evolve_noisy(
    h_base: &Operator,
    noise: Vec<(Operator, NoiseProcess)>,
    layout: TensorLayout,
    nuclear_slots: Vec<usize>,
    pulses: &PulseSchedule,
    psi0: &Array1<C64>,
    t_end: f64,
    samples: usize,
    opts: NoisyOptions,
) -> Result<EvolutionResult> {
    let tau = noise.iter().map(|(_, n)| n.params().tau).fold(f64::INFINITY, f64::min);
    let dt = opts.dt.unwrap_or((tau / 200.0).min(t_end / 4000.0));
    let terms = noise.iter().map(|(op, _)| NoiseTerm::from_operator(op)).collect::<Result<Vec<_>>>()?;
    let mut procs: Vec<NoiseProcess> = noise.into_iter().map(|(_, n)| n).collect();
    let times = sample_times(t_end, samples);
    let prop = NoisyPropagator::new(h_base, &terms, layout, nuclear_slots, pulses, t_end, &times, opts.scheme, dt)?;
    let norm0 = psi0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let states: Vec<SampleState> = prop.run(psi0.view(), &mut procs)?.into_iter().map(SampleState::Pure).collect();
    let drift = EvolutionResult::drift(&states, norm0);
    if drift > nvsim_linalg::policy().norm_tol {
        return Err(DynamicsError::NormDrift { drift });
    }
    let meta = EvolutionMeta {
        steps: prop.plan().steps.len(),
        rejected_steps: 0,
        min_step: prop.plan().min_step(),
        max_step: prop.plan().max_step(),
        max_drift: drift,
    };
    Ok(EvolutionResult { times, states, meta })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_series_matches_closed_form() {
        for &(w, h) in &[(1e3, 1e-8), (1e6, 1e-6), (-3.0, 0.5)] {
            let exact = (C64::new(0.0, w * h).exp() - 1.0) / C64::new(0.0, w);
            assert!((phi(w, h) - exact).norm() < 1e-10 * h);
        }
        assert_eq!(phi(0.0, 2.0), C64::new(2.0, 0.0));
    }

    #[test]
    fn taylor_apply_matches_expm() {
        let m = Operator::from_shape_fn((4, 4), |(i, j)| C64::new((i + j) as f64 * 0.7, if i == j { 0.0 } else { 0.3 * (i as f64 - j as f64) }));
        let mut v = Array1::from_shape_fn(4, |i| C64::new(1.0, i as f64));
        let want = nvsim_linalg::expm(&m, C64::new(0.0, -1.0)).unwrap().dot(&v);
        expm_apply(&m, &mut v);
        assert!((v - want).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-12);
    }

    #[test]
    fn rejects_offdiagonal_noise() {
        let mut op = Operator::zeros((2, 2));
        op[[0, 1]] = C64::new(1.0, 0.0);
        assert!(NoiseTerm::from_operator(&op).is_err());
        op[[0, 1]] = C64::new(0.0, 0.0);
        op[[0, 0]] = C64::new(1.0, 0.0);
        op[[1, 1]] = C64::new(-1.0, 0.0);
        assert_eq!(NoiseTerm::from_operator(&op).unwrap().diagonal().to_vec(), vec![1.0, -1.0]);
    }
}
