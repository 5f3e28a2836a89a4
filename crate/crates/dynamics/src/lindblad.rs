use ndarray::{ArrayView2, ArrayViewMut2};
use nvsim_linalg::{check_density, dagger, spectral_decompose, DensityMatrix, Operator, C64};
use serde::{Deserialize, Serialize};

use crate::dp45::{Dp45, Dp45Options};
use crate::plan::StepPlan;
use crate::result::{EvolutionMeta, EvolutionResult, SampleState};
use crate::{DynamicsError, Result};

/// Thermal damping of the oscillator: rate γ (rad/s) and bath occupation n̄.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LindbladSpec {
    pub gamma: f64,
    pub n_bar: f64,
}

impl LindbladSpec {
    pub fn new(gamma: f64, n_bar: f64) -> Result<Self> {
        let s = Self { gamma, n_bar };
        s.validate()?;
        Ok(s)
    }

    /// γ = ν/Q. An infinite Q gives γ = 0.
    pub fn from_quality(osc_freq: f64, q: f64, n_bar: f64) -> Result<Self> {
        if !(q > 0.0) {
            return Err(DynamicsError::InvalidArgument(format!("quality factor must be positive, got {q}")));
        }
        Self::new(osc_freq / q, n_bar)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) || !(self.n_bar >= 0.0 && self.n_bar.is_finite()) {
            return Err(DynamicsError::InvalidArgument(format!("need gamma >= 0 and n_bar >= 0, got {self:?}")));
        }
        Ok(())
    }

    /// Prefactors (γ/2)(n̄+1) and (γ/2)n̄ of the two dissipators.
    pub(crate) fn rates(&self) -> (f64, f64) {
        (0.5 * self.gamma * (self.n_bar + 1.0), 0.5 * self.gamma * self.n_bar)
    }
}

/// Cached pieces of the master-equation generator.
pub(crate) struct Generator {
    heff: Operator,
    heff_dag: Operator,
    a: Operator,
    ad: Operator,
    c1: f64,
    c2: f64,
}

impl Generator {
    pub(crate) fn new(h: &Operator, spec: &LindbladSpec, a: &Operator) -> Result<Self> {
        spec.validate()?;
        if h.dim() != a.dim() || h.nrows() != h.ncols() {
            return Err(DynamicsError::InvalidArgument("h and a must be square and of equal size".into()));
        }
        let (c1, c2) = spec.rates();
        let ad = dagger(a);
        let damp = ad.dot(a) * C64::new(c1, 0.0) + a.dot(&ad) * C64::new(c2, 0.0);
        let heff = h - &(damp * C64::new(0.0, 1.0));
        Ok(Self { heff_dag: dagger(&heff), heff, a: a.clone(), ad, c1, c2 })
    }

    /// out = −i(H_eff ρ − ρ H_eff†) + 2c₁ aρa† + 2c₂ a†ρa
    pub(crate) fn apply(&self, rho: ArrayView2<C64>, mut out: ArrayViewMut2<C64>) {
        let mi = C64::new(0.0, -1.0);
        let mut acc = (self.heff.dot(&rho) - rho.dot(&self.heff_dag)) * mi;
        if self.c1 != 0.0 {
            acc = acc + self.a.dot(&rho).dot(&self.ad) * C64::new(2.0 * self.c1, 0.0);
        }
        if self.c2 != 0.0 {
            acc = acc + self.ad.dot(&rho).dot(&self.a) * C64::new(2.0 * self.c2, 0.0);
        }
        out.assign(&acc);
    }
}

/// dρ/dt for the damped master equation.
pub fn lindblad_rhs(h: &Operator, spec: &LindbladSpec, a: &Operator, rho: &DensityMatrix) -> Result<DensityMatrix> {
    let g = Generator::new(h, spec, a)?;
    let mut out = DensityMatrix::zeros(rho.dim());
    g.apply(rho.view(), out.view_mut());
    Ok(out)
}

fn min_eigenvalue(rho: &DensityMatrix) -> Result<f64> {
    let herm = (rho + &dagger(rho)) * C64::new(0.5, 0.0);
    Ok(spectral_decompose(&herm)?.values.iter().copied().fold(f64::INFINITY, f64::min))
}

/// Integrates the master equation with adaptive Dormand–Prince steps,
/// landing exactly on each sample time. Checks trace and positivity at
/// every sample.
pub fn evolve_lindblad(
    h: &Operator,
    spec: &LindbladSpec,
    a: &Operator,
    rho0: &DensityMatrix,
    t_end: f64,
    samples: &[f64],
    opts: Dp45Options,
) -> Result<EvolutionResult> {
    check_density(rho0)?;
    if rho0.dim() != h.dim() {
        return Err(DynamicsError::InvalidArgument("rho0 does not match h".into()));
    }
    // only used to validate the sample list
    StepPlan::new(t_end, samples, &[], t_end)?;
    let gen = Generator::new(h, spec, a)?;
    let d = h.nrows();
    let mut y: Vec<C64> = rho0.iter().copied().collect();
    let tr0: f64 = rho0.diag().iter().map(|z| z.re).sum();
    let mut ode = Dp45::new(opts);
    let mut states = Vec::with_capacity(samples.len());
    let mut t = 0.0;
    for &ts in samples {
        ode.integrate(
            |_t, y, dy| {
                let rho = ArrayView2::from_shape((d, d), y).expect("shape");
                let out = ArrayViewMut2::from_shape((d, d), dy).expect("shape");
                gen.apply(rho, out);
            },
            &mut y,
            t,
            ts,
        )?;
        t = t.max(ts);
        let rho = DensityMatrix::from_shape_vec((d, d), y.clone()).expect("shape");
        let tr: f64 = rho.diag().iter().map(|z| z.re).sum();
        if (tr - tr0).abs() > 1e-7 {
            return Err(DynamicsError::TraceDrift { drift: (tr - tr0).abs() });
        }
        let lo = min_eigenvalue(&rho)?;
        if lo < -1e-6 {
            return Err(DynamicsError::Positivity { t: ts, min_eigenvalue: lo });
        }
        states.push(SampleState::Mixed(rho));
    }
    let st = ode.stats();
    let meta = EvolutionMeta {
        steps: st.accepted,
        rejected_steps: st.rejected,
        min_step: st.min_step,
        max_step: st.max_step,
        max_drift: EvolutionResult::drift(&states, tr0),
    };
    Ok(EvolutionResult { times: samples.to_vec(), states, meta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nvsim_linalg::max_abs;

    fn ladder(n: usize) -> Operator {
        Operator::from_shape_fn((n, n), |(i, j)| if j == i + 1 { C64::new((j as f64).sqrt(), 0.0) } else { C64::new(0.0, 0.0) })
    }

    #[test]
    fn spec_validation() {
        assert!(LindbladSpec::new(-1.0, 0.0).is_err());
        assert!(LindbladSpec::new(1.0, -0.1).is_err());
        assert_eq!(LindbladSpec::from_quality(10.0, f64::INFINITY, 1.0).unwrap().gamma, 0.0);
        assert!(LindbladSpec::from_quality(10.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn rhs_is_traceless_and_hermitian() {
        let a = ladder(5);
        let h = dagger(&a).dot(&a) * C64::new(2.0, 0.0);
        let rho = DensityMatrix::from_shape_fn((5, 5), |(i, j)| C64::new(1.0 / (1.0 + (i + j) as f64), 0.1 * (i as f64 - j as f64)));
        let d = lindblad_rhs(&h, &LindbladSpec::new(0.3, 2.0).unwrap(), &a, &rho).unwrap();
        let tr: C64 = d.diag().sum();
        assert!(tr.norm() < 1e-12);
        assert!(max_abs(&(&d - &dagger(&d))) < 1e-12);
    }

    #[test]
    fn vacuum_decay_without_bath() {
        // n̄ = 0: ⟨n⟩ from |1⟩ decays as e^{−γt}
        let a = ladder(3);
        let h = Operator::zeros((3, 3));
        let mut rho0 = DensityMatrix::zeros((3, 3));
        rho0[[1, 1]] = C64::new(1.0, 0.0);
        let spec = LindbladSpec::new(0.5, 0.0).unwrap();
        let r = evolve_lindblad(&h, &spec, &a, &rho0, 2.0, &[1.0, 2.0], Dp45Options::default()).unwrap();
        for (t, s) in r.times.iter().zip(&r.states) {
            let SampleState::Mixed(rho) = s else { unreachable!() };
            assert!((rho[[1, 1]].re - (-0.5 * t).exp()).abs() < 1e-7);
        }
    }
}
