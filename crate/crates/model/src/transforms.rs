use ndarray::Array2;
use nvsim_linalg::{dagger, expm_hermitian, project_coefficient, Operator, C64};

use crate::pauli::{annihilation, sigma_x, sigma_y};
#[cfg(test)]
use crate::pauli::sigma_z;
use crate::{HilbertLayout, ModelError, Result, SystemParams};

/// Truncated displacement D(β) = exp(β(a† − a)) on `n` Fock levels.
pub fn displacement_operator(beta: f64, n: usize) -> Result<Operator> {
    let a = annihilation(n);
    let k = (dagger(&a) - &a) * C64::new(0.0, beta);
    Ok(expm_hermitian(&k, C64::new(0.0, -1.0))?)
}

/// e^{-2α²} L_n(4α²): the diagonal matrix element ⟨n|D(2α)|n⟩.
pub fn displacement_diagonal(alpha: f64, n: usize) -> f64 {
    let x = 4.0 * alpha * alpha;
    let (mut prev, mut cur) = (1.0, 1.0 - x);
    if n == 0 {
        cur = 1.0;
    }
    for k in 1..n {
        let next = ((2.0 * k as f64 + 1.0 - x) * cur - k as f64 * prev) / (k as f64 + 1.0);
        prev = cur;
        cur = next;
    }
    (-2.0 * alpha * alpha).exp() * cur
}

fn electron_z(config: usize, i: usize, n: usize) -> f64 {
    if (config >> (n - 1 - i)) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// 𝒫 = Π_i D(α_i σ_z^{(i)}): block diagonal over electron configurations.
pub fn polaron_unitary(p: &SystemParams, l: &HilbertLayout) -> Result<Operator> {
    l.check(p)?;
    let n = p.n_centers;
    let f = l.fock_dim();
    let nuc = 1usize << n;
    let mut out = Array2::zeros((l.dim(), l.dim()));
    for e in 0..1usize << n {
        let shift: f64 = (0..n).map(|i| p.alpha(i) * electron_z(e, i, n)).sum();
        let d = displacement_operator(shift, f)?;
        for s in 0..nuc {
            let base = (e * nuc + s) * f;
            out.slice_mut(ndarray::s![base..base + f, base..base + f]).assign(&d);
        }
    }
    Ok(out)
}

/// Left-multiplies by σ_y^{(e_i)} τ_z^{(n_i)}, a signed permutation.
fn apply_sw_generator(l: &HilbertLayout, i: usize, u: &Operator) -> Operator {
    let n = l.n_centers();
    let f = l.fock_dim();
    let e_bit = 2 * n - 1 - i;
    let n_bit = n - 1 - i;
    let mut out = Array2::zeros(u.dim());
    for r in 0..l.dim() {
        let spins = r / f;
        let b = (spins >> e_bit) & 1;
        let sy = if b == 0 { C64::new(0.0, -1.0) } else { C64::new(0.0, 1.0) };
        let tz = if (spins >> n_bit) & 1 == 0 { 1.0 } else { -1.0 };
        let src = ((spins ^ (1 << e_bit)) * f) + r % f;
        let row = u.row(src).mapv(|z| z * sy * tz);
        out.row_mut(r).assign(&row);
    }
    out
}

/// 𝒮 = Π_i exp(−iβ_i σ_y^{(i)} τ_z^{(i)}) = Π_i (cos β_i − i sin β_i σ_yτ_z).
pub fn schrieffer_wolff_unitary(p: &SystemParams, l: &HilbertLayout) -> Result<Operator> {
    l.check(p)?;
    let mut u = Operator::eye(l.dim());
    for i in 0..p.n_centers {
        let b = p.beta(i);
        let g = apply_sw_generator(l, i, &u);
        u = u * C64::new(b.cos(), 0.0) + g * C64::new(0.0, -b.sin());
    }
    Ok(u)
}

/// Exact conjugation of the nuclear drive Σ (Ω_n/2) τ_x by 𝒮, with its
/// projections onto τ_x^{(i)} and σ_y^{(i)}τ_y^{(i)}.
#[derive(Debug, Clone)]
pub struct NuclearDriveTransform {
    pub operator: Operator,
    pub tau_x: Vec<f64>,
    pub sigma_y_tau_y: Vec<f64>,
}

pub fn sw_transform_nuclear_drive(p: &SystemParams, l: &HilbertLayout) -> Result<NuclearDriveTransform> {
    l.check(p)?;
    if p.nuclear_rabi.iter().all(|&x| x == 0.0) {
        return Err(ModelError::InvalidParams("nuclear_rabi is not set".into()));
    }
    let tx = sigma_x();
    let mut drive = Operator::zeros((l.dim(), l.dim()));
    for i in 0..p.n_centers {
        drive = drive + l.product(&[(l.nucleus(i), &tx)])? * C64::new(p.nuclear_rabi(i) / 2.0, 0.0);
    }
    let s = schrieffer_wolff_unitary(p, l)?;
    let operator = s.dot(&drive).dot(&dagger(&s));
    let mut tau_x = Vec::new();
    let mut sigma_y_tau_y = Vec::new();
    for i in 0..p.n_centers {
        let bx = l.product(&[(l.nucleus(i), &tx)])?;
        let byy = l.product(&[(l.electron(i), &sigma_y()), (l.nucleus(i), &sigma_y())])?;
        tau_x.push(project_coefficient(&operator, &bx).re);
        sigma_y_tau_y.push(project_coefficient(&operator, &byy).re);
    }
    Ok(NuclearDriveTransform { operator, tau_x, sigma_y_tau_y })
}
