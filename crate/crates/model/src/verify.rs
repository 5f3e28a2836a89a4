//! Operator-level comparisons between the exact Hamiltonian and its
//! transformed approximations.

use ndarray::Array2;
use nvsim_linalg::{dagger, project_coefficient, spectral_norm, Operator, C64};

use crate::pauli::{annihilation, sigma_x, sigma_z};
use crate::{
    build_exact_hamiltonian, build_polaron_hamiltonian, build_sw_hamiltonian, coupling_constants,
    displacement_diagonal, polaron_unitary, schrieffer_wolff_unitary, HilbertLayout, Result, SystemParams,
};

/// Residuals of the polaron and Schrieffer–Wolff steps.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TransformReport {
    /// ‖𝒮H_𝒫𝒮† − H_𝒮‖₂ / ‖H_𝒮‖₂.
    pub sw_residual: f64,
    /// ‖𝒮H_𝒫𝒮† − H_𝒮‖₂ / (β³‖H_𝒫‖₂).
    pub sw_constant: f64,
    /// ‖𝒮𝒫H𝒫†𝒮† − H_𝒮‖₂ / ‖H_𝒮‖₂ on the whole truncated space.
    pub chain_residual_full: f64,
    /// Same, compressed onto the oscillator ground state.
    pub chain_residual_ground: f64,
    /// max_i |coefficient of (a+a†)σ_z^{(i)} in 𝒫H𝒫†| / ‖H‖₂, Fock levels below n_max/2.
    pub coupling_residual: f64,
    /// Same projection over all Fock levels (includes truncation-ceiling artifacts).
    pub coupling_residual_full: f64,
    /// Drive matrix elements ⟨↑,n|𝒫(Ω/2)σ_x𝒫†|↓,n⟩ / (Ω/2) per Fock level n < n_max/2.
    pub drive_levels: Vec<f64>,
    /// The same elements predicted by e^{-2α²}L_n(4α²).
    pub drive_levels_predicted: Vec<f64>,
    /// Coefficient of −σ_xσ_xτ_zτ_z (spins 0,1) after both transforms, ground-state compressed.
    pub jn_extracted: f64,
    pub jn_formula: f64,
    /// Coefficient of −σ_zσ_z (spins 0,1) after both transforms, ground-state compressed.
    pub je_extracted: f64,
    pub je_formula: f64,
}

fn compress(op: &Operator, idx: &[usize]) -> Operator {
    Array2::from_shape_fn((idx.len(), idx.len()), |(i, j)| op[[idx[i], idx[j]]])
}

fn relative(a: &Operator, b: &Operator) -> Result<f64> {
    Ok(spectral_norm(&(a - b))? / spectral_norm(b)?)
}

/// Computes every residual for `p` on layout `l` (N ≥ 2 for the J extractions).
pub fn transform_report(p: &SystemParams, l: &HilbertLayout) -> Result<TransformReport> {
    let h = build_exact_hamiltonian(p, l)?;
    let hp = build_polaron_hamiltonian(p, l)?;
    let hs = build_sw_hamiltonian(p, l)?;
    let pu = polaron_unitary(p, l)?;
    let su = schrieffer_wolff_unitary(p, l)?;
    let php = pu.dot(&h).dot(&dagger(&pu));
    let shps = su.dot(&hp).dot(&dagger(&su));
    let chain = su.dot(&php).dot(&dagger(&su));

    let sw_abs = spectral_norm(&(&shps - &hs))?;
    let beta = p.max_beta();
    let sw_constant = if beta > 0.0 { sw_abs / (beta.powi(3) * spectral_norm(&hp)?) } else { 0.0 };

    let f = l.fock_dim();
    let ground: Vec<usize> = (0..l.dim()).filter(|k| k % f == 0).collect();
    let lower: Vec<usize> = (0..l.dim()).filter(|k| k % f < f / 2).collect();

    let a = annihilation(f);
    let x = &a + &a.t();
    let hnorm = spectral_norm(&h)?;
    let mut coupling_residual: f64 = 0.0;
    let mut coupling_residual_full: f64 = 0.0;
    for i in 0..p.n_centers {
        let b = l.product(&[(l.electron(i), &sigma_z()), (l.oscillator(), &x)])?;
        coupling_residual_full = coupling_residual_full.max(project_coefficient(&php, &b).norm() / hnorm);
        let c = project_coefficient(&compress(&php, &lower), &compress(&b, &lower)).norm();
        coupling_residual = coupling_residual.max(c / hnorm);
    }

    // ⟨↑,n| … |↓,n⟩ for electron 0, all other spins up
    let mut drive = Operator::zeros((l.dim(), l.dim()));
    for i in 0..p.n_centers {
        drive = drive + l.product(&[(l.electron(i), &sigma_x())])? * C64::new(p.rabi[i] / 2.0, 0.0);
    }
    let pdp = pu.dot(&drive).dot(&dagger(&pu));
    let n = p.n_centers;
    let zeros = vec![0usize; n];
    let mut flipped = zeros.clone();
    flipped[0] = 1;
    let mut drive_levels = Vec::new();
    let mut drive_levels_predicted = Vec::new();
    for k in 0..f / 2 {
        let el = pdp[[l.index(&zeros, &zeros, k), l.index(&flipped, &zeros, k)]];
        drive_levels.push(el.re / (p.rabi[0] / 2.0));
        drive_levels_predicted.push(displacement_diagonal(p.alpha(0), k));
    }

    let (mut jn_extracted, mut je_extracted, mut jn_formula, mut je_formula) = (0.0, 0.0, 0.0, 0.0);
    if n >= 2 {
        let j = coupling_constants(p)?;
        jn_formula = j.jn[[0, 1]];
        je_formula = j.je[[0, 1]];
        let cg = compress(&chain, &ground);
        let xxzz = l.product(&[
            (l.electron(0), &sigma_x()),
            (l.electron(1), &sigma_x()),
            (l.nucleus(0), &sigma_z()),
            (l.nucleus(1), &sigma_z()),
        ])?;
        let zz = l.product(&[(l.electron(0), &sigma_z()), (l.electron(1), &sigma_z())])?;
        jn_extracted = -project_coefficient(&cg, &compress(&xxzz, &ground)).re;
        je_extracted = -project_coefficient(&cg, &compress(&zz, &ground)).re;
    }

    Ok(TransformReport {
        sw_residual: sw_abs / spectral_norm(&hs)?,
        sw_constant,
        chain_residual_full: relative(&chain, &hs)?,
        chain_residual_ground: relative(&compress(&chain, &ground), &compress(&hs, &ground))?,
        coupling_residual,
        coupling_residual_full,
        drive_levels,
        drive_levels_predicted,
        jn_extracted,
        jn_formula,
        je_extracted,
        je_formula,
    })
}
