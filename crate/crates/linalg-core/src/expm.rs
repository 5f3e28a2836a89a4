use crate::eigen::{from_nalgebra, spectral_decompose, to_nalgebra};
use crate::ops::{check_finite, hermiticity_defect, identity, max_abs};
use crate::{policy, LinalgError, Operator, Result, C64};

/// `exp(scale · h)`. Hermitian inputs go through the spectral path,
/// everything else through scaling-and-squaring Padé.
pub fn expm(h: &Operator, scale: C64) -> Result<Operator> {
    check_finite(h.iter())?;
    let mag = max_abs(h);
    if mag == 0.0 {
        return Ok(identity(h.nrows()));
    }
    if hermiticity_defect(h) <= policy().hermitian_tol * mag.max(1.0) * 1e-3 {
        expm_hermitian(h, scale)
    } else {
        expm_pade(&h.mapv(|z| z * scale))
    }
}

/// `exp(scale · h)` for Hermitian `h` via its eigen-decomposition.
pub fn expm_hermitian(h: &Operator, scale: C64) -> Result<Operator> {
    let s = spectral_decompose(h)?;
    Ok(s.apply_fn(|l| (scale * l).exp()))
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

fn one_norm(a: &Operator) -> f64 {
    (0..a.ncols()).map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Degree-13 Padé approximant with scaling and squaring, for general matrices.
pub fn expm_pade(a: &Operator) -> Result<Operator> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(LinalgError::NotSquare { rows: n, cols: a.ncols() });
    }
    check_finite(a.iter())?;
    let norm = one_norm(a);
    let s = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = a.mapv(|z| z / 2f64.powi(s));
    let b = |k: usize| C64::new(PADE13[k], 0.0);
    let id = identity(n);
    let a2 = a.dot(&a);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);
    let inner_u = &a6 * b(13) + &a4 * b(11) + &a2 * b(9);
    let u = a.dot(&(a6.dot(&inner_u) + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &id * b(1)));
    let inner_v = &a6 * b(12) + &a4 * b(10) + &a2 * b(8);
    let v = a6.dot(&inner_v) + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &id * b(0);
    let lhs = to_nalgebra(&(&v - &u));
    let rhs = to_nalgebra(&(&v + &u));
    let x = lhs
        .lu()
        .solve(&rhs)
        .ok_or(LinalgError::NonConvergence { what: "Pade solve", residual: f64::INFINITY })?;
    let mut r = from_nalgebra(&x);
    for _ in 0..s {
        r = r.dot(&r);
    }
    if check_finite(r.iter()).is_err() {
        return Err(LinalgError::NonConvergence { what: "expm squaring", residual: f64::INFINITY });
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::unitarity_defect;
    use ndarray::array;
    use std::f64::consts::PI;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn lcg(seed: u64) -> impl FnMut() -> f64 {
        let mut state = seed;
        move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        }
    }

    /// Taylor series with compensated summation after scaling by 2^-s.
    fn taylor_oracle(a: &Operator) -> Operator {
        let n = a.nrows();
        let s = 6;
        let a = a.mapv(|z| z / 2f64.powi(s));
        let mut sum = identity(n);
        let mut comp = Operator::zeros((n, n));
        let mut term = identity(n);
        for k in 1..=60 {
            term = term.dot(&a).mapv(|z| z / k as f64);
            // Kahan step, entrywise
            let y = &term - &comp;
            let t = &sum + &y;
            comp = (&t - &sum) - &y;
            sum = t;
        }
        for _ in 0..s {
            sum = sum.dot(&sum);
        }
        sum
    }

    #[test]
    fn zero_gives_identity() {
        let z = Operator::zeros((3, 3));
        assert_eq!(expm(&z, C64::new(0.3, -2.0)).unwrap(), identity(3));
    }

    #[test]
    fn pauli_rotation() {
        let sx = array![[c(0.0), c(1.0)], [c(1.0), c(0.0)]];
        let u = expm(&sx, C64::new(0.0, -PI / 2.0)).unwrap();
        let want = sx.mapv(|z| z * C64::new(0.0, -1.0));
        assert!(max_abs(&(&u - &want)) < 1e-14);
        let p = expm_pade(&sx.mapv(|z| z * C64::new(0.0, -PI / 2.0))).unwrap();
        assert!(max_abs(&(&p - &want)) < 1e-13);
    }

    #[test]
    fn random_hermitian_matches_taylor() {
        let mut next = lcg(7);
        let n = 8;
        let mut h = Operator::zeros((n, n));
        for i in 0..n {
            h[[i, i]] = c(next());
            for j in i + 1..n {
                let z = C64::new(next(), next());
                h[[i, j]] = z;
                h[[j, i]] = z.conj();
            }
        }
        let scale = C64::new(0.0, -1.7);
        let u = expm(&h, scale).unwrap();
        let oracle = taylor_oracle(&h.mapv(|z| z * scale));
        assert!(max_abs(&(&u - &oracle)) < 1e-10);
        assert!(unitarity_defect(&u) < 1e-12);
    }

    #[test]
    fn general_matrix_pade_matches_taylor() {
        let mut next = lcg(99);
        let a = Operator::from_shape_fn((6, 6), |_| C64::new(3.0 * next(), 3.0 * next()));
        let p = expm(&a, c(1.0)).unwrap();
        let oracle = taylor_oracle(&a);
        let rel = max_abs(&(&p - &oracle)) / max_abs(&oracle);
        assert!(rel < 1e-11, "rel {rel}");
    }
}
