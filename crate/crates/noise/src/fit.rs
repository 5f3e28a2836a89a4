/// Shape of a one-parameter decay `f(t) = exp(−(t/c)^k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayFit {
    /// exp(−t/c)
    Exponential,
    /// exp(−t²/c²)
    Gaussian,
}

impl DecayFit {
    fn eval(self, t: f64, c: f64) -> f64 {
        match self {
            DecayFit::Exponential => (-t / c).exp(),
            DecayFit::Gaussian => (-(t / c).powi(2)).exp(),
        }
    }
}

/// Least-squares decay constant in `[lo, hi]` by golden-section search on
/// log c. Returns (constant, residual sum of squares).
pub fn fit_decay_constant(times: &[f64], values: &[f64], shape: DecayFit, lo: f64, hi: f64) -> (f64, f64) {
    let rss = |lc: f64| -> f64 {
        let c = lc.exp();
        times.iter().zip(values).map(|(&t, &v)| (v - shape.eval(t, c)).powi(2)).sum()
    };
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (rss(x1), rss(x2));
    for _ in 0..200 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = rss(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = rss(x2);
        }
        if (b - a).abs() < 1e-12 {
            break;
        }
    }
    let best = 0.5 * (a + b);
    (best.exp(), rss(best))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_constants() {
        let t: Vec<f64> = (0..50).map(|k| k as f64 * 0.1).collect();
        let e: Vec<f64> = t.iter().map(|&x| (-x / 1.7).exp()).collect();
        let (c, r) = fit_decay_constant(&t, &e, DecayFit::Exponential, 0.01, 100.0);
        assert!((c - 1.7).abs() < 1e-8 && r < 1e-15);
        let gs: Vec<f64> = t.iter().map(|&x| (-(x / 0.9f64).powi(2)).exp()).collect();
        let (c, _) = fit_decay_constant(&t, &gs, DecayFit::Gaussian, 0.01, 100.0);
        assert!((c - 0.9).abs() < 1e-8);
    }
}
