mod checks;
mod damping;
mod graph;
mod noise;
mod spinflip;

pub(crate) use checks::{noise_verify, transform_check};
pub(crate) use damping::bell_damping;
pub(crate) use graph::graph;
pub(crate) use noise::{bell_electron_noise, bell_nuclear_noise};
pub(crate) use spinflip::spinflip;

/// Compact time label: 1e-3 → "1ms", 2e-5 → "20us".
pub(crate) fn time_label(t: f64) -> String {
    let (v, unit) = if t >= 1.0 {
        (t, "s")
    } else if t >= 1e-3 {
        (t * 1e3, "ms")
    } else {
        (t * 1e6, "us")
    };
    let v = (v * 1e6).round() / 1e6;
    format!("{v}{unit}")
}
