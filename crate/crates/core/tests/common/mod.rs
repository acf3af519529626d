#![allow(dead_code)]

use std::f64::consts::TAU;

use magnomech::{RawParams, SystemParams};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

/// Random parameters inside the red-dominated (stable) region, rotating
/// frame rates well below ω_b.
pub fn stable_draw(rng: &mut ChaCha8Rng) -> SystemParams<f64> {
    let mut raw = RawParams::<f64>::baseline();
    raw.kappa_a = TAU * log_uniform(rng, 0.1e6, 3e6);
    raw.kappa_m = TAU * log_uniform(rng, 0.1e6, 3e6);
    raw.gamma_b = TAU * log_uniform(rng, 10.0, 1e5);
    raw.g = TAU * log_uniform(rng, 0.05e6, 3e6);
    raw.g_minus = TAU * log_uniform(rng, 0.05e6, 3e6);
    raw.g_plus = rng.gen_range(0.0..0.995) * raw.g_minus;
    raw.temperature = if rng.gen_bool(0.1) {
        0.0
    } else {
        log_uniform(rng, 1e-3, 2.0)
    };
    raw.validate().expect("draw is valid")
}
