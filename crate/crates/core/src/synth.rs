//! Deterministic synthetic signals for fixtures, tests and benchmarks.

use std::f64::consts::PI;

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use crate::audio::AudioClip;

/// One sinusoidal partial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Partial {
    pub freq_hz: f64,
    pub amplitude: f64,
    pub phase: f64,
}

impl Partial {
    pub fn new(freq_hz: f64, amplitude: f64, phase: f64) -> Self {
        Self {
            freq_hz,
            amplitude,
            phase,
        }
    }
}

fn unit_uniform(rng: &mut ChaCha20Rng) -> f64 {
    // 53 random mantissa bits in [0, 1).
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

/// Gaussian samples with unit variance (Box-Muller).
pub fn gaussian(len: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(len + 1);
    while out.len() < len {
        let u1 = 1.0 - unit_uniform(&mut rng);
        let u2 = unit_uniform(&mut rng);
        let r = (-2.0 * u1.ln()).sqrt();
        out.push(r * (2.0 * PI * u2).cos());
        out.push(r * (2.0 * PI * u2).sin());
    }
    out.truncate(len);
    out
}

/// Uniform samples in `[-1, 1)`.
pub fn uniform(len: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| 2.0 * unit_uniform(&mut rng) - 1.0)
        .collect()
}

/// Gaussian noise with a standard deviation of 0.1, independent per channel.
pub fn white_noise(channels: usize, len: usize, sample_rate: u32, seed: u64) -> AudioClip {
    let data = (0..channels.max(1))
        .map(|c| {
            gaussian(len, seed.wrapping_mul(0x9E37_79B9).wrapping_add(c as u64))
                .into_iter()
                .map(|x| 0.1 * x)
                .collect()
        })
        .collect();
    AudioClip::new(data, sample_rate).expect("channels share one length")
}

pub fn sine_bank(partials: &[Partial], len: usize, sample_rate: u32) -> Vec<f64> {
    let sr = sample_rate as f64;
    (0..len)
        .map(|n| {
            let t = n as f64 / sr;
            partials
                .iter()
                .map(|p| p.amplitude * (2.0 * PI * p.freq_hz * t + p.phase).sin())
                .sum()
        })
        .collect()
}

/// The same sine bank on every channel.
pub fn sine_clip(partials: &[Partial], channels: usize, len: usize, sample_rate: u32) -> AudioClip {
    let mono = sine_bank(partials, len, sample_rate);
    AudioClip::new(vec![mono; channels.max(1)], sample_rate).expect("equal channels")
}
