//! Fixtures shared by the benchmarks.

use irmsep::synth;
use irmsep::{stft, AudioClip, MultitrackSong, Spectrogram, StftConfig};

pub const SR: u32 = 44_100;

/// `sources` stereo noise stems of `seconds` seconds.
pub fn stems(sources: usize, seconds: f64) -> Vec<AudioClip> {
    let len = (seconds * SR as f64) as usize;
    (0..sources)
        .map(|j| synth::white_noise(2, len, SR, 40 + j as u64))
        .collect()
}

pub fn song(sources: usize, seconds: f64) -> MultitrackSong {
    MultitrackSong::new(
        "bench",
        stems(sources, seconds)
            .into_iter()
            .enumerate()
            .map(|(j, c)| (format!("src{j}"), c))
            .collect(),
        None,
    )
    .expect("aligned stems")
}

pub fn spectrograms(clips: &[AudioClip], config: &StftConfig) -> Vec<Spectrogram> {
    clips
        .iter()
        .map(|c| stft(c, config).expect("valid config"))
        .collect()
}

/// One-second window: the target with leakage from the others plus noise.
pub fn estimate(refs: &[AudioClip]) -> AudioClip {
    let hiss = synth::white_noise(refs[0].num_channels(), refs[0].len(), SR, 999).scaled(0.3);
    refs[1..]
        .iter()
        .fold(refs[0].try_add(&hiss).expect("same shape"), |acc, r| {
            acc.try_add(&r.scaled(0.2)).expect("same shape")
        })
}
