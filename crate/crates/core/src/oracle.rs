//! Ideal Ratio Mask oracle separation.
//!
//! For sources with spectrograms `y_j`, the mask of source `j` at a bin is
//! `|y_j|^α / Σ_j' |y_j'|^α`. Masks come from the stems but are applied to
//! the mixture spectrogram, so only the mixture is ever separated.

use ndarray::{Array3, Zip};
use serde::{Deserialize, Serialize};

use crate::audio::AudioClip;
use crate::dataset::{make_mixture, MultitrackSong};
use crate::error::{Error, Result};
use crate::stft::{istft, stft, Spectrogram, StftConfig};

/// Mask value at bins where every source is exactly silent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroBinPolicy {
    /// `1/J` for every source; masks still partition the bin.
    #[default]
    Uniform,
    /// Zero for every source. Silent bins then fall outside the partition.
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Magnitude exponent; 2 selects power spectrograms, 1 plain magnitudes.
    pub alpha: f64,
    pub stft: StftConfig,
    pub zero_bin_policy: ZeroBinPolicy,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            alpha: 2.0,
            stft: StftConfig::default(),
            zero_bin_policy: ZeroBinPolicy::Uniform,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::Config(format!(
                "mask exponent must be finite and non-negative, got {}",
                self.alpha
            )));
        }
        self.stft.validate()
    }
}

/// One real mask per source, shaped like the spectrograms it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskSet {
    pub masks: Vec<Array3<f64>>,
    pub source_ids: Vec<String>,
}

impl MaskSet {
    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn dim(&self) -> (usize, usize, usize) {
        self.masks[0].dim()
    }

    pub fn with_ids(mut self, ids: Vec<String>) -> Result<Self> {
        if ids.len() != self.masks.len() {
            return Err(Error::InvalidInput(format!(
                "{} labels for {} masks",
                ids.len(),
                self.masks.len()
            )));
        }
        self.source_ids = ids;
        Ok(self)
    }
}

fn power(ratio: f64, alpha: f64) -> f64 {
    if alpha == 2.0 {
        ratio * ratio
    } else if alpha == 1.0 {
        ratio
    } else {
        ratio.powf(alpha)
    }
}

pub fn compute_irm(source_specs: &[Spectrogram], config: &OracleConfig) -> Result<MaskSet> {
    config.validate()?;
    let sources = source_specs.len();
    if sources < 2 {
        return Err(Error::InvalidInput(format!(
            "ideal ratio masks need at least two sources, got {sources}"
        )));
    }
    let dim = source_specs[0].dim();
    if let Some((j, s)) = source_specs
        .iter()
        .enumerate()
        .find(|(_, s)| s.dim() != dim)
    {
        return Err(Error::InvalidInput(format!(
            "source {j} has spectrogram shape {:?}, source 0 has {dim:?}",
            s.dim()
        )));
    }

    let uniform = 1.0 / sources as f64;
    let silent_value = match config.zero_bin_policy {
        ZeroBinPolicy::Uniform => uniform,
        ZeroBinPolicy::Zero => 0.0,
    };
    let mut masks = vec![Array3::<f64>::zeros(dim); sources];
    let mut mags = vec![0.0; sources];
    let (channels, frames, freqs) = dim;
    for c in 0..channels {
        for t in 0..frames {
            for f in 0..freqs {
                for (m, spec) in mags.iter_mut().zip(source_specs) {
                    *m = spec.bins()[[c, t, f]].norm();
                }
                let peak = mags.iter().copied().fold(0.0, f64::max);
                if peak == 0.0 {
                    for mask in masks.iter_mut() {
                        mask[[c, t, f]] = silent_value;
                    }
                    continue;
                }
                // Scaling by the loudest source leaves the ratio unchanged and
                // keeps |y|^α away from overflow and underflow.
                for m in mags.iter_mut() {
                    *m = power(*m / peak, config.alpha);
                }
                let total: f64 = mags.iter().sum();
                for (mask, &v) in masks.iter_mut().zip(&mags) {
                    mask[[c, t, f]] = v / total;
                }
            }
        }
    }
    Ok(MaskSet {
        masks,
        source_ids: (0..sources).map(|j| format!("source{j}")).collect(),
    })
}

/// Scales the complex mixture by each real mask.
pub fn apply_masks(mixture: &Spectrogram, masks: &MaskSet) -> Result<Vec<Spectrogram>> {
    if masks.is_empty() {
        return Err(Error::InvalidInput("empty mask set".into()));
    }
    if let Some(bad) = masks.masks.iter().find(|m| m.dim() != mixture.dim()) {
        return Err(Error::InvalidInput(format!(
            "mask shape {:?} does not match mixture shape {:?}",
            bad.dim(),
            mixture.dim()
        )));
    }
    masks
        .masks
        .iter()
        .map(|mask| {
            let mut bins = mixture.bins().clone();
            Zip::from(&mut bins).and(mask).for_each(|z, &m| *z *= m);
            mixture.with_bins(bins)
        })
        .collect()
}

/// Runs the full oracle on one song and returns one estimate per stem, in
/// stem order. A missing mixture is synthesized as the sum of the stems.
pub fn oracle_separate(song: &MultitrackSong, config: &OracleConfig) -> Result<Vec<AudioClip>> {
    config.validate()?;
    let synthesized;
    let mixture = match song.mixture() {
        Some(m) => m,
        None => {
            synthesized = make_mixture(song)?;
            synthesized.mixture().expect("mixture was just synthesized")
        }
    };
    let stem_specs = song
        .stems()
        .values()
        .map(|clip| stft(clip, &config.stft))
        .collect::<Result<Vec<_>>>()?;
    let masks = compute_irm(&stem_specs, config)?
        .with_ids(song.instruments().map(str::to_owned).collect())?;
    let mixture_spec = stft(mixture, &config.stft)?;
    apply_masks(&mixture_spec, &masks)?
        .iter()
        .map(|spec| istft(spec, song.len()))
        .collect()
}
