//! Forward and inverse short-time Fourier transform.
//!
//! Analysis applies the window once; synthesis applies it again and divides
//! by the overlapped squared window (weighted overlap-add), so any hop whose
//! squared-window sum tiles to a constant resynthesizes the input exactly.
//! With `center` set, each channel is reflect-padded by half a window on both
//! sides before framing, so sample `n` of the clip sits at the middle of the
//! frame whose index is `n / hop`.

use std::fmt;
use std::str::FromStr;

use ndarray::Array3;
use realfft::RealFftPlanner;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::audio::AudioClip;
use crate::error::{Error, Result};

/// Relative flatness required of the overlapped squared window.
pub const COLA_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowKind {
    /// Periodic Hann, `0.5 - 0.5 cos(2πn/N)`.
    #[default]
    Hann,
    /// Square root of the periodic Hann window.
    SqrtHann,
    Rectangular,
}

impl WindowKind {
    pub fn coefficients(self, size: usize) -> Vec<f64> {
        let hann =
            |n: usize| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * n as f64 / size as f64).cos();
        match self {
            WindowKind::Hann => (0..size).map(hann).collect(),
            WindowKind::SqrtHann => (0..size).map(|n| hann(n).sqrt()).collect(),
            WindowKind::Rectangular => vec![1.0; size],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            WindowKind::Hann => "hann",
            WindowKind::SqrtHann => "sqrt-hann",
            WindowKind::Rectangular => "rectangular",
        }
    }
}

impl fmt::Display for WindowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WindowKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hann" => Ok(WindowKind::Hann),
            "sqrt-hann" | "sqrthann" => Ok(WindowKind::SqrtHann),
            "rectangular" | "rect" | "boxcar" => Ok(WindowKind::Rectangular),
            other => Err(Error::Config(format!("unknown window kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StftConfig {
    pub window_size: usize,
    pub hop_size: usize,
    pub window: WindowKind,
    /// Reflect-pad half a window at both ends before framing.
    pub center: bool,
}

impl Default for StftConfig {
    fn default() -> Self {
        Self {
            window_size: 4096,
            hop_size: 1024,
            window: WindowKind::Hann,
            center: true,
        }
    }
}

impl StftConfig {
    pub fn new(window_size: usize, hop_size: usize, window: WindowKind) -> Self {
        Self {
            window_size,
            hop_size,
            window,
            center: true,
        }
    }

    pub fn with_center(mut self, center: bool) -> Self {
        self.center = center;
        self
    }

    /// Frequency bins of the one-sided transform.
    pub fn num_bins(&self) -> usize {
        self.window_size / 2 + 1
    }

    fn pad(&self) -> usize {
        if self.center {
            self.window_size / 2
        } else {
            0
        }
    }

    fn num_frames(&self, len: usize) -> usize {
        let padded = len + 2 * self.pad();
        if padded <= self.window_size {
            1
        } else {
            1 + (padded - self.window_size).div_ceil(self.hop_size)
        }
    }

    fn buffer_len(&self, frames: usize) -> usize {
        (frames - 1) * self.hop_size + self.window_size
    }

    /// Checks the hop bounds and the overlap-add condition.
    pub fn validate(&self) -> Result<()> {
        if self.window_size == 0 {
            return Err(Error::Config("window size must be positive".into()));
        }
        if self.hop_size == 0 || self.hop_size > self.window_size {
            return Err(Error::Config(format!(
                "hop size {} must lie in 1..={}",
                self.hop_size, self.window_size
            )));
        }
        let report = check_cola(self);
        if !report.pass {
            return Err(Error::Config(format!(
                "{} window of {} samples does not satisfy overlap-add at hop {} \
                 (relative deviation {:.3e})",
                self.window, self.window_size, self.hop_size, report.max_deviation
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ColaReport {
    pub pass: bool,
    /// `(max - min) / max` of the overlapped squared window.
    pub max_deviation: f64,
}

/// Checks that the squared window, overlapped at the configured hop, sums to
/// a constant in the steady-state interior.
pub fn check_cola(config: &StftConfig) -> ColaReport {
    if config.window_size == 0 || config.hop_size == 0 || config.hop_size > config.window_size {
        return ColaReport {
            pass: false,
            max_deviation: f64::INFINITY,
        };
    }
    let window = config.window.coefficients(config.window_size);
    // One hop period of the interior sum: every frame shift k·hop contributes.
    let mut sums = vec![0.0; config.hop_size];
    for (n, w) in window.iter().enumerate() {
        sums[n % config.hop_size] += w * w;
    }
    let max = sums.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = sums.iter().copied().fold(f64::INFINITY, f64::min);
    if max <= 0.0 {
        return ColaReport {
            pass: false,
            max_deviation: f64::INFINITY,
        };
    }
    let max_deviation = (max - min) / max;
    ColaReport {
        pass: max_deviation <= COLA_TOLERANCE,
        max_deviation,
    }
}

/// Complex one-sided spectrogram indexed `[channel, frame, frequency]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    bins: Array3<Complex64>,
    config: StftConfig,
    original_length: usize,
    sample_rate: u32,
}

impl Spectrogram {
    pub fn from_parts(
        bins: Array3<Complex64>,
        config: StftConfig,
        original_length: usize,
        sample_rate: u32,
    ) -> Result<Self> {
        let (channels, frames, freqs) = bins.dim();
        if channels == 0 || frames == 0 {
            return Err(Error::InvalidInput(
                "spectrogram has no channels or frames".into(),
            ));
        }
        if freqs != config.num_bins() {
            return Err(Error::InvalidInput(format!(
                "spectrogram has {freqs} bins, window of {} implies {}",
                config.window_size,
                config.num_bins()
            )));
        }
        Ok(Self {
            bins,
            config,
            original_length,
            sample_rate,
        })
    }

    pub fn bins(&self) -> &Array3<Complex64> {
        &self.bins
    }

    /// Shape `(channels, frames, bins)`.
    pub fn dim(&self) -> (usize, usize, usize) {
        self.bins.dim()
    }

    pub fn config(&self) -> &StftConfig {
        &self.config
    }

    pub fn original_length(&self) -> usize {
        self.original_length
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    /// Longest signal [`istft`] can synthesize from this many frames.
    pub fn representable_length(&self) -> usize {
        self.config.buffer_len(self.dim().1) - self.config.pad()
    }

    /// Same values, new bins.
    pub fn with_bins(&self, bins: Array3<Complex64>) -> Result<Self> {
        if bins.dim() != self.dim() {
            return Err(Error::InvalidInput(format!(
                "bin array of shape {:?} does not match spectrogram shape {:?}",
                bins.dim(),
                self.dim()
            )));
        }
        Ok(Self {
            bins,
            ..self.clone()
        })
    }

    pub fn try_add(&self, other: &Spectrogram) -> Result<Spectrogram> {
        if other.config != self.config {
            return Err(Error::InvalidInput(
                "spectrogram configurations differ".into(),
            ));
        }
        self.with_bins(&self.bins + &other.bins)
    }

    pub fn scaled(&self, gain: f64) -> Spectrogram {
        Spectrogram {
            bins: self.bins.mapv(|z| z * gain),
            ..self.clone()
        }
    }
}

/// Index into a signal mirrored about its first and last sample.
fn reflect_index(q: isize, len: usize) -> usize {
    if len == 1 {
        return 0;
    }
    let period = 2 * (len as isize - 1);
    let r = q.rem_euclid(period);
    if r >= len as isize {
        (period - r) as usize
    } else {
        r as usize
    }
}

fn padded_channel(samples: &[f64], config: &StftConfig, buffer_len: usize) -> Vec<f64> {
    let len = samples.len() as isize;
    let pad = config.pad() as isize;
    (0..buffer_len as isize)
        .map(|p| {
            let q = p - pad;
            if (0..len).contains(&q) {
                samples[q as usize]
            } else if config.center && q >= -pad && q < len + pad {
                samples[reflect_index(q, samples.len())]
            } else {
                0.0
            }
        })
        .collect()
}

pub fn stft(clip: &AudioClip, config: &StftConfig) -> Result<Spectrogram> {
    if clip.is_empty() {
        return Err(Error::InvalidInput("cannot transform an empty clip".into()));
    }
    config.validate()?;

    let win = config.window_size;
    let frames = config.num_frames(clip.len());
    let buffer_len = config.buffer_len(frames);
    let window = config.window.coefficients(win);

    let mut planner = RealFftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(win);
    let mut input = fft.make_input_vec();
    let mut output = fft.make_output_vec();
    let mut scratch = fft.make_scratch_vec();

    let mut bins = Array3::<Complex64>::zeros((clip.num_channels(), frames, config.num_bins()));
    for (c, samples) in clip.channels().iter().enumerate() {
        let buffer = padded_channel(samples, config, buffer_len);
        for t in 0..frames {
            let start = t * config.hop_size;
            for ((dst, &x), &w) in input
                .iter_mut()
                .zip(&buffer[start..start + win])
                .zip(&window)
            {
                *dst = x * w;
            }
            fft.process_with_scratch(&mut input, &mut output, &mut scratch)
                .map_err(|e| Error::InvalidInput(format!("forward transform failed: {e}")))?;
            for (dst, &z) in bins
                .slice_mut(ndarray::s![c, t, ..])
                .iter_mut()
                .zip(&output)
            {
                *dst = z;
            }
        }
    }
    Spectrogram::from_parts(bins, *config, clip.len(), clip.sample_rate())
}

pub fn istft(spec: &Spectrogram, target_length: usize) -> Result<AudioClip> {
    let config = spec.config;
    config.validate()?;
    let (channels, frames, freqs) = spec.dim();
    if target_length > spec.representable_length() {
        return Err(Error::InvalidInput(format!(
            "target length {target_length} exceeds the {} samples representable by {frames} frames",
            spec.representable_length()
        )));
    }

    let win = config.window_size;
    let pad = config.pad();
    let buffer_len = config.buffer_len(frames);
    let window = config.window.coefficients(win);
    let mut norm = vec![0.0; buffer_len];
    for t in 0..frames {
        let start = t * config.hop_size;
        for (acc, w) in norm[start..start + win].iter_mut().zip(&window) {
            *acc += w * w;
        }
    }

    let mut planner = RealFftPlanner::<f64>::new();
    let ifft = planner.plan_fft_inverse(win);
    let mut input = ifft.make_input_vec();
    let mut output = ifft.make_output_vec();
    let mut scratch = ifft.make_scratch_vec();
    let scale = 1.0 / win as f64;

    let mut out = Vec::with_capacity(channels);
    for c in 0..channels {
        let mut ola = vec![0.0; buffer_len];
        for t in 0..frames {
            for (dst, &z) in input.iter_mut().zip(spec.bins.slice(ndarray::s![c, t, ..])) {
                *dst = z;
            }
            // A real signal has purely real DC and Nyquist terms.
            input[0].im = 0.0;
            if win.is_multiple_of(2) {
                input[freqs - 1].im = 0.0;
            }
            ifft.process_with_scratch(&mut input, &mut output, &mut scratch)
                .map_err(|e| Error::InvalidInput(format!("inverse transform failed: {e}")))?;
            let start = t * config.hop_size;
            for ((acc, &y), &w) in ola[start..start + win].iter_mut().zip(&output).zip(&window) {
                *acc += y * scale * w;
            }
        }
        let samples = (0..target_length)
            .map(|n| {
                let d = norm[n + pad];
                if d > 0.0 {
                    ola[n + pad] / d
                } else {
                    0.0
                }
            })
            .collect();
        out.push(samples);
    }
    AudioClip::new(out, spec.sample_rate)
}
