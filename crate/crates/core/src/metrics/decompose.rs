//! Least-squares decomposition of an estimate into target, spatial,
//! interference and artifact components.
//!
//! Every reference channel, delayed by `0..L` samples, is one regressor. The
//! references are zero-padded by `L - 1` samples so every delayed copy keeps
//! its full support; the regressor Gram matrix is then exactly block
//! Toeplitz, with blocks given by reference cross-correlations at lags
//! `-(L-1)..L`. All components live on that padded support of `N + L - 1`
//! samples.

use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::MetricConfig;
use crate::audio::AudioClip;
use crate::error::{Error, Result};

/// Ridge added to the Gram diagonal, relative to its mean diagonal, when the
/// plain factorization fails or is numerically singular.
pub const RIDGE: f64 = 1e-10;

/// A Cholesky pivot below this fraction of the largest Gram diagonal entry
/// counts as singular.
const PIVOT_FLOOR: f64 = 1e-12;

/// `ŝ = s + e_spat + e_interf + e_artif`, per channel, on the padded support.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorComponents {
    /// True target source `s`, zero-padded.
    pub target: Vec<Vec<f64>>,
    pub e_spat: Vec<Vec<f64>>,
    pub e_interf: Vec<Vec<f64>>,
    pub e_artif: Vec<Vec<f64>>,
    /// Whether a Gram solve needed the ridge or pseudo-inverse fallback.
    pub regularized: bool,
}

impl ErrorComponents {
    /// Sum of the four parts, which reproduces the padded estimate.
    pub fn estimate(&self) -> Vec<Vec<f64>> {
        (0..self.target.len())
            .map(|c| {
                (0..self.target[c].len())
                    .map(|n| {
                        self.target[c][n]
                            + self.e_spat[c][n]
                            + self.e_interf[c][n]
                            + self.e_artif[c][n]
                    })
                    .collect()
            })
            .collect()
    }
}

struct FftPair {
    size: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl FftPair {
    fn new(size: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            size,
            forward: planner.plan_fft_forward(size),
            inverse: planner.plan_fft_inverse(size),
        }
    }

    fn spectrum(&self, x: &[f64]) -> Vec<Complex64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.size];
        for (dst, &v) in buf.iter_mut().zip(x) {
            dst.re = v;
        }
        self.forward.process(&mut buf);
        buf
    }

    /// Real part of the normalized inverse transform.
    fn real_inverse(&self, mut buf: Vec<Complex64>) -> Vec<f64> {
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.size as f64;
        buf.into_iter().map(|z| z.re * scale).collect()
    }

    /// `c[k] = Σ_m x(m + k) y(m)`, indexed circularly.
    fn cross_correlation(&self, x: &[Complex64], y: &[Complex64]) -> Vec<f64> {
        self.real_inverse(x.iter().zip(y).map(|(a, b)| a * b.conj()).collect())
    }
}

enum Solver {
    Cholesky(Cholesky<f64, Dyn>),
    Pseudo(DMatrix<f64>),
}

struct Factored {
    solver: Solver,
    regularized: bool,
}

impl Factored {
    fn new(gram: DMatrix<f64>) -> Self {
        let dim = gram.nrows();
        let max_diag = gram.diagonal().max();
        if let Some(ch) = Cholesky::new(gram.clone()) {
            let min_pivot = ch
                .l_dirty()
                .diagonal()
                .iter()
                .map(|d| d * d)
                .fold(f64::INFINITY, f64::min);
            if max_diag > 0.0 && min_pivot >= PIVOT_FLOOR * max_diag {
                return Self {
                    solver: Solver::Cholesky(ch),
                    regularized: false,
                };
            }
        }
        let ridge = RIDGE * gram.trace() / dim as f64;
        if ridge > 0.0 {
            let mut shifted = gram.clone();
            for i in 0..dim {
                shifted[(i, i)] += ridge;
            }
            if let Some(ch) = Cholesky::new(shifted) {
                return Self {
                    solver: Solver::Cholesky(ch),
                    regularized: true,
                };
            }
        }
        let eps = PIVOT_FLOOR * max_diag.max(f64::MIN_POSITIVE);
        let pinv = gram
            .pseudo_inverse(eps)
            .unwrap_or_else(|_| DMatrix::zeros(dim, dim));
        Self {
            solver: Solver::Pseudo(pinv),
            regularized: true,
        }
    }

    fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        match &self.solver {
            Solver::Cholesky(ch) => ch.solve(rhs),
            Solver::Pseudo(pinv) => pinv * rhs,
        }
    }
}

/// Projection machinery for one window of references, shared by every
/// target and estimate channel evaluated against them.
pub struct Projector {
    len: usize,
    filter_len: usize,
    sources: usize,
    channels: usize,
    fft: FftPair,
    /// Spectra of the references, indexed `source * channels + channel`.
    spectra: Vec<Vec<Complex64>>,
    references: Vec<AudioClip>,
    all: Factored,
    per_source: Vec<Factored>,
}

impl Projector {
    pub fn new(references: &[AudioClip], filter_len: usize) -> Result<Self> {
        let first = references
            .first()
            .ok_or_else(|| Error::InvalidInput("no reference sources".into()))?;
        if filter_len == 0 {
            return Err(Error::Config(
                "filter length must be at least one tap".into(),
            ));
        }
        if let Some((j, r)) = references
            .iter()
            .enumerate()
            .find(|(_, r)| r.len() != first.len() || r.num_channels() != first.num_channels())
        {
            return Err(Error::InvalidInput(format!(
                "reference {j} is {}x{}, reference 0 is {}x{}",
                r.num_channels(),
                r.len(),
                first.num_channels(),
                first.len()
            )));
        }
        let len = first.len();
        if len == 0 {
            return Err(Error::InvalidInput("references are empty".into()));
        }
        let sources = references.len();
        let channels = first.num_channels();
        let fft = FftPair::new((len + filter_len - 1).next_power_of_two());
        let spectra: Vec<Vec<Complex64>> = references
            .iter()
            .flat_map(|r| r.channels().iter())
            .map(|x| fft.spectrum(x))
            .collect();

        let signals = spectra.len();
        let l = filter_len;
        let dim = signals * l;
        let mut gram = DMatrix::<f64>::zeros(dim, dim);
        for a in 0..signals {
            for b in a..signals {
                let corr = fft.cross_correlation(&spectra[a], &spectra[b]);
                // <x_a delayed by t1, x_b delayed by t2> = c_ab[t2 - t1].
                for t1 in 0..l {
                    for t2 in 0..l {
                        let lag = t2 as isize - t1 as isize;
                        let v = corr[lag.rem_euclid(fft.size as isize) as usize];
                        gram[(a * l + t1, b * l + t2)] = v;
                        gram[(b * l + t2, a * l + t1)] = v;
                    }
                }
            }
        }

        let block = channels * l;
        let per_source = (0..sources)
            .map(|j| {
                Factored::new(
                    gram.view((j * block, j * block), (block, block))
                        .into_owned(),
                )
            })
            .collect();
        let all = Factored::new(gram);
        Ok(Self {
            len,
            filter_len,
            sources,
            channels,
            fft,
            spectra,
            references: references.to_vec(),
            all,
            per_source,
        })
    }

    pub fn num_sources(&self) -> usize {
        self.sources
    }

    pub fn padded_len(&self) -> usize {
        self.len + self.filter_len - 1
    }

    /// Least-squares fit of `estimate` by the regressors of `signals`
    /// (a contiguous range of reference signal indices).
    fn project(
        &self,
        rhs_full: &DVector<f64>,
        signals: std::ops::Range<usize>,
        factored: &Factored,
    ) -> Vec<f64> {
        let l = self.filter_len;
        let rhs = rhs_full
            .rows(signals.start * l, signals.len() * l)
            .into_owned();
        let coef = factored.solve(&rhs);
        let mut acc = vec![Complex64::new(0.0, 0.0); self.fft.size];
        for (k, a) in signals.enumerate() {
            let taps = self.fft.spectrum(coef.rows(k * l, l).as_slice());
            for ((dst, x), h) in acc.iter_mut().zip(&self.spectra[a]).zip(&taps) {
                *dst += x * h;
            }
        }
        let mut out = self.fft.real_inverse(acc);
        out.truncate(self.padded_len());
        out
    }

    pub fn decompose(&self, target: usize, estimate: &AudioClip) -> Result<ErrorComponents> {
        if target >= self.sources {
            return Err(Error::InvalidInput(format!(
                "target index {target} out of range for {} sources",
                self.sources
            )));
        }
        if estimate.len() != self.len || estimate.num_channels() != self.channels {
            return Err(Error::InvalidInput(format!(
                "estimate is {}x{}, references are {}x{}",
                estimate.num_channels(),
                estimate.len(),
                self.channels,
                self.len
            )));
        }
        let l = self.filter_len;
        let padded = self.padded_len();
        let target_signals = target * self.channels..(target + 1) * self.channels;
        let all_signals = 0..self.spectra.len();

        let mut out = ErrorComponents {
            target: Vec::with_capacity(self.channels),
            e_spat: Vec::with_capacity(self.channels),
            e_interf: Vec::with_capacity(self.channels),
            e_artif: Vec::with_capacity(self.channels),
            regularized: self.all.regularized || self.per_source[target].regularized,
        };
        for c in 0..self.channels {
            let est = estimate.channel(c);
            let est_spec = self.fft.spectrum(est);
            // <x_a delayed by t, ŝ> = c_{ŝ,a}[t].
            let mut rhs = DVector::<f64>::zeros(self.spectra.len() * l);
            for (a, xa) in self.spectra.iter().enumerate() {
                let corr = self.fft.cross_correlation(&est_spec, xa);
                rhs.rows_mut(a * l, l).copy_from_slice(&corr[..l]);
            }
            let p_target = self.project(&rhs, target_signals.clone(), &self.per_source[target]);
            let p_all = self.project(&rhs, all_signals.clone(), &self.all);

            let mut s = self.references[target].channel(c).to_vec();
            s.resize(padded, 0.0);
            let mut est_padded = est.to_vec();
            est_padded.resize(padded, 0.0);

            out.e_spat
                .push(p_target.iter().zip(&s).map(|(p, s)| p - s).collect());
            out.e_interf
                .push(p_all.iter().zip(&p_target).map(|(a, t)| a - t).collect());
            out.e_artif
                .push(est_padded.iter().zip(&p_all).map(|(e, a)| e - a).collect());
            out.target.push(s);
        }
        Ok(out)
    }
}

/// Decomposes `estimate` against all true sources, with `target` the index
/// of the source it estimates.
pub fn decompose(
    references: &[AudioClip],
    estimate: &AudioClip,
    target: usize,
    config: &MetricConfig,
) -> Result<ErrorComponents> {
    config.validate()?;
    let reference = references.get(target).ok_or_else(|| {
        Error::InvalidInput(format!(
            "target index {target} out of range for {} sources",
            references.len()
        ))
    })?;
    if config.is_silent(
        reference.energy(),
        reference.len() * reference.num_channels(),
    ) {
        return Err(Error::SilentReference);
    }
    Projector::new(references, config.filter_length)?.decompose(target, estimate)
}
