//! Separation quality metrics.
//!
//! SDR, ISR, SIR and SAR come from splitting an estimate into the true
//! source plus spatial, interference and artifact errors with least-squares
//! projections onto FIR-filtered references ([`decompose`]). SI-SDR uses the
//! optimal scalar projection instead. All five are evaluated on fixed
//! windows ([`framewise_scores`]), reduced to a per-song median
//! ([`aggregate_song`]) and then to a median over songs
//! ([`aggregate_dataset`]).

mod decompose;
mod framewise;
mod ratios;
mod table;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use decompose::{decompose, ErrorComponents, Projector};
pub use framewise::{aggregate_song, framewise_scores, median, window_bounds, FrameScores};
pub use ratios::{isr, sar, sdr, si_sdr, sir};
pub use table::{
    aggregate_dataset, summary_to_csv, summary_to_json, DatasetSummary, ScoreTable, CSV_HEADER,
};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    SiSdr,
    Sdr,
    Sir,
    Isr,
    Sar,
}

impl Metric {
    /// Column order of every serialized table.
    pub const ALL: [Metric; 5] = [
        Metric::SiSdr,
        Metric::Sdr,
        Metric::Sir,
        Metric::Isr,
        Metric::Sar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::SiSdr => "si_sdr",
            Metric::Sdr => "sdr",
            Metric::Sir => "sir",
            Metric::Isr => "isr",
            Metric::Sar => "sar",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == norm)
            .ok_or_else(|| Error::InvalidInput(format!("unknown metric `{s}`")))
    }
}

/// One value per metric in dB; `None` marks a missing score.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricScores {
    pub si_sdr: Option<f64>,
    pub sdr: Option<f64>,
    pub sir: Option<f64>,
    pub isr: Option<f64>,
    pub sar: Option<f64>,
}

impl MetricScores {
    pub const MISSING: MetricScores = MetricScores {
        si_sdr: None,
        sdr: None,
        sir: None,
        isr: None,
        sar: None,
    };

    pub fn get(&self, metric: Metric) -> Option<f64> {
        match metric {
            Metric::SiSdr => self.si_sdr,
            Metric::Sdr => self.sdr,
            Metric::Sir => self.sir,
            Metric::Isr => self.isr,
            Metric::Sar => self.sar,
        }
    }

    pub fn set(&mut self, metric: Metric, value: Option<f64>) {
        let slot = match metric {
            Metric::SiSdr => &mut self.si_sdr,
            Metric::Sdr => &mut self.sdr,
            Metric::Sir => &mut self.sir,
            Metric::Isr => &mut self.isr,
            Metric::Sar => &mut self.sar,
        };
        *slot = value;
    }

    pub fn from_fn(mut f: impl FnMut(Metric) -> Option<f64>) -> Self {
        let mut out = Self::MISSING;
        for m in Metric::ALL {
            out.set(m, f(m));
        }
        out
    }

    pub fn is_missing(&self) -> bool {
        Metric::ALL.iter().all(|&m| self.get(m).is_none())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig {
    /// Evaluation window in seconds.
    pub window_length: f64,
    /// Window hop in seconds.
    pub window_hop: f64,
    /// Taps of the distortion filters allowed in the projections.
    pub filter_length: usize,
    /// Mean-square reference level (full scale = 1) below which a window is missing.
    pub silence_threshold: f64,
    /// Largest reportable magnitude in dB.
    pub db_cap: f64,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self {
            window_length: 1.0,
            window_hop: 1.0,
            filter_length: 512,
            silence_threshold: 1e-12,
            db_cap: 300.0,
        }
    }
}

impl MetricConfig {
    /// Gain-only projections (one tap).
    pub fn fast() -> Self {
        Self {
            filter_length: 1,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.window_length.is_finite() && self.window_length > 0.0) {
            return Err(Error::Config("window length must be positive".into()));
        }
        if !(self.window_hop.is_finite() && self.window_hop > 0.0) {
            return Err(Error::Config("window hop must be positive".into()));
        }
        if self.filter_length == 0 {
            return Err(Error::Config(
                "filter length must be at least one tap".into(),
            ));
        }
        if self.silence_threshold.is_nan() || self.silence_threshold < 0.0 {
            return Err(Error::Config(
                "silence threshold must be non-negative".into(),
            ));
        }
        if !(self.db_cap.is_finite() && self.db_cap > 0.0) {
            return Err(Error::Config("dB cap must be positive".into()));
        }
        Ok(())
    }

    pub(crate) fn is_silent(&self, energy: f64, samples: usize) -> bool {
        samples == 0 || energy / (samples as f64) < self.silence_threshold
    }
}
