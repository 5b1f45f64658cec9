//! Training-free separability analysis for multitrack music datasets.
//!
//! Every song is run through an oracle separator built on the Ideal Ratio
//! Mask: mixture and stems are moved into the time-frequency domain, each
//! stem's power share of every bin becomes its mask, the mask is applied to
//! the mixture and the result is resynthesized. The oracle estimates are
//! then scored with BSS-Eval style metrics (SDR, ISR, SIR, SAR) and SI-SDR
//! over one-second windows, and the per-song medians feed the curation
//! tools in [`analysis`]: ranking, top/random/bottom subsets, mute-ratio
//! plans and Pearson/Spearman correlation of score tables.
//!
//! ```text
//! stems ──► STFT ──► |y|^α ──► IRM masks ─┐
//! mixture ─► STFT ────────────────────────┴─► mask ⊙ mixture ─► ISTFT ─► estimates ─► metrics
//! ```

pub mod analysis;
pub mod audio;
pub mod dataset;
pub mod error;
pub mod format;
pub mod metrics;
pub mod oracle;
pub mod stft;
pub mod synth;

pub use audio::AudioClip;
pub use dataset::{DatasetManifest, MultitrackSong, Split};
pub use error::{Error, Result};
pub use metrics::{
    aggregate_dataset, aggregate_song, decompose, framewise_scores, si_sdr, ErrorComponents,
    FrameScores, Metric, MetricConfig, MetricScores, ScoreTable,
};
pub use oracle::{compute_irm, oracle_separate, MaskSet, OracleConfig, ZeroBinPolicy};
pub use stft::{check_cola, istft, stft, ColaReport, Spectrogram, StftConfig, WindowKind};

/// Version stamped into every serialized artifact.
pub const FORMAT_VERSION: u32 = 1;
