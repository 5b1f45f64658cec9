//! Dataset curation on top of oracle score tables.

mod correlation;
mod mute;
mod ranking;
mod rng;

pub use correlation::{
    correlate_tables, fractional_ranks, pearson, spearman, CorrelationCell, CorrelationGrid,
    CorrelationMethod,
};
pub use mute::{default_mute_ratios, plan_mutes, MutePlan};
pub use ranking::{rank_songs, select_subset, subset_size, Criterion, Ranking, SelectionPlan};
pub use rng::{SeededSampler, GENERATOR_ID};

/// `round(x)` with halves rounded up, tolerant of binary representation
/// error in products such as `0.15 * 10`.
pub fn round_half_up(x: f64) -> usize {
    (x + 0.5 + 1e-9).floor().max(0.0) as usize
}
