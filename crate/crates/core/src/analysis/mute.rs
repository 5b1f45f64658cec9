use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::rng::{SeededSampler, GENERATOR_ID};
use super::round_half_up;
use crate::dataset::{DatasetManifest, MultitrackSong, Split};
use crate::error::{Error, Result};

/// Training songs whose stem of one instrument is silenced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutePlan {
    pub instrument: String,
    pub ratio: f64,
    pub seed: u64,
    pub generator: String,
    /// Number of training songs the ratio applies to.
    pub population: usize,
    pub muted: BTreeSet<String>,
}

impl MutePlan {
    pub fn mutes(&self, song_id: &str) -> bool {
        self.muted.contains(song_id)
    }

    /// The song with the planned stem silenced, or unchanged if it is not in the plan.
    pub fn materialize(&self, song: &MultitrackSong) -> Result<MultitrackSong> {
        if self.mutes(song.song_id()) {
            song.with_muted(&self.instrument)
        } else {
            Ok(song.clone())
        }
    }
}

/// Ratios from 0.00 to 0.45 in steps of 0.05.
pub fn default_mute_ratios() -> Vec<f64> {
    (0..10).map(|i| i as f64 / 20.0).collect()
}

/// Draws `round(ratio · N)` of the `N` training songs. Validation and test
/// songs are never muted. With one seed, the plan for a smaller ratio is a
/// subset of the plan for a larger one.
pub fn plan_mutes(
    manifest: &DatasetManifest,
    instrument: &str,
    ratio: f64,
    seed: u64,
) -> Result<MutePlan> {
    let instrument = instrument.to_ascii_lowercase();
    if !manifest.instruments.contains(&instrument) {
        return Err(Error::InvalidInput(format!(
            "instrument `{instrument}` is not among the manifest instruments [{}]",
            manifest.instruments.join(", ")
        )));
    }
    if !(0.0..=1.0).contains(&ratio) {
        return Err(Error::InvalidInput(format!(
            "mute ratio must lie in [0, 1], got {ratio}"
        )));
    }
    let mut population: Vec<&str> = manifest.songs_in(Split::Train).collect();
    population.sort_unstable();
    let k = round_half_up(ratio * population.len() as f64).min(population.len());
    let muted = SeededSampler::new(seed)
        .sample_indices(population.len(), k)
        .into_iter()
        .map(|i| population[i].to_owned())
        .collect();
    Ok(MutePlan {
        instrument,
        ratio,
        seed,
        generator: GENERATOR_ID.to_owned(),
        population: population.len(),
        muted,
    })
}
