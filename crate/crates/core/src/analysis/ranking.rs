use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::rng::{SeededSampler, GENERATOR_ID};
use super::round_half_up;
use crate::error::{Error, Result};
use crate::metrics::{Metric, ScoreTable};

/// Songs ordered best first by one metric of one instrument.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub metric: Metric,
    pub instrument: String,
    /// `(song_id, value)`, descending by value, missing values last.
    pub entries: Vec<(String, Option<f64>)>,
}

impl Ranking {
    pub fn songs(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(s, _)| s.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Descending by value; missing values after every present one; ties and
/// missing values ordered by song id.
pub fn rank_songs(table: &ScoreTable, metric: Metric, instrument: &str) -> Result<Ranking> {
    let column = table.column(instrument, metric);
    if column.is_empty() {
        return Err(Error::InvalidInput(format!(
            "instrument `{instrument}` does not appear in the score table"
        )));
    }
    let mut entries: Vec<(String, Option<f64>)> =
        column.into_iter().map(|(s, v)| (s.to_owned(), v)).collect();
    entries.sort_by(|(sa, va), (sb, vb)| {
        let by_value = match (va, vb) {
            (Some(a), Some(b)) => b.total_cmp(a),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => Ordering::Equal,
        };
        by_value.then_with(|| sa.cmp(sb))
    });
    Ok(Ranking {
        metric,
        instrument: instrument.to_owned(),
        entries,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Top,
    Random,
    Bottom,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::Top => "top",
            Criterion::Random => "random",
            Criterion::Bottom => "bottom",
        })
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "top" | "best" => Ok(Criterion::Top),
            "random" | "rand" => Ok(Criterion::Random),
            "bottom" | "last" | "worst" => Ok(Criterion::Bottom),
            other => Err(Error::InvalidInput(format!("unknown criterion `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionPlan {
    pub criterion: Criterion,
    pub fraction: f64,
    pub metric: Metric,
    pub instrument: String,
    /// Only set for the random criterion.
    pub seed: Option<u64>,
    pub generator: String,
    pub population: usize,
    /// Selected songs in ranking order.
    pub selected: Vec<String>,
}

/// `round(fraction · population)` with halves rounded up, at least one.
pub fn subset_size(fraction: f64, population: usize) -> usize {
    round_half_up(fraction * population as f64).clamp(1, population.max(1))
}

pub fn select_subset(
    ranking: &Ranking,
    criterion: Criterion,
    fraction: f64,
    seed: u64,
) -> Result<SelectionPlan> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "fraction must lie in (0, 1], got {fraction}"
        )));
    }
    let n = ranking.len();
    if n == 0 {
        return Err(Error::InvalidInput(
            "cannot select from an empty ranking".into(),
        ));
    }
    let k = subset_size(fraction, n);
    let songs: Vec<&str> = ranking.songs().collect();
    let selected: Vec<String> = match criterion {
        Criterion::Top => songs[..k].iter().map(|s| s.to_string()).collect(),
        Criterion::Bottom => songs[n - k..].iter().map(|s| s.to_string()).collect(),
        Criterion::Random => {
            let mut picks = SeededSampler::new(seed).sample_indices(n, k);
            picks.sort_unstable();
            picks.into_iter().map(|i| songs[i].to_owned()).collect()
        }
    };
    Ok(SelectionPlan {
        criterion,
        fraction,
        metric: ranking.metric,
        instrument: ranking.instrument.clone(),
        seed: (criterion == Criterion::Random).then_some(seed),
        generator: GENERATOR_ID.to_owned(),
        population: n,
        selected,
    })
}
