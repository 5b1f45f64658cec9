use super::decompose::Projector;
use super::ratios::{isr, sar, sdr, si_sdr, sir};
use super::{Metric, MetricConfig, MetricScores};
use crate::audio::AudioClip;
use crate::error::{Error, Result};

/// Per-window scores of one source; windows with a silent reference are
/// entirely missing.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FrameScores {
    pub windows: Vec<MetricScores>,
    /// Windows whose projections needed a regularized solve.
    pub regularized_windows: usize,
}

/// `[start, end)` sample ranges of the evaluation windows. A signal shorter
/// than one window is evaluated as a single window.
pub fn window_bounds(len: usize, sample_rate: u32, config: &MetricConfig) -> Vec<(usize, usize)> {
    let win = ((config.window_length * sample_rate as f64).round() as usize).max(1);
    let hop = ((config.window_hop * sample_rate as f64).round() as usize).max(1);
    if len < win {
        return vec![(0, len)];
    }
    let count = (len - win) / hop + 1;
    (0..count).map(|k| (k * hop, k * hop + win)).collect()
}

/// Scores every estimate against its reference on every window. Estimate
/// `j` is taken to estimate reference `j`.
pub fn framewise_scores(
    references: &[AudioClip],
    estimates: &[AudioClip],
    config: &MetricConfig,
) -> Result<Vec<FrameScores>> {
    config.validate()?;
    if references.is_empty() || references.len() != estimates.len() {
        return Err(Error::InvalidInput(format!(
            "{} references and {} estimates",
            references.len(),
            estimates.len()
        )));
    }
    let first = &references[0];
    if let Some(bad) = references
        .iter()
        .chain(estimates)
        .find(|c| !c.same_shape(first))
    {
        return Err(Error::InvalidInput(format!(
            "misaligned signals: {}x{} versus {}x{}",
            bad.num_channels(),
            bad.len(),
            first.num_channels(),
            first.len()
        )));
    }
    if first.is_empty() {
        return Err(Error::InvalidInput("signals are empty".into()));
    }

    let mut out = vec![FrameScores::default(); references.len()];
    for (start, end) in window_bounds(first.len(), first.sample_rate(), config) {
        let refs: Vec<AudioClip> = references.iter().map(|r| r.slice(start, end)).collect();
        let samples = (end - start) * first.num_channels();
        let active: Vec<bool> = refs
            .iter()
            .map(|r| !config.is_silent(r.energy(), samples))
            .collect();
        if !active.iter().any(|&a| a) {
            out.iter_mut()
                .for_each(|f| f.windows.push(MetricScores::MISSING));
            continue;
        }
        let projector = Projector::new(&refs, config.filter_length)?;
        for (j, frames) in out.iter_mut().enumerate() {
            if !active[j] {
                frames.windows.push(MetricScores::MISSING);
                continue;
            }
            let est = estimates[j].slice(start, end);
            let parts = projector.decompose(j, &est)?;
            if parts.regularized {
                frames.regularized_windows += 1;
            }
            let cap = config.db_cap;
            frames.windows.push(MetricScores {
                si_sdr: si_sdr(&est, &refs[j], cap)?,
                sdr: sdr(&parts, cap),
                sir: sir(&parts, cap),
                isr: isr(&parts, cap),
                sar: sar(&parts, cap),
            });
        }
    }
    Ok(out)
}

/// Median with the mean of the two middle values for even counts.
pub fn median(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let mut v: Vec<f64> = values.into_iter().collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    })
}

/// Per-metric median over the windows that have a value.
pub fn aggregate_song(frames: &FrameScores) -> MetricScores {
    MetricScores::from_fn(|m: Metric| median(frames.windows.iter().filter_map(|w| w.get(m))))
}
