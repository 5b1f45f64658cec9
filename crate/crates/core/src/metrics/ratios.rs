//! Energy ratios in dB.

use super::decompose::ErrorComponents;
use crate::audio::AudioClip;
use crate::error::{Error, Result};

/// Energies at or below this fraction of the signal scale are round-off and
/// count as exactly zero.
pub const ROUNDOFF_ENERGY: f64 = 1e-24;

fn energy<'a>(parts: impl IntoIterator<Item = &'a [f64]>) -> f64 {
    parts
        .into_iter()
        .flat_map(|p| p.iter())
        .map(|v| v * v)
        .sum()
}

/// `10 log10(num / den)` clamped to `±cap`, with a zero denominator giving
/// `+cap` and a zero numerator `-cap`. Both zero is undefined.
fn ratio_db(num: f64, den: f64, scale: f64, cap: f64) -> Option<f64> {
    let floor = ROUNDOFF_ENERGY * scale;
    match (num <= floor, den <= floor) {
        (true, true) => None,
        (false, true) => Some(cap),
        (true, false) => Some(-cap),
        (false, false) => Some((10.0 * (num / den).log10()).clamp(-cap, cap)),
    }
}

/// Channel-wise sum of the given component signals, flattened to one energy.
fn combined(c: &ErrorComponents, parts: &[&[Vec<f64>]]) -> f64 {
    (0..c.target.len())
        .map(|ch| {
            (0..c.target[ch].len())
                .map(|n| {
                    let v: f64 = parts.iter().map(|p| p[ch][n]).sum();
                    v * v
                })
                .sum::<f64>()
        })
        .sum()
}

fn scale(c: &ErrorComponents) -> Option<f64> {
    let s = energy(c.target.iter().map(Vec::as_slice));
    if s == 0.0 {
        return None;
    }
    let est = combined(c, &[&c.target, &c.e_spat, &c.e_interf, &c.e_artif]);
    Some(s.max(est))
}

/// Source to distortion ratio.
pub fn sdr(c: &ErrorComponents, db_cap: f64) -> Option<f64> {
    let scale = scale(c)?;
    let num = energy(c.target.iter().map(Vec::as_slice));
    let den = combined(c, &[&c.e_spat, &c.e_interf, &c.e_artif]);
    ratio_db(num, den, scale, db_cap)
}

/// Image to spatial distortion ratio.
pub fn isr(c: &ErrorComponents, db_cap: f64) -> Option<f64> {
    let scale = scale(c)?;
    let num = energy(c.target.iter().map(Vec::as_slice));
    let den = energy(c.e_spat.iter().map(Vec::as_slice));
    ratio_db(num, den, scale, db_cap)
}

/// Source to interference ratio.
pub fn sir(c: &ErrorComponents, db_cap: f64) -> Option<f64> {
    let scale = scale(c)?;
    let num = combined(c, &[&c.target, &c.e_spat]);
    let den = energy(c.e_interf.iter().map(Vec::as_slice));
    ratio_db(num, den, scale, db_cap)
}

/// Source to artifacts ratio.
pub fn sar(c: &ErrorComponents, db_cap: f64) -> Option<f64> {
    let scale = scale(c)?;
    let num = combined(c, &[&c.target, &c.e_spat, &c.e_interf]);
    let den = energy(c.e_artif.iter().map(Vec::as_slice));
    ratio_db(num, den, scale, db_cap)
}

/// Scale-invariant SDR with all channels concatenated into one vector.
///
/// `Ok(None)` for a silent reference; a silent estimate scores `-db_cap`.
pub fn si_sdr(estimate: &AudioClip, reference: &AudioClip, db_cap: f64) -> Result<Option<f64>> {
    if estimate.len() != reference.len() || estimate.num_channels() != reference.num_channels() {
        return Err(Error::InvalidInput(format!(
            "estimate is {}x{}, reference is {}x{}",
            estimate.num_channels(),
            estimate.len(),
            reference.num_channels(),
            reference.len()
        )));
    }
    let ref_energy = reference.energy();
    if ref_energy == 0.0 {
        return Ok(None);
    }
    let est_energy = estimate.energy();
    if est_energy == 0.0 {
        return Ok(Some(-db_cap));
    }
    let dot: f64 = estimate
        .iter_concat()
        .zip(reference.iter_concat())
        .map(|(e, s)| e * s)
        .sum();
    let alpha = dot / ref_energy;
    let (mut target, mut noise) = (0.0, 0.0);
    for (e, s) in estimate.iter_concat().zip(reference.iter_concat()) {
        let t = alpha * s;
        target += t * t;
        noise += (t - e) * (t - e);
    }
    Ok(ratio_db(target, noise, est_energy.max(target), db_cap))
}
