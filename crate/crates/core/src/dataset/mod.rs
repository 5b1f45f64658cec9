//! Multitrack songs: loading, loudness equalization and mixing.
//!
//! On disk a song is a directory `<root>/<song_id>/` holding one WAV file per
//! instrument (`vocals.wav`, `drums.wav`, ...) and optionally `mixture.wav`.
//! Stem files are matched to labels by file stem, ignoring case.

mod manifest;
mod wav;

use std::fs;
use std::path::{Path, PathBuf};

use indexmap::IndexMap;

pub use manifest::{DatasetManifest, ManifestEntry, Split};
pub use wav::{read_wav, write_wav, write_wav_pcm16};

use crate::audio::AudioClip;
use crate::error::{Error, Result};

/// The only sample rate accepted from disk.
pub const NATIVE_SAMPLE_RATE: u32 = 44_100;

/// File stem reserved for the mixture.
pub const MIXTURE_LABEL: &str = "mixture";

/// Stems below this RMS are treated as silent by [`normalize_loudness`].
pub const SILENT_RMS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct MultitrackSong {
    song_id: String,
    stems: IndexMap<String, AudioClip>,
    mixture: Option<AudioClip>,
}

fn shape_of(clip: &AudioClip) -> String {
    format!(
        "{} ch x {} samples @ {} Hz",
        clip.num_channels(),
        clip.len(),
        clip.sample_rate()
    )
}

impl MultitrackSong {
    pub fn new(
        song_id: impl Into<String>,
        stems: IndexMap<String, AudioClip>,
        mixture: Option<AudioClip>,
    ) -> Result<Self> {
        let song_id = song_id.into();
        if stems.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "song `{song_id}` has {} stem(s), at least two are required",
                stems.len()
            )));
        }
        let first = stems[0].clone();
        let misaligned = stems.values().any(|c| !c.same_shape(&first))
            || mixture.as_ref().is_some_and(|m| !m.same_shape(&first));
        if misaligned {
            let mut details: Vec<String> = stems
                .iter()
                .map(|(k, c)| format!("{k}: {}", shape_of(c)))
                .collect();
            if let Some(m) = &mixture {
                details.push(format!("{MIXTURE_LABEL}: {}", shape_of(m)));
            }
            return Err(Error::Alignment {
                song_id,
                details: details.join("; "),
            });
        }
        Ok(Self {
            song_id,
            stems,
            mixture,
        })
    }

    pub fn song_id(&self) -> &str {
        &self.song_id
    }

    pub fn stems(&self) -> &IndexMap<String, AudioClip> {
        &self.stems
    }

    pub fn stem(&self, instrument: &str) -> Option<&AudioClip> {
        self.stems.get(instrument)
    }

    pub fn instruments(&self) -> impl Iterator<Item = &str> {
        self.stems.keys().map(String::as_str)
    }

    pub fn mixture(&self) -> Option<&AudioClip> {
        self.mixture.as_ref()
    }

    pub fn len(&self) -> usize {
        self.stems[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn num_channels(&self) -> usize {
        self.stems[0].num_channels()
    }

    pub fn sample_rate(&self) -> u32 {
        self.stems[0].sample_rate()
    }

    /// Replaces one stem with silence and drops the now-stale mixture.
    pub fn with_muted(&self, instrument: &str) -> Result<Self> {
        let stem = self.stem(instrument).ok_or_else(|| {
            Error::InvalidInput(format!(
                "song `{}` has no stem `{instrument}`",
                self.song_id
            ))
        })?;
        let silent = AudioClip::silence(stem.num_channels(), stem.len(), stem.sample_rate())?;
        let mut stems = self.stems.clone();
        stems[instrument] = silent;
        Ok(Self {
            song_id: self.song_id.clone(),
            stems,
            mixture: None,
        })
    }
}

/// Warnings raised while loading a song that did not prevent it from loading.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedSong {
    pub song: MultitrackSong,
    pub warnings: Vec<String>,
}

/// `(lowercased file stem, path)` of every `.wav` file in `dir`, sorted.
pub(crate) fn wav_files(dir: &Path) -> Result<Vec<(String, PathBuf)>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let is_wav = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("wav"));
        if path.is_file() && is_wav {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                out.push((stem.to_ascii_lowercase(), path));
            }
        }
    }
    out.sort();
    Ok(out)
}

fn read_native(path: &Path) -> Result<AudioClip> {
    let clip = read_wav(path)?;
    if clip.sample_rate() != NATIVE_SAMPLE_RATE {
        return Err(Error::UnsupportedAudio {
            path: path.to_path_buf(),
            reason: format!(
                "sample rate {} Hz, expected {NATIVE_SAMPLE_RATE} Hz",
                clip.sample_rate()
            ),
        });
    }
    Ok(clip)
}

/// Loads `<dir>/<instrument>.wav` for every expected instrument, in the given
/// order, plus `mixture.wav` when present.
pub fn load_song(dir: &Path, expected_instruments: &[String]) -> Result<LoadedSong> {
    let song_id = dir
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or_default()
        .to_owned();
    let expected: Vec<String> = expected_instruments
        .iter()
        .map(|s| s.to_ascii_lowercase())
        .collect();
    if expected.iter().any(|s| s == MIXTURE_LABEL) {
        return Err(Error::InvalidInput(format!(
            "`{MIXTURE_LABEL}` is reserved and cannot be an instrument label"
        )));
    }

    let files = wav_files(dir)?;
    let find = |label: &str| files.iter().find(|(l, _)| l == label).map(|(_, p)| p);
    let mut used = Vec::new();
    let mut stems = IndexMap::new();
    for inst in &expected {
        let path = find(inst).ok_or_else(|| Error::MissingStem {
            song_id: song_id.clone(),
            instrument: inst.clone(),
            dir: dir.to_path_buf(),
        })?;
        stems.insert(inst.clone(), read_native(path)?);
        used.push(path.clone());
    }
    let mixture = match find(MIXTURE_LABEL) {
        Some(path) => {
            used.push(path.clone());
            Some(read_native(path)?)
        }
        None => None,
    };

    let mut entries: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| !used.contains(p))
        .collect();
    entries.sort();
    let warnings: Vec<String> = entries
        .iter()
        .map(|p| {
            let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("?");
            format!("{song_id}: ignoring unexpected entry `{name}`")
        })
        .collect();
    for w in &warnings {
        log::warn!("{w}");
    }

    Ok(LoadedSong {
        song: MultitrackSong::new(song_id, stems, mixture)?,
        warnings,
    })
}

/// Rescales every non-silent stem to the mean RMS of the non-silent stems.
///
/// The result carries no mixture, since any stored mixture no longer matches
/// the rescaled stems.
pub fn normalize_loudness(song: &MultitrackSong) -> MultitrackSong {
    let rms: Vec<f64> = song.stems.values().map(AudioClip::rms).collect();
    let active: Vec<f64> = rms.iter().copied().filter(|&r| r >= SILENT_RMS).collect();
    let stems = if active.is_empty() {
        song.stems.clone()
    } else {
        let target = active.iter().sum::<f64>() / active.len() as f64;
        song.stems
            .iter()
            .zip(&rms)
            .map(|((label, clip), &r)| {
                let clip = if r >= SILENT_RMS {
                    clip.scaled(target / r)
                } else {
                    clip.clone()
                };
                (label.clone(), clip)
            })
            .collect()
    };
    MultitrackSong {
        song_id: song.song_id.clone(),
        stems,
        mixture: None,
    }
}

/// Sets the mixture to the plain sample-wise sum of the stems.
pub fn make_mixture(song: &MultitrackSong) -> Result<MultitrackSong> {
    let mut stems = song.stems.values();
    let first = stems.next().expect("songs have at least two stems").clone();
    let mixture = stems.try_fold(first, |acc, s| acc.try_add(s))?;
    Ok(MultitrackSong {
        mixture: Some(mixture),
        ..song.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    fn song(stems: Vec<(&str, AudioClip)>) -> MultitrackSong {
        MultitrackSong::new(
            "s",
            stems.into_iter().map(|(k, v)| (k.to_owned(), v)).collect(),
            None,
        )
        .unwrap()
    }

    fn constant(value: f64, len: usize) -> AudioClip {
        AudioClip::mono(vec![value; len], 44_100).unwrap()
    }

    #[test]
    fn needs_two_aligned_stems() {
        let a = constant(0.1, 10);
        let one: IndexMap<_, _> = [("a".to_owned(), a.clone())].into_iter().collect();
        assert!(MultitrackSong::new("s", one, None).is_err());
        let ragged: IndexMap<_, _> = [("a".to_owned(), a), ("b".to_owned(), constant(0.1, 9))]
            .into_iter()
            .collect();
        let err = MultitrackSong::new("s", ragged, None).unwrap_err();
        match err {
            Error::Alignment { details, .. } => assert!(details.contains("b: 1 ch x 9 samples")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn normalize_to_mean_rms() {
        let s = normalize_loudness(&song(vec![
            ("a", constant(0.1, 8)),
            ("b", constant(0.3, 8)),
        ]));
        for clip in s.stems().values() {
            assert!((clip.rms() - 0.2).abs() < 1e-15);
        }
    }

    #[test]
    fn normalize_leaves_equal_and_silent_stems() {
        let equal = song(vec![("a", constant(0.2, 8)), ("b", constant(-0.2, 8))]);
        let n = normalize_loudness(&equal);
        for (x, y) in n.stems().values().zip(equal.stems().values()) {
            assert!(x.max_abs_diff(y) < 1e-12);
        }
        let with_silence = song(vec![("a", constant(0.0, 8)), ("b", constant(0.2, 8))]);
        let n = normalize_loudness(&with_silence);
        assert_eq!(n.stem("a"), with_silence.stem("a"));
        assert!(
            n.stem("b")
                .unwrap()
                .max_abs_diff(with_silence.stem("b").unwrap())
                < 1e-15
        );
    }

    #[test]
    fn normalize_is_idempotent() {
        let s = song(vec![
            ("a", synth::white_noise(2, 500, 44_100, 1)),
            ("b", synth::white_noise(2, 500, 44_100, 2).scaled(3.0)),
        ]);
        let once = normalize_loudness(&s);
        let twice = normalize_loudness(&once);
        for (x, y) in once.stems().values().zip(twice.stems().values()) {
            assert!(x.max_abs_diff(y) < 1e-12);
        }
    }

    #[test]
    fn mixture_is_plain_sum() {
        let x = synth::white_noise(2, 300, 44_100, 4);
        let cancel = make_mixture(&song(vec![("a", x.clone()), ("b", x.scaled(-1.0))])).unwrap();
        assert!(cancel.mixture().unwrap().iter_concat().all(|v| v == 0.0));

        let zero = AudioClip::silence(2, 300, 44_100).unwrap();
        let single = make_mixture(&song(vec![("a", x.clone()), ("b", zero)])).unwrap();
        assert_eq!(single.mixture().unwrap(), &x);

        let stems: Vec<_> = (0..3)
            .map(|k| synth::white_noise(2, 300, 44_100, 10 + k))
            .collect();
        let three = make_mixture(&song(vec![
            ("a", stems[0].clone()),
            ("b", stems[1].clone()),
            ("c", stems[2].clone()),
        ]))
        .unwrap();
        let mix = three.mixture().unwrap();
        for c in 0..2 {
            for n in 0..300 {
                let sum = stems[0].channel(c)[n] + stems[1].channel(c)[n] + stems[2].channel(c)[n];
                assert!((mix.channel(c)[n] - sum).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn mixture_commutes_with_scaling() {
        let a = synth::white_noise(1, 200, 44_100, 20);
        let b = synth::white_noise(1, 200, 44_100, 21);
        let scaled = make_mixture(&song(vec![("a", a.scaled(2.5)), ("b", b.scaled(2.5))])).unwrap();
        let plain = make_mixture(&song(vec![("a", a), ("b", b)])).unwrap();
        let lhs = scaled.mixture().unwrap();
        let rhs = plain.mixture().unwrap().scaled(2.5);
        assert!(lhs.max_abs_diff(&rhs) < 1e-15);
    }

    #[test]
    fn muting_replaces_stem_with_silence() {
        let s = make_mixture(&song(vec![
            ("a", synth::white_noise(1, 100, 44_100, 1)),
            ("b", synth::white_noise(1, 100, 44_100, 2)),
        ]))
        .unwrap();
        let muted = s.with_muted("b").unwrap();
        assert_eq!(muted.stem("b").unwrap().energy(), 0.0);
        assert_eq!(muted.stem("a"), s.stem("a"));
        assert!(muted.mixture().is_none());
        assert!(s.with_muted("c").is_err());
    }
}
