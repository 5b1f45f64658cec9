//! Dataset manifests: one `song_id<TAB>split` line per song.
//!
//! Blank lines and `#` comments are ignored, except for an optional
//! directive naming the instrument set:
//!
//! ```text
//! # instruments: vocals,drums,bass
//! song-001<TAB>train
//! song-002<TAB>test
//! ```

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{wav_files, MIXTURE_LABEL};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Valid,
    Test,
    /// Songs found by directory discovery rather than listed in a manifest.
    Unspecified,
}

impl Split {
    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Valid => "valid",
            Split::Test => "test",
            Split::Unspecified => "unspecified",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "train" => Ok(Split::Train),
            "valid" | "validation" | "val" => Ok(Split::Valid),
            "test" => Ok(Split::Test),
            "unspecified" => Ok(Split::Unspecified),
            other => Err(Error::Parse(format!("unknown split `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub song_id: String,
    pub split: Split,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetManifest {
    pub root: PathBuf,
    pub entries: Vec<ManifestEntry>,
    /// Declared stem labels; empty when neither declared nor inferred.
    pub instruments: Vec<String>,
}

const INSTRUMENTS_DIRECTIVE: &str = "instruments:";

fn parse_label_list(list: &str) -> Vec<String> {
    list.split(',')
        .map(|s| s.trim().to_ascii_lowercase())
        .filter(|s| !s.is_empty())
        .collect()
}

impl DatasetManifest {
    pub fn parse(text: &str, root: impl Into<PathBuf>) -> Result<Self> {
        let mut entries = Vec::new();
        let mut instruments = Vec::new();
        let mut seen = BTreeSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            if let Some(comment) = line.trim_start().strip_prefix('#') {
                if let Some(list) = comment.trim_start().strip_prefix(INSTRUMENTS_DIRECTIVE) {
                    instruments = parse_label_list(list);
                }
                continue;
            }
            let (song_id, split) = line.split_once('\t').ok_or_else(|| {
                Error::Parse(format!(
                    "manifest line {}: expected `song_id<TAB>split`",
                    lineno + 1
                ))
            })?;
            let song_id = song_id.trim();
            if song_id.is_empty() {
                return Err(Error::Parse(format!(
                    "manifest line {}: empty song id",
                    lineno + 1
                )));
            }
            let split = split
                .parse()
                .map_err(|e| Error::Parse(format!("manifest line {}: {e}", lineno + 1)))?;
            if !seen.insert(song_id.to_owned()) {
                return Err(Error::Parse(format!(
                    "manifest line {}: duplicate song id `{song_id}`",
                    lineno + 1
                )));
            }
            entries.push(ManifestEntry {
                song_id: song_id.to_owned(),
                split,
            });
        }
        Ok(Self {
            root: root.into(),
            entries,
            instruments,
        })
    }

    pub fn read(path: &Path, root: impl Into<PathBuf>) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, root)
    }

    /// Every subdirectory of `root` becomes a song with an unspecified split.
    pub fn discover(root: &Path) -> Result<Self> {
        let mut ids = Vec::new();
        for entry in fs::read_dir(root).map_err(|e| Error::io(root, e))? {
            let entry = entry.map_err(|e| Error::io(root, e))?;
            if entry.path().is_dir() {
                if let Some(name) = entry.file_name().to_str() {
                    ids.push(name.to_owned());
                }
            }
        }
        ids.sort();
        Ok(Self {
            root: root.to_path_buf(),
            entries: ids
                .into_iter()
                .map(|song_id| ManifestEntry {
                    song_id,
                    split: Split::Unspecified,
                })
                .collect(),
            instruments: Vec::new(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if !self.instruments.is_empty() {
            out.push_str(&format!("# instruments: {}\n", self.instruments.join(",")));
        }
        for e in &self.entries {
            out.push_str(&format!("{}\t{}\n", e.song_id, e.split));
        }
        out
    }

    pub fn song_dir(&self, song_id: &str) -> PathBuf {
        self.root.join(song_id)
    }

    pub fn songs_in(&self, split: Split) -> impl Iterator<Item = &str> {
        self.entries
            .iter()
            .filter(move |e| e.split == split)
            .map(|e| e.song_id.as_str())
    }

    /// Fills `instruments` from the stems of the first listed song when the
    /// manifest does not declare them.
    pub fn resolve_instruments(&mut self) -> Result<&[String]> {
        if self.instruments.is_empty() {
            let first = self
                .entries
                .first()
                .ok_or_else(|| Error::InvalidInput("manifest lists no songs".into()))?;
            let dir = self.song_dir(&first.song_id);
            self.instruments = wav_files(&dir)?
                .into_iter()
                .map(|(label, _)| label)
                .filter(|label| label != MIXTURE_LABEL)
                .collect();
            if self.instruments.is_empty() {
                return Err(Error::InvalidInput(format!(
                    "no stems found in {}",
                    dir.display()
                )));
            }
        }
        Ok(&self.instruments)
    }

    /// Songs whose directory lacks a declared stem, one message per problem.
    pub fn verify(&self) -> Vec<String> {
        let mut problems = Vec::new();
        for e in &self.entries {
            let dir = self.song_dir(&e.song_id);
            match wav_files(&dir) {
                Ok(files) => {
                    for inst in &self.instruments {
                        if !files.iter().any(|(label, _)| label == inst) {
                            problems.push(format!("{}: missing stem `{inst}`", e.song_id));
                        }
                    }
                }
                Err(err) => problems.push(format!("{}: {err}", e.song_id)),
            }
        }
        problems
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_entries_and_directive() {
        let m = DatasetManifest::parse(
            "# instruments: Vocals, drums\n\na\ttrain\r\nb\tvalidation\n# note\nc\ttest\n",
            "/data",
        )
        .unwrap();
        assert_eq!(m.instruments, vec!["vocals", "drums"]);
        let splits: Vec<_> = m.entries.iter().map(|e| e.split).collect();
        assert_eq!(splits, vec![Split::Train, Split::Valid, Split::Test]);
        assert_eq!(m.songs_in(Split::Train).collect::<Vec<_>>(), vec!["a"]);
        let again = DatasetManifest::parse(&m.to_text(), "/data").unwrap();
        assert_eq!(again, m);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(DatasetManifest::parse("a train\n", "/").is_err());
        assert!(DatasetManifest::parse("a\tholdout\n", "/").is_err());
        assert!(DatasetManifest::parse("a\ttrain\na\ttest\n", "/").is_err());
        assert!(DatasetManifest::parse("\ttrain\n", "/").is_err());
    }
}
