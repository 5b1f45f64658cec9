use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use irmsep::analysis::rank_songs;
use irmsep::dataset::{load_song, normalize_loudness};
use irmsep::format::fixed6_opt;
use irmsep::metrics::{summary_to_csv, summary_to_json, DatasetSummary};
use irmsep::{
    aggregate_dataset, aggregate_song, framewise_scores, oracle_separate, AudioClip,
    DatasetManifest, Metric, MetricScores, ScoreTable,
};

use crate::{create_dir, preamble, provenance, write_file, CliError, CliResult, RunConfig};

/// Result of one song: per-instrument scores or the reason it was skipped.
#[derive(Debug, Clone)]
pub struct SongOutcome {
    pub song_id: String,
    pub warnings: Vec<String>,
    pub result: Result<SongScores, String>,
}

#[derive(Debug, Clone)]
pub struct SongScores {
    pub scores: Vec<(String, MetricScores)>,
    pub windows: usize,
    pub regularized_windows: usize,
}

#[derive(Debug, Clone)]
pub struct AnalyzeReport {
    pub table: ScoreTable,
    pub summary: DatasetSummary,
    pub songs: Vec<SongOutcome>,
}

impl AnalyzeReport {
    pub fn succeeded(&self) -> usize {
        self.songs.iter().filter(|s| s.result.is_ok()).count()
    }
}

fn analyze_song(config: &RunConfig, manifest: &DatasetManifest, song_id: &str) -> SongOutcome {
    let mut warnings = Vec::new();
    let result = (|| -> irmsep::Result<SongScores> {
        let loaded = load_song(&manifest.song_dir(song_id), &manifest.instruments)?;
        warnings = loaded.warnings;
        let song = if config.normalize_loudness {
            normalize_loudness(&loaded.song)
        } else {
            loaded.song
        };
        let estimates = oracle_separate(&song, &config.oracle)?;
        let references: Vec<AudioClip> = song.stems().values().cloned().collect();
        let frames = framewise_scores(&references, &estimates, &config.metrics)?;
        Ok(SongScores {
            scores: song
                .instruments()
                .zip(&frames)
                .map(|(inst, f)| (inst.to_owned(), aggregate_song(f)))
                .collect(),
            windows: frames.first().map_or(0, |f| f.windows.len()),
            regularized_windows: frames.iter().map(|f| f.regularized_windows).sum(),
        })
    })();
    SongOutcome {
        song_id: song_id.to_owned(),
        warnings,
        result: result.map_err(|e| e.to_string()),
    }
}

fn load_manifest(config: &RunConfig) -> CliResult<DatasetManifest> {
    let root = Path::new(&config.dataset);
    if !root.is_dir() {
        return Err(CliError::Config(format!(
            "dataset root {} is not a directory",
            root.display()
        )));
    }
    let mut manifest = match &config.manifest {
        Some(path) => DatasetManifest::read(Path::new(path), root)?,
        None => DatasetManifest::discover(root)?,
    };
    if config.instruments.is_empty() {
        manifest.resolve_instruments()?;
    } else {
        manifest.instruments = config.instruments.clone();
    }
    if manifest.instruments.len() < 2 {
        return Err(CliError::Config(format!(
            "need at least two instruments to separate, have [{}]",
            manifest.instruments.join(", ")
        )));
    }
    if manifest.entries.is_empty() {
        return Err(CliError::Config(format!(
            "no songs under {}",
            root.display()
        )));
    }
    Ok(manifest)
}

fn fig2_csv(table: &ScoreTable, lines: &[String]) -> CliResult<String> {
    let mut out = String::new();
    for line in lines {
        writeln!(out, "# {line}").unwrap();
    }
    out.push_str("instrument,rank,song_id,si_sdr\n");
    for inst in table.instruments() {
        let ranking = rank_songs(table, Metric::SiSdr, inst)?;
        for (rank, (song, value)) in ranking.entries.iter().enumerate() {
            writeln!(out, "{inst},{},{song},{}", rank + 1, fixed6_opt(*value)).unwrap();
        }
    }
    Ok(out)
}

fn songs_log(songs: &[SongOutcome], lines: &[String]) -> String {
    let mut out = String::new();
    for line in lines {
        writeln!(out, "# {line}").unwrap();
    }
    for song in songs {
        for w in &song.warnings {
            writeln!(out, "warning {w}").unwrap();
        }
        match &song.result {
            Ok(s) => writeln!(
                out,
                "ok {}: {} windows, {} regularized",
                song.song_id, s.windows, s.regularized_windows
            ),
            Err(e) => writeln!(out, "error {}: {e}", song.song_id),
        }
        .unwrap();
    }
    out
}

/// Scores every song of the dataset and writes scores.csv, scores.json,
/// summary.csv, summary.json, songs.log and optionally fig2.csv.
///
/// Songs that fail are logged and skipped; the command fails only when no
/// song succeeds.
pub fn analyze(config: &RunConfig, fig2: bool) -> CliResult<AnalyzeReport> {
    let manifest = load_manifest(config)?;
    let mut ids: Vec<&str> = manifest
        .entries
        .iter()
        .map(|e| e.song_id.as_str())
        .collect();
    ids.sort_unstable();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start workers: {e}")))?;
    let songs: Vec<SongOutcome> = pool.install(|| {
        ids.par_iter()
            .map(|id| analyze_song(config, &manifest, id))
            .collect()
    });

    let mut table = ScoreTable::new();
    for song in &songs {
        if let Ok(s) = &song.result {
            for (inst, scores) in &s.scores {
                table.insert(&song.song_id, inst, *scores)?;
            }
        }
        for w in &song.warnings {
            eprintln!("warning: {w}");
        }
        if let Err(e) = &song.result {
            eprintln!("error: {}: {e}", song.song_id);
        }
    }
    let summary = aggregate_dataset(&table);

    let mut resolved = config.clone();
    resolved.instruments = manifest.instruments.clone();
    let meta = provenance("analyze", &resolved)?;
    let lines = preamble(&meta);
    create_dir(&config.out)?;
    let out = &config.out;
    write_file(&out.join("scores.csv"), &table.to_csv_string(&lines)?)?;
    write_file(&out.join("scores.json"), &table.to_json(&meta)?)?;
    write_file(&out.join("summary.csv"), &summary_to_csv(&summary, &lines))?;
    write_file(
        &out.join("summary.json"),
        &summary_to_json(&summary, &meta)?,
    )?;
    write_file(&out.join("songs.log"), &songs_log(&songs, &lines))?;
    if fig2 {
        write_file(&out.join("fig2.csv"), &fig2_csv(&table, &lines)?)?;
    }

    let report = AnalyzeReport {
        table,
        summary,
        songs,
    };
    if report.succeeded() == 0 {
        return Err(CliError::Failed(format!(
            "none of {} songs could be analyzed",
            ids.len()
        )));
    }
    Ok(report)
}
