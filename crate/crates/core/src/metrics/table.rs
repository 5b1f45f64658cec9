//! Per-song score tables and their CSV/JSON forms.
//!
//! CSV columns are `song_id,instrument,si_sdr,sdr,sir,isr,sar`, values in dB
//! with six decimals and empty cells for missing scores. Lines starting with
//! `#` before the header carry run metadata and are skipped on read. The
//! JSON form mirrors the rows with `null` for missing scores.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use serde_json::{Map, Value};

use super::framewise::median;
use super::{Metric, MetricScores};
use crate::error::{Error, Result};
use crate::format::{fixed6_opt, json_fixed6, parse_opt};
use crate::FORMAT_VERSION;

pub const CSV_HEADER: [&str; 7] = [
    "song_id",
    "instrument",
    "si_sdr",
    "sdr",
    "sir",
    "isr",
    "sar",
];

/// Per-song median scores keyed by `(song_id, instrument)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoreTable {
    rows: BTreeMap<(String, String), MetricScores>,
}

/// Per-instrument dataset medians.
pub type DatasetSummary = BTreeMap<String, MetricScores>;

#[derive(Serialize)]
struct JsonRow<'a> {
    song_id: &'a str,
    instrument: &'a str,
    si_sdr: Option<Box<RawValue>>,
    sdr: Option<Box<RawValue>>,
    sir: Option<Box<RawValue>>,
    isr: Option<Box<RawValue>>,
    sar: Option<Box<RawValue>>,
}

#[derive(Serialize)]
struct JsonDoc<'a, R> {
    format_version: u32,
    #[serde(flatten)]
    metadata: &'a Map<String, Value>,
    rows: Vec<R>,
}

#[derive(Deserialize)]
struct JsonRowIn {
    song_id: String,
    instrument: String,
    #[serde(flatten)]
    scores: MetricScores,
}

#[derive(Deserialize)]
struct JsonDocIn {
    rows: Vec<JsonRowIn>,
}

impl ScoreTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, song_id: &str, instrument: &str, scores: MetricScores) -> Result<()> {
        let key = (song_id.to_owned(), instrument.to_owned());
        if self.rows.contains_key(&key) {
            return Err(Error::InvalidInput(format!(
                "duplicate row for song `{song_id}`, instrument `{instrument}`"
            )));
        }
        self.rows.insert(key, scores);
        Ok(())
    }

    pub fn get(&self, song_id: &str, instrument: &str) -> Option<&MetricScores> {
        self.rows.get(&(song_id.to_owned(), instrument.to_owned()))
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rows in `(song_id, instrument)` order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, &MetricScores)> {
        self.rows
            .iter()
            .map(|((s, i), v)| (s.as_str(), i.as_str(), v))
    }

    pub fn instruments(&self) -> BTreeSet<&str> {
        self.rows.keys().map(|(_, i)| i.as_str()).collect()
    }

    pub fn songs(&self) -> BTreeSet<&str> {
        self.rows.keys().map(|(s, _)| s.as_str()).collect()
    }

    /// `song_id → value` for one instrument and metric, including missing values.
    pub fn column(&self, instrument: &str, metric: Metric) -> BTreeMap<&str, Option<f64>> {
        self.rows
            .iter()
            .filter(|((_, i), _)| i == instrument)
            .map(|((s, _), v)| (s.as_str(), v.get(metric)))
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W, preamble: &[String]) -> Result<()> {
        let mut out = out;
        for line in preamble {
            writeln!(out, "# {line}").map_err(|e| Error::io("<csv>", e))?;
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(CSV_HEADER)?;
        for (song, inst, scores) in self.iter() {
            let mut record = vec![song.to_owned(), inst.to_owned()];
            record.extend(Metric::ALL.iter().map(|&m| fixed6_opt(scores.get(m))));
            w.write_record(&record)?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    pub fn to_csv_string(&self, preamble: &[String]) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf, preamble)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(input);
        let headers = r.headers()?.clone();
        let position = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::Parse(format!("score table lacks column `{name}`")))
        };
        let song_col = position("song_id")?;
        let inst_col = position("instrument")?;
        let metric_cols: Vec<(Metric, usize)> = Metric::ALL
            .iter()
            .map(|&m| position(m.name()).map(|p| (m, p)))
            .collect::<Result<_>>()?;
        let mut table = Self::new();
        for (lineno, record) in r.records().enumerate() {
            let record = record?;
            let cell = |i: usize| record.get(i).unwrap_or("");
            let mut scores = MetricScores::MISSING;
            for &(m, col) in &metric_cols {
                let value = parse_opt(cell(col)).map_err(|e| {
                    Error::Parse(format!("row {}: column {}: {e}", lineno + 1, m.name()))
                })?;
                scores.set(m, value);
            }
            table.insert(cell(song_col), cell(inst_col), scores)?;
        }
        Ok(table)
    }

    pub fn to_json(&self, metadata: &Map<String, Value>) -> Result<String> {
        let rows = self
            .iter()
            .map(|(song_id, instrument, s)| JsonRow {
                song_id,
                instrument,
                si_sdr: json_fixed6(s.si_sdr),
                sdr: json_fixed6(s.sdr),
                sir: json_fixed6(s.sir),
                isr: json_fixed6(s.isr),
                sar: json_fixed6(s.sar),
            })
            .collect();
        let doc = JsonDoc {
            format_version: FORMAT_VERSION,
            metadata,
            rows,
        };
        let mut s = serde_json::to_string_pretty(&doc)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: JsonDocIn = serde_json::from_str(text)?;
        let mut table = Self::new();
        for row in doc.rows {
            table.insert(&row.song_id, &row.instrument, row.scores)?;
        }
        Ok(table)
    }

    /// Reads a `.json` or CSV score table, chosen by extension.
    pub fn read_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let is_json = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            Self::from_json_str(&text)
        } else {
            Self::read_csv(text.as_bytes())
        }
    }
}

/// Per-instrument, per-metric median over the songs that have a value.
pub fn aggregate_dataset(table: &ScoreTable) -> DatasetSummary {
    table
        .instruments()
        .into_iter()
        .map(|inst| {
            let scores =
                MetricScores::from_fn(|m| median(table.column(inst, m).into_values().flatten()));
            (inst.to_owned(), scores)
        })
        .collect()
}

/// `instrument,si_sdr,sdr,sir,isr,sar` rows of a dataset summary.
pub fn summary_to_csv(summary: &DatasetSummary, preamble: &[String]) -> String {
    let mut out = String::new();
    for line in preamble {
        out.push_str(&format!("# {line}\n"));
    }
    out.push_str("instrument");
    for m in Metric::ALL {
        out.push(',');
        out.push_str(m.name());
    }
    out.push('\n');
    for (inst, scores) in summary {
        out.push_str(inst);
        for m in Metric::ALL {
            out.push(',');
            out.push_str(&fixed6_opt(scores.get(m)));
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct JsonSummaryRow<'a> {
    instrument: &'a str,
    si_sdr: Option<Box<RawValue>>,
    sdr: Option<Box<RawValue>>,
    sir: Option<Box<RawValue>>,
    isr: Option<Box<RawValue>>,
    sar: Option<Box<RawValue>>,
}

pub fn summary_to_json(summary: &DatasetSummary, metadata: &Map<String, Value>) -> Result<String> {
    let rows = summary
        .iter()
        .map(|(instrument, s)| JsonSummaryRow {
            instrument,
            si_sdr: json_fixed6(s.si_sdr),
            sdr: json_fixed6(s.sdr),
            sir: json_fixed6(s.sir),
            isr: json_fixed6(s.isr),
            sar: json_fixed6(s.sar),
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&JsonDoc {
        format_version: FORMAT_VERSION,
        metadata,
        rows,
    })?;
    s.push('\n');
    Ok(s)
}
