//! Pearson and Spearman correlation of score tables.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::format::{fixed6_opt, json_fixed6};
use crate::metrics::{Metric, ScoreTable};
use crate::FORMAT_VERSION;

/// Sample Pearson product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::InvalidInput(format!(
            "correlation inputs differ in length: {} and {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "correlation needs at least two pairs, got {n}"
        )));
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation(
            "one of the inputs has zero variance".into(),
        ));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// 1-based ranks with tied values sharing the mean of their positions.
pub fn fractional_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // Positions start+1..=end average to (start + 1 + end) / 2.
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Pearson correlation of fractional ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::InvalidInput(format!(
            "correlation inputs differ in length: {} and {}",
            x.len(),
            y.len()
        )));
    }
    pearson(&fractional_ranks(x), &fractional_ranks(y))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationMethod {
    Pearson,
    Spearman,
}

impl CorrelationMethod {
    pub const ALL: [CorrelationMethod; 2] =
        [CorrelationMethod::Pearson, CorrelationMethod::Spearman];

    pub fn name(self) -> &'static str {
        match self {
            CorrelationMethod::Pearson => "pearson",
            CorrelationMethod::Spearman => "spearman",
        }
    }

    fn apply(self, x: &[f64], y: &[f64]) -> Result<f64> {
        match self {
            CorrelationMethod::Pearson => pearson(x, y),
            CorrelationMethod::Spearman => spearman(x, y),
        }
    }
}

impl fmt::Display for CorrelationMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationCell {
    pub value: Option<f64>,
    /// Songs with a value in both tables.
    pub pairs: usize,
    pub diagnostic: Option<String>,
}

/// Instruments × metrics, once per method.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CorrelationGrid {
    pub instruments: Vec<String>,
    cells: BTreeMap<(CorrelationMethod, String, Metric), CorrelationCell>,
}

#[derive(Serialize)]
struct JsonCell {
    method: CorrelationMethod,
    instrument: String,
    metric: Metric,
    value: Option<Box<RawValue>>,
    pairs: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    diagnostic: Option<String>,
}

#[derive(Serialize)]
struct JsonGrid<'a> {
    format_version: u32,
    #[serde(flatten)]
    metadata: &'a Map<String, Value>,
    cells: Vec<JsonCell>,
}

impl CorrelationGrid {
    pub fn get(
        &self,
        method: CorrelationMethod,
        instrument: &str,
        metric: Metric,
    ) -> Option<&CorrelationCell> {
        self.cells.get(&(method, instrument.to_owned(), metric))
    }

    pub fn cells(
        &self,
    ) -> impl Iterator<Item = (CorrelationMethod, &str, Metric, &CorrelationCell)> {
        self.cells
            .iter()
            .map(|((m, i, k), c)| (*m, i.as_str(), *k, c))
    }

    pub fn missing_cells(&self) -> usize {
        self.cells.values().filter(|c| c.value.is_none()).count()
    }

    /// `method,instrument,si_sdr,sdr,sir,isr,sar`: the Pearson block, then Spearman.
    pub fn to_csv(&self, preamble: &[String]) -> String {
        let mut out = String::new();
        for line in preamble {
            out.push_str(&format!("# {line}\n"));
        }
        out.push_str("method,instrument");
        for m in Metric::ALL {
            out.push(',');
            out.push_str(m.name());
        }
        out.push('\n');
        for method in CorrelationMethod::ALL {
            for inst in &self.instruments {
                out.push_str(method.name());
                out.push(',');
                out.push_str(inst);
                for m in Metric::ALL {
                    out.push(',');
                    out.push_str(&fixed6_opt(self.get(method, inst, m).and_then(|c| c.value)));
                }
                out.push('\n');
            }
        }
        out
    }

    pub fn to_json(&self, metadata: &Map<String, Value>) -> Result<String> {
        let cells = self
            .cells()
            .map(|(method, instrument, metric, c)| JsonCell {
                method,
                instrument: instrument.to_owned(),
                metric,
                value: json_fixed6(c.value),
                pairs: c.pairs,
                diagnostic: c.diagnostic.clone(),
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&JsonGrid {
            format_version: FORMAT_VERSION,
            metadata,
            cells,
        })?;
        s.push('\n');
        Ok(s)
    }
}

/// Correlates two tables song by song, for every instrument in either table
/// and every metric. A cell keeps only songs valued in both tables; cells
/// that cannot be computed are missing and carry a diagnostic.
pub fn correlate_tables(a: &ScoreTable, b: &ScoreTable) -> CorrelationGrid {
    let mut instruments: Vec<String> = a
        .instruments()
        .union(&b.instruments())
        .map(|s| s.to_string())
        .collect();
    instruments.sort();
    let mut cells = BTreeMap::new();
    for inst in &instruments {
        for metric in Metric::ALL {
            let col_a = a.column(inst, metric);
            let col_b = b.column(inst, metric);
            let (x, y): (Vec<f64>, Vec<f64>) = col_a
                .iter()
                .filter_map(|(song, va)| Some(((*va)?, (*col_b.get(song)?)?)))
                .unzip();
            for method in CorrelationMethod::ALL {
                let cell = match method.apply(&x, &y) {
                    Ok(r) => CorrelationCell {
                        value: Some(r),
                        pairs: x.len(),
                        diagnostic: None,
                    },
                    Err(e) => CorrelationCell {
                        value: None,
                        pairs: x.len(),
                        diagnostic: Some(e.to_string()),
                    },
                };
                cells.insert((method, inst.clone(), metric), cell);
            }
        }
    }
    CorrelationGrid { instruments, cells }
}
