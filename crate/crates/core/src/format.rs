//! Pinned number formatting for serialized tables.

use serde_json::value::RawValue;

/// Six decimals, ties to even, with negative zero printed as `0.000000`.
pub fn fixed6(value: f64) -> String {
    let s = format!("{value:.6}");
    if s == "-0.000000" {
        s[1..].to_owned()
    } else {
        s
    }
}

pub fn fixed6_opt(value: Option<f64>) -> String {
    value.map(fixed6).unwrap_or_default()
}

/// A JSON number token carrying exactly the [`fixed6`] digits, or `None` for null.
pub fn json_fixed6(value: Option<f64>) -> Option<Box<RawValue>> {
    value
        .filter(|v| v.is_finite())
        .map(|v| RawValue::from_string(fixed6(v)).expect("fixed-point decimal is valid JSON"))
}

pub fn parse_opt(cell: &str) -> Result<Option<f64>, std::num::ParseFloatError> {
    let cell = cell.trim();
    if cell.is_empty() {
        Ok(None)
    } else {
        cell.parse().map(Some)
    }
}
