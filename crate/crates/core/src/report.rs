//! Byte-stable report emission. JSON objects have sorted keys and every
//! float is rounded to 12 significant digits; CSV tables use the same float
//! formatting.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use serde_json::Value;

use crate::dim::{Decomposition, NagataReport};
use crate::heisenberg::DistanceProfile;

pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format {other:?}, expected json or csv")),
        }
    }
}

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits. Non-finite values
/// pass through.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Shortest decimal form of `round_sig(x)`; `inf`, `-inf` and `nan` spelled out.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let r = round_sig(x);
    if r == 0.0 {
        return "0".to_string();
    }
    format!("{r}")
}

fn round_value(value: &mut Value) {
    match value {
        Value::Number(n) if n.is_f64() => {
            if let Some(f) = n.as_f64() {
                *value = serde_json::Number::from_f64(round_sig(f)).map_or(Value::Null, Value::Number);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Serializes to a [`Value`] with rounded floats.
pub fn stable_value<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<Value> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v);
    Ok(v)
}

/// Pretty JSON with sorted keys, rounded floats and a trailing newline.
pub fn to_stable_json<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let mut text = serde_json::to_string_pretty(&stable_value(value)?)?;
    text.push('\n');
    Ok(text)
}

/// Full-precision pretty JSON, for files that must reload to equal objects.
pub fn to_exact_json<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        write_row(&mut out, &self.header);
        for row in &self.rows {
            write_row(&mut out, row);
        }
        out
    }
}

fn write_row(out: &mut String, cells: &[String]) {
    for (i, cell) in cells.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        if cell.contains([',', '"', '\n', '\r']) {
            let _ = write!(out, "\"{}\"", cell.replace('"', "\"\""));
        } else {
            out.push_str(cell);
        }
    }
    out.push('\n');
}

fn join_indices(indices: &[usize]) -> String {
    indices.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

pub fn profile_table(profile: &DistanceProfile) -> Table {
    let mut t = Table::new(["k", "exact_length", "claim1_length", "lower_bound", "ratio"]);
    for row in &profile.rows {
        t.push(vec![
            row.k.to_string(),
            row.exact_length.to_string(),
            row.claim1_length.to_string(),
            format_float(row.lower_bound),
            format_float(row.ratio()),
        ]);
    }
    t
}

/// One row per scale; index lists are space separated.
pub fn nagata_table(reports: &[NagataReport]) -> Table {
    let mut t = Table::new(["n", "r", "verdict", "center", "points", "auxiliaries", "margin"]);
    for rep in reports {
        let verdict = if rep.is_ok() { "ok" } else { "violation" };
        let (center, points, aux) = match &rep.witness {
            Some(w) => (
                w.center.to_string(),
                join_indices(&w.points),
                join_indices(&w.auxiliaries),
            ),
            None => (String::new(), String::new(), String::new()),
        };
        t.push(vec![
            rep.n.to_string(),
            format_float(rep.r),
            verdict.to_string(),
            center,
            points,
            aux,
            format_float(rep.margin),
        ]);
    }
    t
}

/// One row per (part, point) in part order.
pub fn decomposition_table(decomposition: &Decomposition) -> Table {
    let mut t = Table::new(["part", "point"]);
    for (i, part) in decomposition.parts.iter().enumerate() {
        for p in part {
            t.push(vec![i.to_string(), p.to_string()]);
        }
    }
    t
}

/// Flattens any JSON value into `path,value` rows with sorted keys.
pub fn flat_table(value: &Value) -> Table {
    fn walk(prefix: &str, value: &Value, t: &mut Table) {
        match value {
            Value::Object(map) => {
                for (k, v) in map {
                    let path = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    walk(&path, v, t);
                }
            }
            Value::Array(items) if items.iter().all(|v| !v.is_object() && !v.is_array()) => {
                let joined = items.iter().map(scalar).collect::<Vec<_>>().join(" ");
                t.push(vec![prefix.to_string(), joined]);
            }
            Value::Array(items) => {
                for (i, v) in items.iter().enumerate() {
                    walk(&format!("{prefix}.{i}"), v, t);
                }
            }
            other => t.push(vec![prefix.to_string(), scalar(other)]),
        }
    }
    fn scalar(v: &Value) -> String {
        match v {
            Value::Null => String::new(),
            Value::String(s) => s.clone(),
            Value::Number(n) => match n.as_f64() {
                Some(f) if n.is_f64() => format_float(f),
                _ => n.to_string(),
            },
            other => other.to_string(),
        }
    }
    let mut t = Table::new(["key", "value"]);
    walk("", value, &mut t);
    t
}

/// Writes `text` to `path`, or to standard output when `path` is `None`.
pub fn emit(text: &str, path: Option<&Path>) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}
