//! CSV ingestion, JSON fit reports and curve sampling.
//!
//! CSV is `t,y` per line with an optional `t,y` header, `#` comment lines and
//! a period decimal mark. Reports are JSON with a fixed key order and every
//! floating-point number written with 17 significant digits, so reading a
//! report back yields bit-identical values.

use std::io::{self as stdio, Read, Write};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{build_series, SeriesError, TimeSeries};
use crate::metrics::{FitStatistics, Scored};
use crate::models::{evaluate, ModelError, ParamVector};
use crate::scenarios::{Scenario, ScenarioError};
use crate::solver::{FitResult, Termination};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] stdio::Error),
}

/// Reads a two-column `t,y` series.
pub fn read_csv<R: Read>(source: R) -> Result<TimeSeries, IoError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut first = true;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            IoError::Parse {
                line,
                message: e.to_string(),
            }
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if std::mem::take(&mut first) && record.len() == 2 && &record[0] == "t" && &record[1] == "y"
        {
            continue;
        }
        if record.len() != 2 {
            return Err(IoError::Parse {
                line,
                message: format!("expected 2 fields, found {}", record.len()),
            });
        }
        let field = |i: usize| -> Result<f64, IoError> {
            record[i].parse::<f64>().map_err(|_| IoError::Parse {
                line,
                message: format!("`{}` is not a number", &record[i]),
            })
        };
        times.push(field(0)?);
        values.push(field(1)?);
    }
    Ok(build_series(times, values)?)
}

pub fn read_csv_str(text: &str) -> Result<TimeSeries, IoError> {
    read_csv(text.as_bytes())
}

/// Writes a series as `t,y` rows under a `t,y` header.
pub fn write_series_csv(s: &TimeSeries) -> String {
    let mut out = String::from("t,y\n");
    for (t, y) in s.iter() {
        out.push_str(&format!("{t},{y}\n"));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetInfo {
    /// Source path or scenario id.
    pub source: String,
    pub n: usize,
    pub sst: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub model_id: String,
    pub params: IndexMap<String, f64>,
    pub statistics: FitStatistics,
    pub converged: bool,
    pub termination_reason: Termination,
    pub start_index: usize,
    pub iterations: usize,
}

impl From<&FitResult> for ReportEntry {
    fn from(r: &FitResult) -> Self {
        Self {
            model_id: r.model_id.to_string(),
            params: r.params.to_map(),
            statistics: r.statistics,
            converged: r.converged,
            termination_reason: r.termination,
            start_index: r.start_index,
            iterations: r.iterations,
        }
    }
}

impl Scored for ReportEntry {
    fn model_name(&self) -> &str {
        &self.model_id
    }

    fn statistics(&self) -> &FitStatistics {
        &self.statistics
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub toolkit_version: String,
    pub seed: u64,
    pub dataset: DatasetInfo,
    pub entries: Vec<ReportEntry>,
    pub ranking: Vec<String>,
}

/// Formats every `f64` as `d.dddddddddddddddde±x` (17 significant digits).
struct FullPrecision;

impl serde_json::ser::Formatter for FullPrecision {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> stdio::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }
}

pub fn write_report(report: &Report) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FullPrecision);
    report
        .serialize(&mut ser)
        .expect("in-memory serialization cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

pub fn read_report(text: &str) -> Result<Report, IoError> {
    Ok(serde_json::from_str(text)?)
}

/// Largest grid accepted, in steps.
pub const MAX_GRID_STEPS: usize = 10_000_000;

/// Uniform grid of `steps + 1` points from `t_start` to `t_end` inclusive.
pub fn uniform_grid(t_start: f64, t_end: f64, steps: usize) -> Result<Vec<f64>, IoError> {
    if steps < 2 {
        return Err(IoError::InvalidGrid(format!(
            "need at least 2 steps, got {steps}"
        )));
    }
    if steps > MAX_GRID_STEPS {
        return Err(IoError::InvalidGrid(format!(
            "{steps} steps exceeds the limit of {MAX_GRID_STEPS}"
        )));
    }
    if !(t_start.is_finite() && t_end.is_finite() && t_start < t_end) {
        return Err(IoError::InvalidGrid(format!(
            "need finite t_start < t_end, got {t_start}..{t_end}"
        )));
    }
    let width = t_end - t_start;
    let grid: Vec<f64> = (0..=steps)
        .map(|i| {
            if i == steps {
                t_end
            } else {
                t_start + width * i as f64 / steps as f64
            }
        })
        .collect();
    if !grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(IoError::InvalidGrid(
            "spacing is below floating-point resolution".to_string(),
        ));
    }
    Ok(grid)
}

/// Parses a `start:end:count` grid flag, where count is the number of points.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, IoError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, end, count] = parts.as_slice() else {
        return Err(IoError::InvalidGrid(format!(
            "`{spec}` is not start:end:count"
        )));
    };
    let number = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| IoError::InvalidGrid(format!("`{s}` is not a number")))
    };
    let count: usize = count
        .trim()
        .parse()
        .map_err(|_| IoError::InvalidGrid(format!("`{count}` is not a point count")))?;
    uniform_grid(number(start)?, number(end)?, count.saturating_sub(1))
}

/// Anything that can be evaluated on a time grid.
pub trait Curve {
    fn value_at(&self, t: f64) -> Result<f64, IoError>;
}

impl Curve for ParamVector {
    fn value_at(&self, t: f64) -> Result<f64, IoError> {
        Ok(evaluate(self, t)?)
    }
}

impl Curve for Scenario {
    fn value_at(&self, t: f64) -> Result<f64, IoError> {
        Ok(self.value(t)?)
    }
}

/// Samples a curve as headerless `t,y` rows on `steps + 1` uniform points.
pub fn emit_curve<C: Curve + ?Sized>(
    curve: &C,
    t_start: f64,
    t_end: f64,
    steps: usize,
) -> Result<String, IoError> {
    let grid = uniform_grid(t_start, t_end, steps)?;
    curve_rows(curve, &grid)
}

pub fn curve_rows<C: Curve + ?Sized>(curve: &C, times: &[f64]) -> Result<String, IoError> {
    let mut out = String::new();
    for &t in times {
        let y = curve.value_at(t)?;
        out.push_str(&format!("{t},{y}\n"));
    }
    Ok(out)
}

/// Parses a JSON object of parameter values (`{"a": 1.0, ...}`).
pub fn read_params(model: crate::models::ModelId, text: &str) -> Result<ParamVector, IoError> {
    let map: IndexMap<String, f64> = serde_json::from_str(text)?;
    Ok(ParamVector::from_map(model, &map)?)
}
