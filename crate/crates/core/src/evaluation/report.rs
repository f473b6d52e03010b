//! Per-configuration accuracy/coverage rows, per-mode means and the
//! vanilla vs trait-adjusted deltas.
//!
//! All report values are percentages. Absolute deltas are in percentage
//! points, relative deltas in percent of the vanilla mean.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{accuracy, coverage, EvalError};
use crate::backends::{DatasetManifest, Task};
use crate::domain::{Decision, FusionParams, Label};
use crate::fusion::Mode;

pub const CSV_HEADER: [&str; 4] = ["config", "mode", "accuracy", "coverage"];

pub struct RunResult {
    pub config_name: String,
    pub mode: Mode,
    /// One per manifest entry, in manifest order.
    pub decisions: Vec<Decision>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub config: String,
    pub mode: Mode,
    pub accuracy: f64,
    pub coverage: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeMeans {
    pub mode: Mode,
    pub accuracy: f64,
    pub coverage: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Delta {
    /// `get_aid - vanilla`, percentage points.
    pub absolute: f64,
    /// `absolute / vanilla * 100`; absent when the vanilla mean is 0.
    pub relative: Option<f64>,
}

impl Delta {
    fn between(vanilla: f64, get_aid: f64) -> Self {
        let absolute = get_aid - vanilla;
        Self {
            absolute,
            relative: (vanilla != 0.0).then(|| absolute / vanilla * 100.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeDeltas {
    pub accuracy: Delta,
    pub coverage: Delta,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub manifest: Option<String>,
    pub task: Option<Task>,
    /// Parameters the decisions were produced with; absent when the rows were
    /// read back from files.
    pub params: Option<FusionParams>,
    pub rows: Vec<MetricRow>,
    pub means: Vec<ModeMeans>,
    pub deltas: Option<ModeDeltas>,
}

impl EvaluationReport {
    pub fn mean(&self, mode: Mode) -> Option<&ModeMeans> {
        self.means.iter().find(|m| m.mode == mode)
    }

    pub fn to_csv(&self) -> String {
        rows_to_csv(&self.rows)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Two decimals, halves rounded up.
pub fn render_percent(x: f64) -> String {
    // nudge absorbs binary representation error on exact decimal halves
    let scaled = (x * 100.0 + 0.5 + 1e-9).floor() / 100.0;
    let s = format!("{scaled:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

pub fn rows_to_csv(rows: &[MetricRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in rows {
        w.write_record([
            r.config.as_str(),
            r.mode.as_str(),
            &render_percent(r.accuracy),
            &render_percent(r.coverage),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

/// Reads rows back from the report CSV format.
pub fn parse_rows(text: &str) -> Result<Vec<MetricRow>, EvalError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| EvalError::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    if header.iter().map(str::trim).ne(CSV_HEADER) {
        return Err(EvalError::Parse {
            line: 1,
            message: format!("expected header {}", CSV_HEADER.join(",")),
        });
    }
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| EvalError::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let bad = |message: String| EvalError::Parse { line, message };
        let config = record[0].trim().to_string();
        if config.is_empty() {
            return Err(bad("empty config name".into()));
        }
        let mode = Mode::from_str(record[1].trim()).map_err(bad)?;
        let pct = |i: usize, name: &str| -> Result<f64, EvalError> {
            let v: f64 = record[i]
                .trim()
                .parse()
                .map_err(|_| bad(format!("{name} {:?} is not a number", &record[i])))?;
            if !(0.0..=100.0).contains(&v) {
                return Err(bad(format!("{name} {v} is not a percentage")));
            }
            Ok(v)
        };
        let accuracy = pct(2, "accuracy")?;
        let coverage = pct(3, "coverage")?;
        rows.push(MetricRow {
            config,
            mode,
            accuracy,
            coverage,
        });
    }
    if rows.is_empty() {
        return Err(EvalError::EmptySet);
    }
    Ok(rows)
}

fn column_mean(rows: &[&MetricRow], f: impl Fn(&MetricRow) -> f64) -> f64 {
    rows.iter().map(|r| f(r)).sum::<f64>() / rows.len() as f64
}

/// Per-mode means and, when both modes are present, the deltas.
///
/// If either mode appears, every config present must have it, otherwise
/// [`EvalError::MissingMode`].
pub fn summarize_rows(rows: Vec<MetricRow>) -> Result<EvaluationReport, EvalError> {
    if rows.is_empty() {
        return Err(EvalError::EmptySet);
    }
    let mut by_config: BTreeMap<&str, Vec<Mode>> = BTreeMap::new();
    for r in &rows {
        by_config.entry(&r.config).or_default().push(r.mode);
    }
    let modes_present: Vec<Mode> = [Mode::Vanilla, Mode::GetAid]
        .into_iter()
        .filter(|m| rows.iter().any(|r| r.mode == *m))
        .collect();
    for (config, modes) in &by_config {
        for m in &modes_present {
            match modes.iter().filter(|x| *x == m).count() {
                1 => {}
                0 => return Err(EvalError::MissingMode(config.to_string(), m.as_str())),
                _ => {
                    return Err(EvalError::ManifestMismatch(format!(
                        "config {config:?} has more than one {m} row"
                    )))
                }
            }
        }
    }

    let means: Vec<ModeMeans> = modes_present
        .iter()
        .map(|&mode| {
            let sel: Vec<&MetricRow> = rows.iter().filter(|r| r.mode == mode).collect();
            ModeMeans {
                mode,
                accuracy: column_mean(&sel, |r| r.accuracy),
                coverage: column_mean(&sel, |r| r.coverage),
            }
        })
        .collect();
    let deltas = match means.as_slice() {
        [v, g] => Some(ModeDeltas {
            accuracy: Delta::between(v.accuracy, g.accuracy),
            coverage: Delta::between(v.coverage, g.coverage),
        }),
        _ => None,
    };
    Ok(EvaluationReport {
        manifest: None,
        task: None,
        params: None,
        rows,
        means,
        deltas,
    })
}

/// Builds the report for `(vanilla, get_aid)` run pairs over one manifest.
pub fn summarize(
    results: &[(RunResult, RunResult)],
    manifest: &DatasetManifest,
) -> Result<EvaluationReport, EvalError> {
    let mut runs = Vec::with_capacity(results.len() * 2);
    for (vanilla, get_aid) in results {
        if vanilla.mode != Mode::Vanilla {
            return Err(EvalError::MissingMode(vanilla.config_name.clone(), "vanilla"));
        }
        if get_aid.mode != Mode::GetAid {
            return Err(EvalError::MissingMode(get_aid.config_name.clone(), "get_aid"));
        }
        runs.push(vanilla);
        runs.push(get_aid);
    }
    summarize_runs(&runs, manifest)
}

/// Like [`summarize`] but accepts any mix of runs, e.g. a single mode.
pub fn summarize_runs(runs: &[&RunResult], manifest: &DatasetManifest) -> Result<EvaluationReport, EvalError> {
    let truths: Vec<Label> = manifest
        .entries
        .iter()
        .map(|e| e.ground_truth)
        .collect::<Option<_>>()
        .ok_or_else(|| EvalError::ManifestMismatch("manifest lacks ground truth".into()))?;
    let mut rows = Vec::with_capacity(runs.len());
    for run in runs {
        rows.push(MetricRow {
            config: run.config_name.clone(),
            mode: run.mode,
            accuracy: accuracy(&run.decisions, &truths)? * 100.0,
            coverage: coverage(&run.decisions, &manifest.params)? * 100.0,
        });
    }
    let mut report = summarize_rows(rows)?;
    report.manifest = Some(manifest.name.clone());
    report.task = Some(manifest.task);
    report.params = Some(manifest.params);
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Accuracy,
    Coverage,
}

/// What an expectation looks at: a mode's mean or one of the deltas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpectTarget {
    Mean(Mode),
    AbsoluteDelta,
    RelativeDelta,
}

/// `(metric, target, value, tolerance)` assertion against a report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Expectation {
    pub metric: Metric,
    pub target: ExpectTarget,
    pub value: f64,
    pub tolerance: f64,
}

impl Expectation {
    /// Parses `metric target value tolerance`, e.g. `coverage get_aid 64.75 0.05`.
    /// Targets: `vanilla`, `get_aid`, `abs_delta`, `rel_delta`.
    pub fn parse(parts: &[&str]) -> Result<Self, String> {
        let [metric, target, value, tolerance] = parts else {
            return Err(format!("expectation needs 4 fields, got {}", parts.len()));
        };
        let metric = match *metric {
            "accuracy" => Metric::Accuracy,
            "coverage" => Metric::Coverage,
            other => return Err(format!("unknown metric {other:?}")),
        };
        let target = match *target {
            "abs_delta" => ExpectTarget::AbsoluteDelta,
            "rel_delta" => ExpectTarget::RelativeDelta,
            m => ExpectTarget::Mean(Mode::from_str(m).map_err(|_| format!("unknown expectation target {m:?}"))?),
        };
        let num = |s: &str, what: &str| -> Result<f64, String> {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("{what} {s:?} is not a finite number"))
        };
        let value = num(value, "value")?;
        let tolerance = num(tolerance, "tolerance")?;
        if tolerance < 0.0 {
            return Err(format!("tolerance {tolerance} is negative"));
        }
        Ok(Self {
            metric,
            target,
            value,
            tolerance,
        })
    }

    pub fn observed(&self, report: &EvaluationReport) -> Option<f64> {
        let pick_delta = |d: &ModeDeltas| match self.metric {
            Metric::Accuracy => d.accuracy,
            Metric::Coverage => d.coverage,
        };
        match self.target {
            ExpectTarget::Mean(mode) => report.mean(mode).map(|m| match self.metric {
                Metric::Accuracy => m.accuracy,
                Metric::Coverage => m.coverage,
            }),
            ExpectTarget::AbsoluteDelta => report.deltas.as_ref().map(|d| pick_delta(d).absolute),
            ExpectTarget::RelativeDelta => report.deltas.as_ref().and_then(|d| pick_delta(d).relative),
        }
    }

    pub fn check(&self, report: &EvaluationReport) -> Result<f64, EvalError> {
        match self.observed(report) {
            Some(v) if (v - self.value).abs() <= self.tolerance => Ok(v),
            Some(v) => Err(EvalError::ExpectationFailed(format!("{self}: observed {v}"))),
            None => Err(EvalError::ExpectationFailed(format!("{self}: not present in report"))),
        }
    }
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let metric = match self.metric {
            Metric::Accuracy => "accuracy",
            Metric::Coverage => "coverage",
        };
        let target = match self.target {
            ExpectTarget::Mean(m) => m.as_str(),
            ExpectTarget::AbsoluteDelta => "abs_delta",
            ExpectTarget::RelativeDelta => "rel_delta",
        };
        write!(f, "{metric} {target} {} ± {}", self.value, self.tolerance)
    }
}
