use std::io::Write;
use std::path::Path;

use traitfuse::evaluation::{parse_rows, summarize_rows, EvaluationReport, Expectation, MetricRow};
use traitfuse::Mode;

use crate::error::CliError;

fn read_rows(path: &Path, mode: Mode) -> Result<Vec<MetricRow>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    let rows = parse_rows(&text).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    if let Some(row) = rows.iter().find(|r| r.mode != mode) {
        return Err(CliError::data(format!(
            "{}: row {:?} has mode {}, expected {mode}",
            path.display(),
            row.config,
            row.mode
        )));
    }
    Ok(rows)
}

/// `report.csv` and `report.json` into `dir`, or the JSON on stdout.
pub fn write_report(report: &EvaluationReport, dir: Option<&Path>) -> Result<(), CliError> {
    match dir {
        Some(dir) => super::evaluate::write_pair(dir, &report.to_csv(), &report.to_json()),
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{}", report.to_json())?;
            out.flush().map_err(CliError::from)
        }
    }
}

pub fn run(vanilla: &Path, get_aid: &Path, output: Option<&Path>, expect: &[String]) -> Result<(), CliError> {
    let expectations = expect
        .chunks(4)
        .map(|c| {
            let parts: Vec<&str> = c.iter().map(String::as_str).collect();
            Expectation::parse(&parts).map_err(CliError::Usage)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut rows = read_rows(vanilla, Mode::Vanilla)?;
    rows.extend(read_rows(get_aid, Mode::GetAid)?);
    let report = summarize_rows(rows).map_err(CliError::data)?;
    write_report(&report, output)?;

    let mut failures = Vec::new();
    for e in &expectations {
        match e.check(&report) {
            Ok(v) => eprintln!("ok: {e} (observed {v})"),
            Err(err) => {
                eprintln!("FAILED: {err}");
                failures.push(err.to_string());
            }
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Expectation(format!(
            "{} expectation(s) failed",
            failures.len()
        )))
    }
}
