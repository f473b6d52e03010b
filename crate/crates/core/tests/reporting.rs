//! Summary arithmetic over the published per-backbone benchmark columns.
//! Expected means are the column sums divided by 12, computed by hand.

use traitfuse::evaluation::{parse_rows, summarize_rows, EvaluationReport, MetricRow};
use traitfuse::Mode;

fn load(task: &str) -> EvaluationReport {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");
    let mut rows: Vec<MetricRow> = Vec::new();
    for mode in ["vanilla", "get_aid"] {
        let text = std::fs::read_to_string(format!("{dir}/{task}_{mode}.csv")).unwrap();
        rows.extend(parse_rows(&text).unwrap());
    }
    summarize_rows(rows).unwrap()
}

fn assert_close(actual: f64, expected: f64, tol: f64, what: &str) {
    assert!((actual - expected).abs() <= tol, "{what}: {actual} vs {expected}");
}

#[test]
fn child_labour_summary() {
    let r = load("child_labour");
    assert_eq!(r.rows.len(), 24);
    let v = r.mean(Mode::Vanilla).unwrap();
    let g = r.mean(Mode::GetAid).unwrap();
    assert_close(v.accuracy, 693.0 / 12.0, 1e-9, "vanilla accuracy");
    assert_close(v.coverage, 628.0 / 12.0, 1e-9, "vanilla coverage");
    assert_close(g.accuracy, 648.0 / 12.0, 1e-9, "get_aid accuracy");
    assert_close(g.coverage, 777.0 / 12.0, 1e-9, "get_aid coverage");
    let d = r.deltas.unwrap();
    assert_close(d.coverage.absolute, 149.0 / 12.0, 1e-9, "coverage gain");
    assert_close(
        d.coverage.relative.unwrap(),
        149.0 / 628.0 * 100.0,
        1e-9,
        "relative coverage gain",
    );
    assert_close(d.accuracy.absolute, -45.0 / 12.0, 1e-9, "accuracy change");
}

#[test]
fn displaced_populations_summary() {
    let r = load("displaced_populations");
    let v = r.mean(Mode::Vanilla).unwrap();
    let g = r.mean(Mode::GetAid).unwrap();
    assert_close(v.accuracy, 801.0 / 12.0, 1e-9, "vanilla accuracy");
    assert_close(v.coverage, 352.0 / 12.0, 1e-9, "vanilla coverage");
    assert_close(g.accuracy, 735.0 / 12.0, 1e-9, "get_aid accuracy");
    assert_close(g.coverage, 553.4 / 12.0, 1e-9, "get_aid coverage");
    let d = r.deltas.unwrap();
    assert_close(d.coverage.absolute, 201.4 / 12.0, 1e-9, "coverage gain");
    assert_close(
        d.coverage.relative.unwrap(),
        201.4 / 352.0 * 100.0,
        1e-9,
        "relative coverage gain",
    );
}

#[test]
fn rendered_means_match_two_decimal_figures() {
    use traitfuse::evaluation::render_percent;
    let cl = load("child_labour");
    assert_eq!(render_percent(cl.mean(Mode::Vanilla).unwrap().coverage), "52.33");
    assert_eq!(render_percent(cl.mean(Mode::GetAid).unwrap().coverage), "64.75");
    assert_eq!(render_percent(cl.deltas.unwrap().coverage.absolute), "12.42");
    assert_eq!(render_percent(cl.deltas.unwrap().coverage.relative.unwrap()), "23.73");
    let dp = load("displaced_populations");
    assert_eq!(render_percent(dp.mean(Mode::Vanilla).unwrap().coverage), "29.33");
    assert_eq!(render_percent(dp.mean(Mode::GetAid).unwrap().coverage), "46.12");
    assert_eq!(render_percent(dp.deltas.unwrap().coverage.absolute), "16.78");
    assert_eq!(render_percent(dp.deltas.unwrap().coverage.relative.unwrap()), "57.22");
}
