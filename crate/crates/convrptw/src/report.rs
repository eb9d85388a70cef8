//! Run reports and their aggregation into comparison tables.
//!
//! Every solver run produces a [`RunReport`]: the solution metrics (NV, TT,
//! PTW, LTW), the consistency percentage for update runs, the CPU time, the
//! RNG seed and a parameter echo.  Reports are stored as single JSON
//! documents, and [`aggregate`] turns a batch of them into a table with
//! improvement columns against a named baseline run.  The table renders as
//! aligned text and as CSV; the CSV re-parses to the identical table.

use crate::io::{read_file, write_file, IoError};
use crate::model::SolutionMetrics;
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

pub const REPORT_FORMAT: &str = "convrptw-report";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{field}: {msg}")]
    BadValue { field: String, msg: String },
    #[error("no reports to aggregate")]
    Empty,
    #[error("reports mix instances {a:?} and {b:?}")]
    MixedInstances { a: String, b: String },
    #[error("baseline run {0:?} is not among the reports")]
    UnknownBaseline(String),
    #[error("csv: {0}")]
    Csv(String),
}

fn bad(field: impl Into<String>, msg: impl Into<String>) -> ReportError {
    ReportError::BadValue {
        field: field.into(),
        msg: msg.into(),
    }
}

// ---- run reports ----

/// Metrics of one solver run, in the benchmark vocabulary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    /// Label distinguishing runs of the same instance; baselines are named
    /// by it.
    pub run: String,
    pub instance: String,
    /// Vehicles used.
    pub nv: usize,
    /// Total travel time in hours.
    pub tt_hours: f64,
    /// Total travel distance in metres.
    pub distance_m: i64,
    /// Percentage of visits arriving after the window close.
    pub ptw_pct: f64,
    /// Total lateness as a percentage of total travel time.
    pub ltw_pct: f64,
    /// Percentage of retained customers reassigned to another vehicle;
    /// present on update runs only.
    pub ic_pct: Option<f64>,
    pub cpu_seconds: f64,
    pub seed: u64,
    /// Echo of the parameters the run was started with.
    pub params: String,
}

impl RunReport {
    /// Report for a finished run described by its solution metrics.
    pub fn from_metrics(
        run: impl Into<String>,
        instance: impl Into<String>,
        metrics: &SolutionMetrics,
        ic_pct: Option<f64>,
        cpu_seconds: f64,
        seed: u64,
        params: impl Into<String>,
    ) -> RunReport {
        RunReport {
            run: run.into(),
            instance: instance.into(),
            nv: metrics.nv,
            tt_hours: metrics.travel_time.hours(),
            distance_m: metrics.total_distance.metres(),
            ptw_pct: metrics.ptw_pct,
            ltw_pct: metrics.ltw_pct,
            ic_pct,
            cpu_seconds,
            seed,
            params: params.into(),
        }
    }

    /// Rejects out-of-range percentages, negative times and non-finite
    /// numbers.
    pub fn check(&self) -> Result<(), ReportError> {
        let pct = |field: &str, v: f64| {
            if !(0.0..=100.0).contains(&v) {
                return Err(bad(field, format!("{v} is outside [0, 100]")));
            }
            Ok(())
        };
        pct("ptw_pct", self.ptw_pct)?;
        pct("ltw_pct", self.ltw_pct)?;
        if let Some(ic) = self.ic_pct {
            pct("ic_pct", ic)?;
        }
        if !self.tt_hours.is_finite() || self.tt_hours < 0.0 {
            return Err(bad("tt_hours", format!("{} is invalid", self.tt_hours)));
        }
        if !self.cpu_seconds.is_finite() || self.cpu_seconds < 0.0 {
            return Err(bad("cpu_seconds", format!("{} is invalid", self.cpu_seconds)));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct ReportFile {
    format: String,
    version: u32,
    #[serde(flatten)]
    report: RunReport,
}

pub fn report_to_string(report: &RunReport) -> String {
    let file = ReportFile {
        format: REPORT_FORMAT.into(),
        version: crate::io::FORMAT_VERSION,
        report: report.clone(),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("report serializes");
    text.push('\n');
    text
}

pub fn report_from_str(text: &str) -> Result<RunReport, ReportError> {
    let file: ReportFile = serde_json::from_str(text).map_err(IoError::from)?;
    if file.format != REPORT_FORMAT {
        return Err(bad(
            "format",
            format!("expected {REPORT_FORMAT:?}, got {:?}", file.format),
        ));
    }
    if file.version != crate::io::FORMAT_VERSION {
        return Err(bad("version", format!("unsupported version {}", file.version)));
    }
    file.report.check()?;
    Ok(file.report)
}

pub fn write_report(report: &RunReport, path: &Path) -> Result<(), ReportError> {
    Ok(write_file(path, &report_to_string(report))?)
}

pub fn read_report(path: &Path) -> Result<RunReport, ReportError> {
    report_from_str(&read_file(path)?)
}

// ---- aggregation ----

/// One table line: a run plus its improvement over the baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub report: RunReport,
    /// Vehicle-count improvement over the baseline, percent; positive
    /// means fewer vehicles.
    pub delta_nv_pct: Option<f64>,
    /// Travel-time improvement over the baseline, percent.
    pub delta_tt_pct: Option<f64>,
}

/// Aggregated run table; all rows describe the same instance.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportTable {
    /// Run label the improvement columns compare against, if any.
    pub baseline: Option<String>,
    pub rows: Vec<TableRow>,
}

/// Improvement of `x` over `base` in percent; 0 for a zero baseline.
fn improvement_pct(base: f64, x: f64) -> f64 {
    if base == 0.0 {
        0.0
    } else {
        100.0 * (base - x) / base
    }
}

/// Joins run reports into one table, keeping input order.  With a baseline
/// label, every row gains improvement columns relative to that run (the
/// baseline's own are 0).  Reports over different instances do not compare
/// and are rejected.
pub fn aggregate(
    reports: Vec<RunReport>,
    baseline: Option<&str>,
) -> Result<ReportTable, ReportError> {
    let first = reports.first().ok_or(ReportError::Empty)?;
    for report in &reports {
        report.check()?;
        if report.instance != first.instance {
            return Err(ReportError::MixedInstances {
                a: first.instance.clone(),
                b: report.instance.clone(),
            });
        }
    }
    let base = match baseline {
        None => None,
        Some(label) => Some(
            reports
                .iter()
                .find(|r| r.run == label)
                .cloned()
                .ok_or_else(|| ReportError::UnknownBaseline(label.to_string()))?,
        ),
    };
    let rows = reports
        .into_iter()
        .map(|report| {
            let deltas = base.as_ref().map(|b| {
                (
                    improvement_pct(b.nv as f64, report.nv as f64),
                    improvement_pct(b.tt_hours, report.tt_hours),
                )
            });
            TableRow {
                report,
                delta_nv_pct: deltas.map(|d| d.0),
                delta_tt_pct: deltas.map(|d| d.1),
            }
        })
        .collect();
    Ok(ReportTable {
        baseline: baseline.map(String::from),
        rows,
    })
}

// ---- rendering ----

fn opt_cell(v: Option<f64>, decimals: usize) -> String {
    match v {
        Some(x) => format!("{x:.decimals$}"),
        None => "-".into(),
    }
}

/// Aligned text table; improvement and IC columns appear only when some
/// row carries them.
pub fn render_text(table: &ReportTable) -> String {
    let with_delta = table.baseline.is_some();
    let with_ic = table.rows.iter().any(|r| r.report.ic_pct.is_some());
    let mut head = vec!["run", "instance", "NV", "TT_h", "dist_m", "PTW_pct", "LTW_pct"];
    if with_delta {
        head.push("dNV_pct");
        head.push("dTT_pct");
    }
    if with_ic {
        head.push("IC_pct");
    }
    head.push("CPU_s");
    head.push("seed");

    let mut grid: Vec<Vec<String>> = vec![head.iter().map(|s| s.to_string()).collect()];
    for row in &table.rows {
        let r = &row.report;
        let mut cells = vec![
            r.run.clone(),
            r.instance.clone(),
            r.nv.to_string(),
            format!("{:.3}", r.tt_hours),
            r.distance_m.to_string(),
            format!("{:.1}", r.ptw_pct),
            format!("{:.1}", r.ltw_pct),
        ];
        if with_delta {
            cells.push(opt_cell(row.delta_nv_pct, 1));
            cells.push(opt_cell(row.delta_tt_pct, 1));
        }
        if with_ic {
            cells.push(opt_cell(r.ic_pct, 1));
        }
        cells.push(format!("{:.2}", r.cpu_seconds));
        cells.push(r.seed.to_string());
        grid.push(cells);
    }

    let cols = grid[0].len();
    let widths: Vec<usize> = (0..cols)
        .map(|c| grid.iter().map(|row| row[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &grid {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, w)| format!("{cell:>w$}"))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

const CSV_HEADER: [&str; 14] = [
    "run",
    "instance",
    "nv",
    "tt_hours",
    "distance_m",
    "ptw_pct",
    "ltw_pct",
    "delta_nv_pct",
    "delta_tt_pct",
    "ic_pct",
    "cpu_seconds",
    "seed",
    "params",
    "baseline",
];

/// CSV form of the table.  Floats keep full precision, so the output
/// re-parses to the identical table; the baseline label repeats on every
/// row.
pub fn to_csv(table: &ReportTable) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("csv header writes");
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for row in &table.rows {
        let r = &row.report;
        w.write_record([
            r.run.clone(),
            r.instance.clone(),
            r.nv.to_string(),
            r.tt_hours.to_string(),
            r.distance_m.to_string(),
            r.ptw_pct.to_string(),
            r.ltw_pct.to_string(),
            opt(row.delta_nv_pct),
            opt(row.delta_tt_pct),
            opt(r.ic_pct),
            r.cpu_seconds.to_string(),
            r.seed.to_string(),
            r.params.clone(),
            table.baseline.clone().unwrap_or_default(),
        ])
        .expect("csv row writes");
    }
    String::from_utf8(w.into_inner().expect("csv buffer flushes")).expect("csv is utf-8")
}

/// Parses [`to_csv`] output back into a table.
pub fn table_from_csv(text: &str) -> Result<ReportTable, ReportError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| ReportError::Csv(e.to_string()))?;
    if headers.iter().ne(CSV_HEADER) {
        return Err(ReportError::Csv(format!("unexpected header {headers:?}")));
    }
    let mut rows = Vec::new();
    let mut baseline: Option<String> = None;
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| ReportError::Csv(e.to_string()))?;
        let line = idx + 2;
        let field = |i: usize| record.get(i).unwrap_or("").to_string();
        let num = |i: usize, what: &str| -> Result<f64, ReportError> {
            field(i)
                .parse()
                .map_err(|_| ReportError::Csv(format!("line {line}: bad {what} {:?}", field(i))))
        };
        let opt_num = |i: usize, what: &str| -> Result<Option<f64>, ReportError> {
            let cell = field(i);
            if cell.is_empty() {
                Ok(None)
            } else {
                Ok(Some(num(i, what)?))
            }
        };
        let report = RunReport {
            run: field(0),
            instance: field(1),
            nv: field(2)
                .parse()
                .map_err(|_| ReportError::Csv(format!("line {line}: bad nv {:?}", field(2))))?,
            tt_hours: num(3, "tt_hours")?,
            distance_m: field(4)
                .parse()
                .map_err(|_| ReportError::Csv(format!("line {line}: bad distance {:?}", field(4))))?,
            ptw_pct: num(5, "ptw_pct")?,
            ltw_pct: num(6, "ltw_pct")?,
            ic_pct: opt_num(9, "ic_pct")?,
            cpu_seconds: num(10, "cpu_seconds")?,
            seed: field(11)
                .parse()
                .map_err(|_| ReportError::Csv(format!("line {line}: bad seed {:?}", field(11))))?,
            params: field(12),
        };
        report.check()?;
        let row_baseline = field(13);
        let row_baseline = (!row_baseline.is_empty()).then_some(row_baseline);
        if idx == 0 {
            baseline = row_baseline;
        } else if baseline != row_baseline {
            return Err(ReportError::Csv(format!(
                "line {line}: baseline changes mid-table"
            )));
        }
        rows.push(TableRow {
            report,
            delta_nv_pct: opt_num(7, "delta_nv_pct")?,
            delta_tt_pct: opt_num(8, "delta_tt_pct")?,
        });
    }
    if rows.is_empty() {
        return Err(ReportError::Empty);
    }
    Ok(ReportTable { baseline, rows })
}

// ---- tests ----

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(run: &str, nv: usize, tt_hours: f64) -> RunReport {
        RunReport {
            run: run.into(),
            instance: "C101-10".into(),
            nv,
            tt_hours,
            distance_m: 123_456,
            ptw_pct: 0.0,
            ltw_pct: 0.0,
            ic_pct: None,
            cpu_seconds: 1.25,
            seed: 42,
            params: "ic=1 mu=. lambda=. alpha1=0.5 k_max=3".into(),
        }
    }

    #[test]
    fn baseline_deltas_match_the_hand_computed_improvements() {
        let base = sample("init", 23, 10.0);
        let better = sample("tuned", 16, 8.0);
        let table = aggregate(vec![base, better], Some("init")).unwrap();
        assert_eq!(table.rows[0].delta_nv_pct, Some(0.0));
        assert_eq!(table.rows[0].delta_tt_pct, Some(0.0));
        let dnv = table.rows[1].delta_nv_pct.unwrap();
        assert!((dnv - 100.0 * 7.0 / 23.0).abs() < 1e-12);
        assert_eq!(table.rows[1].delta_tt_pct, Some(20.0));
        // one decimal in the rendered table: 7/23 = 30.4 percent
        let text = render_text(&table);
        assert!(text.contains("30.4"), "missing dNV cell in:\n{text}");
        assert!(text.contains("dNV_pct"));
    }

    #[test]
    fn single_run_renders_without_improvement_columns() {
        let table = aggregate(vec![sample("only", 5, 3.0)], None).unwrap();
        assert_eq!(table.rows.len(), 1);
        assert_eq!(table.rows[0].delta_nv_pct, None);
        let text = render_text(&table);
        assert!(!text.contains("dNV_pct"));
        assert!(!text.contains("IC_pct"));
        assert!(text.contains("C101-10"));
    }

    #[test]
    fn mixed_instances_are_rejected() {
        let mut other = sample("b", 4, 2.0);
        other.instance = "R201-10".into();
        match aggregate(vec![sample("a", 5, 3.0), other], None) {
            Err(ReportError::MixedInstances { a, b }) => {
                assert_eq!(a, "C101-10");
                assert_eq!(b, "R201-10");
            }
            other => panic!("expected mixed-instance error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_baseline_is_rejected() {
        match aggregate(vec![sample("a", 5, 3.0)], Some("missing")) {
            Err(ReportError::UnknownBaseline(label)) => assert_eq!(label, "missing"),
            other => panic!("expected unknown-baseline error, got {other:?}"),
        }
    }

    #[test]
    fn csv_round_trips_to_the_identical_table() {
        let mut update_run = sample("update", 6, 1.0 / 3.0);
        update_run.ic_pct = Some(100.0 / 7.0);
        update_run.ptw_pct = 2.5;
        let runs = vec![sample("init", 7, 5.125), update_run, sample("tuned", 5, 4.0)];
        let table = aggregate(runs, Some("init")).unwrap();
        let csv_text = to_csv(&table);
        let back = table_from_csv(&csv_text).unwrap();
        assert_eq!(table, back);
        // writing again is byte-identical, so reporting is idempotent
        assert_eq!(csv_text, to_csv(&back));

        let plain = aggregate(vec![sample("solo", 3, 2.0)], None).unwrap();
        let back = table_from_csv(&to_csv(&plain)).unwrap();
        assert_eq!(plain, back);
    }

    #[test]
    fn report_file_round_trips_and_checks_ranges() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.report.json");
        let mut report = sample("init", 7, 5.0);
        report.ic_pct = Some(12.5);
        write_report(&report, &path).unwrap();
        assert_eq!(read_report(&path).unwrap(), report);

        report.ptw_pct = 120.0;
        write_report(&report, &path).unwrap();
        match read_report(&path) {
            Err(ReportError::BadValue { field, .. }) => assert_eq!(field, "ptw_pct"),
            other => panic!("expected range error, got {other:?}"),
        }
    }

    #[test]
    fn zero_baseline_values_do_not_divide_by_zero() {
        let base = sample("empty", 0, 0.0);
        let run = sample("later", 2, 1.0);
        let table = aggregate(vec![base, run], Some("empty")).unwrap();
        assert_eq!(table.rows[1].delta_nv_pct, Some(0.0));
        assert_eq!(table.rows[1].delta_tt_pct, Some(0.0));
    }
}
