//! Batch summary: a directory of analysis JSON rows in, one sorted CSV out.
//!
//! Numbers are copied token for token from the JSON, never re-parsed and
//! re-rounded, so the CSV and its source rows agree bit for bit.

use std::path::Path;

use serde_json::Value;

use crate::analyze::AnalysisReportRow;
use crate::{Result, Stage};
use splitgain::Error;

/// Row ordering in the summary CSV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SortOrder {
    /// Ascending by the smaller training group, ties broken by name.
    #[default]
    MinGroupSize,
    /// By name alone.
    Name,
}

/// The assembled CSV plus a note per skipped input file.
#[derive(Debug, Clone)]
pub struct ReportOutcome {
    pub csv: String,
    /// One message per unreadable or malformed JSON file; such files are
    /// skipped rather than failing the whole report.
    pub warnings: Vec<String>,
}

/// Column order of the CSV; matches the field order of
/// [`AnalysisReportRow`].
const COLUMNS: [&str; 14] = [
    "name",
    "n0",
    "n1",
    "epsilon_hat_split",
    "epsilon_hat_split_soft",
    "epsilon_hat_empirical",
    "upper_bound",
    "lower_bound",
    "tv_estimate",
    "tv_method",
    "disagreement_mean",
    "lambda",
    "omega",
    "vacuous_flags",
];

/// Reads every `.json` file in `dir` as an [`AnalysisReportRow`] and
/// renders the sorted CSV summary. Files that fail to parse are skipped
/// with a warning; a directory yielding no rows at all is an error.
pub fn report_csv(dir: &Path, sort: SortOrder) -> Result<ReportOutcome> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(Error::from)
        .stage("report")?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")))
        .collect();
    paths.sort();

    let mut warnings = Vec::new();
    let mut rows: Vec<(AnalysisReportRow, Value)> = Vec::new();
    for path in &paths {
        match read_row(path) {
            Ok(row) => rows.push(row),
            Err(reason) => warnings.push(format!("skipped {}: {reason}", path.display())),
        }
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput(format!(
            "no readable analysis rows in {}",
            dir.display()
        )))
        .stage("report");
    }

    rows.sort_by(|(a, _), (b, _)| match sort {
        SortOrder::MinGroupSize => a
            .n0
            .min(a.n1)
            .cmp(&b.n0.min(b.n1))
            .then_with(|| a.name.cmp(&b.name)),
        SortOrder::Name => a.name.cmp(&b.name),
    });

    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(COLUMNS).map_err(csv_io).stage("report")?;
    for (_, value) in &rows {
        let record: Vec<String> = COLUMNS.iter().map(|col| cell(&value[*col])).collect();
        writer.write_record(&record).map_err(csv_io).stage("report")?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::from(e.into_error()))
        .stage("report")?;
    let csv = String::from_utf8(bytes).expect("csv output is utf-8");
    Ok(ReportOutcome { csv, warnings })
}

/// A typed parse for validation and sort keys, plus the raw JSON value
/// whose number tokens feed the CSV untouched.
fn read_row(path: &Path) -> std::result::Result<(AnalysisReportRow, Value), String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let row: AnalysisReportRow = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let value: Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    Ok((row, value))
}

fn cell(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        Value::Array(items) => items
            .iter()
            .map(|v| match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            })
            .collect::<Vec<_>>()
            .join(";"),
        other => other.to_string(),
    }
}

fn csv_io(err: csv::Error) -> Error {
    Error::from(std::io::Error::new(std::io::ErrorKind::Other, err))
}
