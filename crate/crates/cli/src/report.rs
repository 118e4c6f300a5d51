//! CSV and JSON persistence of verification reports.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use suita_core::verify::{fmt_num, Check, Status, VerificationReport};

use crate::error::{CliError, Result};

pub const CSV_HEADER: &str = "check_name,domain,pole,params,lhs,rhs,margin,pass";

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format {s:?}, expected csv or json")),
        }
    }
}

impl Format {
    /// `json` for a `.json` extension, otherwise `csv`.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

/// One line of the CSV report. Numbers are kept as printed, so `nan` and
/// `inf` survive a round trip.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub check_name: String,
    pub domain: String,
    pub pole: String,
    pub params: String,
    pub lhs: String,
    pub rhs: String,
    pub margin: String,
    pub pass: String,
}

fn status_str(s: Status) -> &'static str {
    match s {
        Status::Pass => "true",
        Status::Fail => "false",
        Status::Skipped => "skipped",
    }
}

impl From<&Check> for ReportRow {
    fn from(c: &Check) -> Self {
        Self {
            check_name: c.name.clone(),
            domain: c.context.domain.clone(),
            pole: c.context.pole.clone(),
            params: c.context.params.clone(),
            lhs: fmt_num(c.lhs),
            rhs: fmt_num(c.rhs),
            margin: fmt_num(c.margin),
            pass: status_str(c.status).into(),
        }
    }
}

pub fn rows(report: &VerificationReport) -> Vec<ReportRow> {
    report.checks.iter().map(ReportRow::from).collect()
}

pub fn to_csv(report: &VerificationReport) -> Result<String> {
    rows_to_csv(&rows(report))
}

pub fn rows_to_csv(rows: &[ReportRow]) -> Result<String> {
    if rows.is_empty() {
        return Ok(format!("{CSV_HEADER}\n"));
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
}

pub fn parse_csv(text: &str) -> Result<Vec<ReportRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers()?.iter().collect::<Vec<_>>().join(",");
    if header != CSV_HEADER {
        return Err(CliError::Usage(format!("unexpected report header {header:?}")));
    }
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

/// Replaces every number by its 12-significant-digit value. Object keys are
/// sorted because `serde_json::Map` is a `BTreeMap`.
fn round_numbers(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            fmt_num(x).parse::<f64>().ok().and_then(serde_json::Number::from_f64).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_numbers).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_numbers(v))).collect()),
        other => other,
    }
}

pub fn to_json(report: &VerificationReport) -> Result<String> {
    let value = round_numbers(serde_json::to_value(report)?);
    Ok(serde_json::to_string_pretty(&value)? + "\n")
}

pub fn render(report: &VerificationReport, format: Format) -> Result<String> {
    match format {
        Format::Csv => to_csv(report),
        Format::Json => to_json(report),
    }
}

pub fn emit_report(report: &VerificationReport, path: &Path, format: Format) -> Result<()> {
    fs::write(path, render(report, format)?).map_err(|e| CliError::io(path, e))
}
