//! Record formatting: CSV, JSON and aligned text.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use gramq::coherence::Validity;
use gramq::ensemble::format_f64;
use gramq::quantifiers::QuantumnessRecord;
use serde::Serialize;

use crate::{CliError, CliResult, EvalRow};

pub const CSV_HEADER: &str = "ensemble,alpha,z,quantifier,value,method";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Parameters print in shortest round-trip form, values with 17 significant digits.
fn param(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn csv_row(r: &QuantumnessRecord) -> String {
    format!(
        "{},{},{},{},{},{}",
        csv_field(&r.ensemble),
        param(r.alpha),
        param(r.z),
        r.quantifier,
        format_f64(r.value),
        r.method
    )
}

pub fn to_csv<'a>(records: impl IntoIterator<Item = &'a QuantumnessRecord>) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in records {
        s.push_str(&csv_row(r));
        s.push('\n');
    }
    s
}

#[derive(Serialize)]
struct JsonRow<'a> {
    #[serde(flatten)]
    record: &'a QuantumnessRecord,
    unit: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    validity: Option<String>,
}

pub fn to_json(rows: &[EvalRow]) -> String {
    let rows: Vec<JsonRow> = rows
        .iter()
        .map(|r| JsonRow {
            record: &r.record,
            unit: r.record.quantifier.unit(),
            validity: r.validity.map(|v| v.to_string()),
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&rows).expect("records serialize");
    s.push('\n');
    s
}

pub fn to_text(rows: &[EvalRow]) -> String {
    let cells: Vec<[String; 7]> = rows
        .iter()
        .map(|row| {
            let r = &row.record;
            [
                r.ensemble.clone(),
                r.quantifier.to_string(),
                param(r.alpha),
                param(r.z),
                format!("{:.10}", if r.value.abs() < 5e-11 { 0.0 } else { r.value }),
                r.quantifier.unit().to_string(),
                match row.validity {
                    Some(Validity::Outside) => format!("{} (outside)", r.method),
                    _ => r.method.to_string(),
                },
            ]
        })
        .collect();
    let header = ["ensemble", "quantifier", "alpha", "z", "value", "unit", "method"].map(String::from);
    aligned(&header, &cells)
}

pub fn aligned<const N: usize>(header: &[String; N], rows: &[[String; N]]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut s = String::new();
    for r in std::iter::once(header).chain(rows.iter()) {
        let line: Vec<String> = r.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        let _ = writeln!(s, "{}", line.join("  ").trim_end());
    }
    s
}

pub fn render(rows: &[EvalRow], format: Format) -> String {
    match format {
        Format::Json => to_json(rows),
        Format::Csv => to_csv(rows.iter().map(|r| &r.record)),
        Format::Text => to_text(rows),
    }
}

/// Writes to `path`, or stdout when `None`.
pub fn emit(text: &str, path: Option<&Path>) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Input(format!("cannot write to stdout: {e}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use gramq::coherence::AlphaZ;
    use gramq::quantifiers::{Method, Quantifier};

    fn record(value: f64) -> QuantumnessRecord {
        QuantumnessRecord::new("trine", Quantifier::Qaz, Some(AlphaZ::z1(0.15).unwrap()), value, Method::GenericEq3)
            .unwrap()
    }

    #[test]
    fn csv_row_round_trips_the_value() {
        let v = 0.1 + 0.2;
        let line = csv_row(&record(v));
        assert_eq!(line.split(',').nth(1), Some("0.15"));
        let parsed: f64 = line.split(',').nth(4).unwrap().parse().unwrap();
        assert_eq!(parsed, v);
        assert!(line.ends_with(",generic_eq3"));
    }

    #[test]
    fn csv_header_and_quoting() {
        let csv = to_csv([&record(1.0)]);
        assert!(csv.starts_with("ensemble,alpha,z,quantifier,value,method\n"));
        assert_eq!(csv_field("a,b"), "\"a,b\"");
    }

    #[test]
    fn non_alpha_quantifiers_leave_params_empty() {
        let r = QuantumnessRecord::new("bb84", Quantifier::Ql1, None, 1.0, Method::Direct).unwrap();
        assert!(csv_row(&r).starts_with("bb84,,,ql1,"));
    }

    #[test]
    fn text_is_aligned() {
        let rows = vec![EvalRow {
            record: record(0.5),
            validity: Some(Validity::CaseI),
        }];
        let text = to_text(&rows);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0].find("quantifier"), lines[1].find("qaz"));
    }
}
