use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;

use qbailey_core::catalogue::Params;
use qbailey_core::VerificationReport;

use crate::CliError;

/// Relative `--output` paths are resolved against this directory when set.
pub const OUT_DIR_VAR: &str = "QBAILEY_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// Stdout or a file opened before any work is done, so an unwritable path
/// fails fast.
pub struct Sink {
    target: Option<(PathBuf, File)>,
}

impl Sink {
    pub fn new(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Sink { target: None });
        };
        let path = match std::env::var_os(OUT_DIR_VAR) {
            Some(dir) if path.is_relative() => Path::new(&dir).join(path),
            _ => path.to_path_buf(),
        };
        let file = File::create(&path).map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        })?;
        Ok(Sink {
            target: Some((path, file)),
        })
    }

    pub fn write(self, text: &str) -> Result<(), CliError> {
        match self.target {
            None => {
                print!("{text}");
                Ok(())
            }
            Some((path, mut file)) => file
                .write_all(text.as_bytes())
                .and_then(|_| file.flush())
                .map_err(|source| CliError::Write { path, source }),
        }
    }
}

fn params_text(params: &Params) -> String {
    params
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn millis(r: &VerificationReport) -> f64 {
    r.elapsed.as_secs_f64() * 1e3
}

pub fn reports_text(reports: &[VerificationReport], timings: bool) -> String {
    let mut out = String::new();
    let (mut pass, mut fail, mut trunc) = (0, 0, 0);
    for r in reports {
        match r.status.as_str() {
            "pass" => pass += 1,
            "fail" => fail += 1,
            _ => trunc += 1,
        }
        let mut line = format!("{:<18} {} T={}", r.status.as_str(), r.id, r.order);
        if !r.params.is_empty() {
            line.push_str(&format!(" [{}]", params_text(&r.params)));
        }
        if let Some(k) = r.stabilized_k {
            line.push_str(&format!(" K0={k}"));
        }
        if let Some(m) = &r.first_mismatch {
            let at = m.index.map(|n| format!("n={n}, ")).unwrap_or_default();
            line.push_str(&format!(
                ": first mismatch at {at}q^{}: {} != {}",
                m.exponent, m.lhs, m.rhs
            ));
        }
        if let Some(d) = &r.detail {
            line.push_str(&format!(" ({d})"));
        }
        if timings {
            line.push_str(&format!(" {:.1}ms", millis(r)));
        }
        out.push_str(&line);
        out.push('\n');
    }
    out.push_str(&format!(
        "{} tasks: {pass} pass, {fail} fail, {trunc} truncation-failure\n",
        reports.len()
    ));
    out
}

#[derive(Serialize)]
struct TableRow {
    n: i64,
    lhs: String,
    rhs: String,
    equal: bool,
}

#[derive(Serialize)]
struct ReportOut<'a> {
    #[serde(flatten)]
    report: &'a VerificationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    table: Option<Vec<TableRow>>,
}

fn table_rows(r: &VerificationReport) -> Vec<TableRow> {
    r.table
        .iter()
        .map(|row| TableRow {
            n: row.n,
            lhs: row.lhs.to_string(),
            rhs: row.rhs.to_string(),
            equal: row.equal(),
        })
        .collect()
}

pub fn reports_json(reports: &[VerificationReport], timings: bool, tables: bool) -> String {
    let out: Vec<ReportOut> = reports
        .iter()
        .map(|r| ReportOut {
            report: r,
            elapsed_ms: timings.then(|| millis(r)),
            table: tables.then(|| table_rows(r)),
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&out).expect("reports serialize");
    s.push('\n');
    s
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

/// One summary row per task.
pub fn reports_csv(reports: &[VerificationReport], timings: bool) -> String {
    let mut header = vec![
        "id",
        "params",
        "order",
        "status",
        "stabilized_k",
        "mismatch_index",
        "mismatch_exponent",
        "mismatch_lhs",
        "mismatch_rhs",
    ];
    if timings {
        header.push("elapsed_ms");
    }
    let rows = reports.iter().map(|r| {
        let opt = |v: Option<String>| v.unwrap_or_default();
        let m = r.first_mismatch.as_ref();
        let mut row = vec![
            r.id.clone(),
            params_text(&r.params),
            r.order.to_string(),
            r.status.as_str().to_string(),
            opt(r.stabilized_k.map(|k| k.to_string())),
            opt(m.and_then(|m| m.index).map(|n| n.to_string())),
            opt(m.map(|m| m.exponent.to_string())),
            opt(m.map(|m| m.lhs.to_string())),
            opt(m.map(|m| m.rhs.to_string())),
        ];
        if timings {
            row.push(format!("{:.3}", millis(r)));
        }
        row
    });
    csv_string(&header, rows)
}

/// Coefficient tables of all tasks, concatenated in report order.
pub fn tables_csv(reports: &[VerificationReport]) -> String {
    let rows = reports
        .iter()
        .flat_map(table_rows)
        .map(|t| vec![t.n.to_string(), t.lhs, t.rhs, t.equal.to_string()]);
    csv_string(&["n", "lhs", "rhs", "equal"], rows)
}

pub fn values_text(rows: &[(i64, String)]) -> String {
    rows.iter().map(|(n, v)| format!("{n}\t{v}\n")).collect()
}

pub fn values_csv(rows: &[(i64, String)]) -> String {
    csv_string(
        &["n", "value"],
        rows.iter().map(|(n, v)| vec![n.to_string(), v.clone()]),
    )
}

pub fn values_json(rows: &[(i64, String)]) -> String {
    #[derive(Serialize)]
    struct Row<'a> {
        n: i64,
        value: &'a str,
    }
    let out: Vec<Row> = rows.iter().map(|(n, v)| Row { n: *n, value: v }).collect();
    let mut s = serde_json::to_string_pretty(&out).expect("rows serialize");
    s.push('\n');
    s
}
