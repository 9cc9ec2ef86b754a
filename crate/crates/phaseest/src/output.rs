//! CSV and JSON emission of campaign summaries.
//!
//! CSV is the primary, plot-ready format; JSON mirrors the same columns.
//! Floats are printed with 12 significant digits so a re-parsed file
//! reproduces every field at the printed precision.

use crate::campaign::CampaignRow;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

pub const CSV_HEADER: &str =
    "scheme,K,N,trials,holevo_std,std_x_sqrtN,std_x_N,mc_stderr,sql,heisenberg,bound,degenerate_count";

/// One emitted row; the field order matches [`CSV_HEADER`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRow {
    pub scheme: String,
    pub k: u32,
    pub n: u64,
    pub trials: u64,
    pub holevo_std: f64,
    pub std_x_sqrtn: f64,
    pub std_x_n: f64,
    pub mc_stderr: f64,
    pub sql: f64,
    pub heisenberg: f64,
    pub bound: Option<f64>,
    pub degenerate_count: u64,
}

/// Flattens a campaign row, labelled with its sweep index `k`.
pub fn output_row(k: u32, row: &CampaignRow) -> OutputRow {
    let n = row.n_resources as f64;
    OutputRow {
        scheme: row.cfg.kind.name().to_string(),
        k,
        n: row.n_resources,
        trials: row.stats.trials as u64,
        holevo_std: row.stats.holevo_std,
        std_x_sqrtn: row.stats.holevo_std * n.sqrt(),
        std_x_n: row.stats.holevo_std * n,
        mc_stderr: row.stats.mc_stderr,
        sql: row.sql,
        heisenberg: row.heisenberg,
        bound: row.bound,
        degenerate_count: row.stats.degenerate_count as u64,
    }
}

fn fmt_f64(x: f64) -> String {
    // 12 significant digits; infinities print as "inf" and re-parse
    format!("{x:.11e}")
}

pub fn to_csv(rows: &[OutputRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let bound = r.bound.map(fmt_f64).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.scheme,
            r.k,
            r.n,
            r.trials,
            fmt_f64(r.holevo_std),
            fmt_f64(r.std_x_sqrtn),
            fmt_f64(r.std_x_n),
            fmt_f64(r.mc_stderr),
            fmt_f64(r.sql),
            fmt_f64(r.heisenberg),
            bound,
            r.degenerate_count,
        );
    }
    out
}

pub fn parse_csv(text: &str) -> Result<Vec<OutputRow>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        _ => return Err("missing or unexpected header".into()),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 12 {
            return Err(format!("line {}: expected 12 fields", i + 2));
        }
        let f = |j: usize| -> Result<f64, String> {
            fields[j]
                .parse()
                .map_err(|e| format!("line {}: field {}: {e}", i + 2, j + 1))
        };
        let u = |j: usize| -> Result<u64, String> {
            fields[j]
                .parse()
                .map_err(|e| format!("line {}: field {}: {e}", i + 2, j + 1))
        };
        rows.push(OutputRow {
            scheme: fields[0].to_string(),
            k: fields[1]
                .parse()
                .map_err(|e| format!("line {}: field 2: {e}", i + 2))?,
            n: u(2)?,
            trials: u(3)?,
            holevo_std: f(4)?,
            std_x_sqrtn: f(5)?,
            std_x_n: f(6)?,
            mc_stderr: f(7)?,
            sql: f(8)?,
            heisenberg: f(9)?,
            bound: if fields[10].is_empty() {
                None
            } else {
                Some(f(10)?)
            },
            degenerate_count: u(11)?,
        });
    }
    Ok(rows)
}

fn round12(x: f64) -> f64 {
    fmt_f64(x).parse().expect("formatted float re-parses")
}

/// JSON mirror of the CSV: same rows, floats rounded to the same 12
/// significant digits the CSV prints.
pub fn to_json(rows: &[OutputRow]) -> String {
    let rounded: Vec<OutputRow> = rows
        .iter()
        .map(|r| OutputRow {
            scheme: r.scheme.clone(),
            k: r.k,
            n: r.n,
            trials: r.trials,
            holevo_std: round12(r.holevo_std),
            std_x_sqrtn: round12(r.std_x_sqrtn),
            std_x_n: round12(r.std_x_n),
            mc_stderr: round12(r.mc_stderr),
            sql: round12(r.sql),
            heisenberg: round12(r.heisenberg),
            bound: r.bound.map(round12),
            degenerate_count: r.degenerate_count,
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&rounded).expect("rows serialize");
    s.push('\n');
    s
}
