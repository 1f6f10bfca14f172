use std::io::Write;

use serde::Serialize;

use qhe_core::protocols::table2::RowCheck;
use qhe_core::protocols::Protocol1Result;
use qhe_core::selftest::SuiteReport;

/// One row of `search` or `clifford` output. Every field is always present;
/// fields that do not apply to a mode are empty strings or `null`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub mode: &'static str,
    pub seed: u64,
    pub trial: usize,
    /// `x ‖ z` over every key-carrying wire.
    pub ek: String,
    pub y: String,
    pub d: String,
    pub c: String,
    pub encrypted_result: String,
    pub dk: String,
    pub decrypted: String,
    pub verified: bool,
    pub fidelity: Option<f64>,
    pub attempts: Option<usize>,
    pub elapsed_ms: f64,
}

impl RunReport {
    pub fn from_search(seed: u64, trial: usize, r: &Protocol1Result, elapsed_ms: f64) -> Self {
        RunReport {
            mode: "search",
            seed,
            trial,
            ek: r.ek.to_concat().to_string(),
            y: r.y.to_string(),
            d: r.d.to_string(),
            c: r.c.to_string(),
            encrypted_result: r.encrypted_result.to_string(),
            dk: r.dk.to_string(),
            decrypted: r.decrypted.to_string(),
            verified: r.verified,
            fidelity: None,
            attempts: None,
            elapsed_ms,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

fn csv_of<T: Serialize>(rows: &[T]) -> Result<String, Box<dyn std::error::Error>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn json_of<T: Serialize + ?Sized>(value: &T) -> Result<String, Box<dyn std::error::Error>> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

pub fn render_runs(
    rows: &[RunReport],
    format: Format,
) -> Result<String, Box<dyn std::error::Error>> {
    match format {
        Format::Json => json_of(rows),
        Format::Csv => csv_of(rows),
        Format::Table => {
            let mut out = String::new();
            let clifford = rows.first().is_some_and(|r| r.mode == "clifford");
            if clifford {
                out.push_str(
                    "trial  seed  ek        dk            fidelity          attempts  verified\n",
                );
                for r in rows {
                    out.push_str(&format!(
                        "{:<6} {:<5} {:<9} {:<13} {:<17.15} {:<9} {}\n",
                        r.trial,
                        r.seed,
                        r.ek,
                        r.dk,
                        r.fidelity.unwrap_or(f64::NAN),
                        r.attempts.unwrap_or(0),
                        r.verified
                    ));
                }
            } else {
                out.push_str(
                    "trial  ek(x z)   y        d        c        enc  dk  dec  verified\n",
                );
                for r in rows {
                    let half = r.ek.len() / 2;
                    out.push_str(&format!(
                        "{:<6} {} {}  {}  {}  {}  {}   {}  {}   {}\n",
                        r.trial,
                        &r.ek[..half],
                        &r.ek[half..],
                        r.y,
                        r.d,
                        r.c,
                        r.encrypted_result,
                        r.dk,
                        r.decrypted,
                        r.verified
                    ));
                }
            }
            Ok(out)
        }
    }
}

#[derive(Serialize)]
struct Table2Line {
    row: usize,
    pass: bool,
    ek_x: String,
    ek_z: String,
    y: String,
    d: String,
    c: String,
    encrypted_result: String,
    dk: String,
    decrypted: String,
    diff: String,
}

pub fn render_table2(
    checks: &[RowCheck],
    format: Format,
) -> Result<String, Box<dyn std::error::Error>> {
    let lines: Vec<Table2Line> = checks
        .iter()
        .map(|k| Table2Line {
            row: k.row.index,
            pass: k.passed(),
            ek_x: k.row.ek_x.to_string(),
            ek_z: k.row.ek_z.to_string(),
            y: k.row.y.to_string(),
            d: k.row.d.to_string(),
            c: k.row.c.to_string(),
            encrypted_result: k.result.encrypted_result.to_string(),
            dk: k.result.dk.to_string(),
            decrypted: k.result.decrypted.to_string(),
            diff: k
                .diffs
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join("; "),
        })
        .collect();
    match format {
        Format::Json => json_of(&lines),
        Format::Csv => csv_of(&lines),
        Format::Table => {
            let mut out =
                String::from("row  ek(x z)   y        d        c        enc  dk  dec  result\n");
            for l in &lines {
                out.push_str(&format!(
                    "{:<4} {} {}  {}  {}  {}  {}   {}  {}   {}{}\n",
                    l.row,
                    l.ek_x,
                    l.ek_z,
                    l.y,
                    l.d,
                    l.c,
                    l.encrypted_result,
                    l.dk,
                    l.decrypted,
                    if l.pass { "PASS" } else { "FAIL" },
                    if l.diff.is_empty() {
                        String::new()
                    } else {
                        format!(" ({})", l.diff)
                    }
                ));
            }
            Ok(out)
        }
    }
}

pub fn render_suites(
    suites: &[SuiteReport],
    format: Format,
) -> Result<String, Box<dyn std::error::Error>> {
    match format {
        Format::Json => {
            let map: serde_json::Map<String, serde_json::Value> = suites
                .iter()
                .map(|s| {
                    (
                        s.name.to_string(),
                        serde_json::to_value(s).expect("plain struct"),
                    )
                })
                .collect();
            json_of(&serde_json::json!({
                "passed": suites.iter().all(|s| s.passed),
                "suites": map,
            }))
        }
        Format::Csv => csv_of(suites),
        Format::Table => Ok(suites.iter().map(|s| s.line() + "\n").collect()),
    }
}

pub fn emit(text: &str, out: Option<&std::path::Path>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}
