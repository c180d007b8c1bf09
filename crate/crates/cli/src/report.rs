//! Report rendering. Every report carries the tool version, the tolerance
//! constants and the resolved configuration, and contains nothing that
//! varies between identical runs.

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::ExperimentConfig;

pub const TOOL: &str = "qcantor";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// A flat table for CSV output.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// What a command produced.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub result: Value,
    /// A checked property failed or the verdict is negative.
    pub violation: bool,
    pub table: Table,
    pub notes: Vec<String>,
}

impl Outcome {
    pub fn new(result: impl Serialize, violation: bool, table: Table) -> Self {
        Self {
            result: serde_json::to_value(result).expect("report values serialize"),
            violation,
            table,
            notes: Vec::new(),
        }
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// Outcome of a run stopped by a violated property.
    pub fn violation(detail: String) -> Self {
        let mut table = Table::new(&["error"]);
        table.push(vec![detail.clone()]);
        Self { result: json!({ "error": detail }), violation: true, table, notes: Vec::new() }
    }
}

fn status(outcome: &Outcome) -> &'static str {
    if outcome.violation {
        "violation"
    } else {
        "ok"
    }
}

pub fn render(format: Format, config: &ExperimentConfig, outcome: &Outcome) -> Vec<u8> {
    let config_json = serde_json::to_value(config).expect("config serializes");
    match format {
        Format::Json => {
            let doc = json!({
                "tool": TOOL,
                "version": VERSION,
                "tolerances": { "tol_eig": qcantor::TOL_EIG, "tol_entry": qcantor::TOL_ENTRY },
                "config": config_json,
                "status": status(outcome),
                "notes": outcome.notes,
                "result": outcome.result,
            });
            let mut out = serde_json::to_vec_pretty(&doc).expect("report serializes");
            out.push(b'\n');
            out
        }
        Format::Csv => {
            let mut out = Vec::new();
            out.extend_from_slice(
                format!(
                    "# tool={TOOL} version={VERSION} tol_eig={:e} tol_entry={:e}\n# config={}\n# status={}\n",
                    qcantor::TOL_EIG,
                    qcantor::TOL_ENTRY,
                    config_json,
                    status(outcome)
                )
                .as_bytes(),
            );
            for note in &outcome.notes {
                out.extend_from_slice(format!("# note={note}\n").as_bytes());
            }
            let mut writer = csv::WriterBuilder::new().flexible(true).from_writer(out);
            writer.write_record(&outcome.table.header).expect("in-memory write");
            for row in &outcome.table.rows {
                writer.write_record(row).expect("in-memory write");
            }
            writer.into_inner().expect("in-memory flush")
        }
    }
}
