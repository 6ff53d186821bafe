//! The record schema shared by every command, and its JSON Lines and CSV
//! encodings.

use std::io::Write;

use serde::Serialize;

use sineq_core::serde_ext::{extended, extended_opt};
use sineq_core::verify::{Row, Verdict};

use crate::config::{Format, RunConfig};

/// Bumped whenever a column is added, removed or changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

/// One output line. `seed` and `samples` are the run settings, which with
/// the command line are enough to reproduce the record; `method` says what
/// actually produced the value.
#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub schema_version: u32,
    pub command: &'static str,
    pub index: u64,
    pub subject: String,
    pub check: String,
    pub t: Option<f64>,
    #[serde(serialize_with = "extended")]
    pub value: f64,
    pub std_error: f64,
    #[serde(serialize_with = "extended_opt")]
    pub reference: Option<f64>,
    #[serde(serialize_with = "extended_opt")]
    pub margin: Option<f64>,
    pub verdict: Option<&'static str>,
    pub method: String,
    pub seed: u64,
    pub samples: u64,
    pub tolerance: f64,
    pub holds: Option<u64>,
    pub violated: Option<u64>,
    pub inconclusive: Option<u64>,
    pub trivial: Option<u64>,
}

impl Record {
    pub fn new(run: &RunConfig, index: u64, subject: String, check: &str, value: f64) -> Self {
        Record {
            schema_version: SCHEMA_VERSION,
            command: run.command,
            index,
            subject,
            check: check.to_string(),
            t: None,
            value,
            std_error: 0.0,
            reference: None,
            margin: None,
            verdict: None,
            method: String::new(),
            seed: run.seed,
            samples: run.samples,
            tolerance: 0.0,
            holds: None,
            violated: None,
            inconclusive: None,
            trivial: None,
        }
    }

    pub fn from_row(run: &RunConfig, index: u64, row: Row) -> Self {
        Record {
            t: row.t,
            std_error: row.std_error,
            reference: Some(row.reference),
            margin: Some(row.margin),
            verdict: Some(row.verdict.as_str()),
            method: row.method,
            tolerance: row.tolerance,
            ..Record::new(run, index, row.body, &row.check, row.value)
        }
    }

    pub fn is_violation(&self) -> bool {
        self.verdict == Some(Verdict::Violated.as_str())
    }
}

pub fn write_records<W: Write>(records: &[Record], format: Format, out: W) -> std::io::Result<()> {
    match format {
        Format::Json => {
            let mut out = std::io::BufWriter::new(out);
            for r in records {
                serde_json::to_writer(&mut out, r)?;
                out.write_all(b"\n")?;
            }
            out.flush()
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in records {
                w.serialize(r).map_err(std::io::Error::other)?;
            }
            w.flush()
        }
    }
}
