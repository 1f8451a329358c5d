//! Versioned JSON documents for experiment reports and reference summaries,
//! plus the per-replicate CSV table.
//!
//! Floats are written in shortest round-trip decimal form and parsed with
//! correct rounding, so every number reproduces the in-memory value exactly.
//! `generated_at` is the only field that differs between two runs of the
//! same configuration.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::harness::{
    Aggregates, ExperimentConfig, ExperimentReport, ReferenceSummary, ReplicateRecord,
    SkippedReplicate, Verdict,
};

pub const REPORT_SCHEMA: &str = "geomrand.report/1";
pub const REFERENCE_SCHEMA: &str = "geomrand.reference/1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema `{found}`, expected `{expected}`")]
    Schema {
        expected: &'static str,
        found: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: String,
    pub tool_version: String,
    pub generated_at: String,
    pub config: ExperimentConfig,
    pub verdict: Verdict,
    pub aggregates: Aggregates,
    pub reference: Option<ReferenceSummary>,
    pub records: Vec<ReplicateRecord>,
    pub skipped: Vec<SkippedReplicate>,
}

impl ReportDocument {
    pub fn new(report: ExperimentReport, generated_at: String) -> Self {
        let ExperimentReport {
            mut config,
            records,
            skipped,
            aggregates,
            reference,
            verdict,
        } = report;
        config.threads = None;
        Self {
            schema_version: REPORT_SCHEMA.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            generated_at,
            config,
            verdict,
            aggregates,
            reference,
            records,
            skipped,
        }
    }

    pub fn into_report(self) -> ExperimentReport {
        ExperimentReport {
            config: self.config,
            records: self.records,
            skipped: self.skipped,
            aggregates: self.aggregates,
            reference: self.reference,
            verdict: self.verdict,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report documents contain only finite numbers")
    }

    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        check_schema(text, REPORT_SCHEMA)?;
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceDocument {
    pub schema_version: String,
    pub tool_version: String,
    pub generated_at: String,
    pub summary: ReferenceSummary,
}

impl ReferenceDocument {
    pub fn new(summary: ReferenceSummary, generated_at: String) -> Self {
        Self {
            schema_version: REFERENCE_SCHEMA.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            generated_at,
            summary,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reference documents contain only finite numbers")
    }

    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        check_schema(text, REFERENCE_SCHEMA)?;
        Ok(serde_json::from_str(text)?)
    }
}

fn check_schema(text: &str, expected: &'static str) -> Result<(), DocumentError> {
    #[derive(Deserialize)]
    struct Header {
        schema_version: String,
    }
    let header: Header = serde_json::from_str(text)?;
    if header.schema_version != expected {
        return Err(DocumentError::Schema {
            expected,
            found: header.schema_version,
        });
    }
    Ok(())
}

pub fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

pub const RECORDS_HEADER: &str =
    "index,seed,mu_hat,kappa_hat,n_gaps,distance_eq5,distance_arclength";

/// One row per fitted replicate, in replicate order. An empty `seed` cell
/// marks an external stream.
pub fn write_records_csv<W: Write>(mut out: W, records: &[ReplicateRecord]) -> io::Result<()> {
    writeln!(out, "{RECORDS_HEADER}")?;
    for r in records {
        let seed = r.seed.map(|s| s.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{:?},{:?},{},{:?},{:?}",
            r.index, seed, r.mu_hat, r.kappa_hat, r.n_gaps, r.distance_eq5, r.distance_arclength
        )?;
    }
    out.flush()
}
