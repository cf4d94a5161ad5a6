//! Trial records and the JSONL trial log.

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::bundle::Depiction;
use crate::generate::TreatmentSpec;
use crate::graph::NodeId;
use crate::path::ClickLogEntry;

pub const RECORD_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Completed,
    TimedOut,
    Abandoned,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub schema: u32,
    pub participant: usize,
    pub trial_index: usize,
    pub trial_id: String,
    pub session: usize,
    #[serde(default)]
    pub practice: bool,
    pub depiction: Depiction,
    pub spec: TreatmentSpec,
    pub seed: u64,
    pub source: NodeId,
    pub destination: NodeId,
    pub outcome: Outcome,
    pub elapsed_ms: u64,
    /// 1 iff the path was completed before the time limit.
    pub accuracy: u8,
    pub clicks: Vec<ClickLogEntry>,
}

#[derive(Debug, thiserror::Error)]
pub enum LogError {
    #[error("line {line}: {source}")]
    Parse {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("line {line}: unsupported record schema {schema}")]
    Schema { line: usize, schema: u32 },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Appends one record as a single line.
pub fn append_record<W: Write>(out: &mut W, record: &TrialRecord) -> io::Result<()> {
    let mut line = serde_json::to_vec(record).map_err(io::Error::other)?;
    line.push(b'\n');
    out.write_all(&line)
}

pub fn read_records<R: BufRead>(input: R) -> Result<Vec<TrialRecord>, LogError> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: TrialRecord = serde_json::from_str(&line).map_err(|source| LogError::Parse { line: i + 1, source })?;
        if record.schema != RECORD_SCHEMA {
            return Err(LogError::Schema {
                line: i + 1,
                schema: record.schema,
            });
        }
        out.push(record);
    }
    Ok(out)
}
