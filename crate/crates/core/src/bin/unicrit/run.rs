//! What a subcommand produces, and the manifest written for every run.

use std::path::Path;

use serde::{Deserialize, Serialize};
use unicrit::io::write_file;
use unicrit::Error;

pub struct Output {
    pub file: String,
    pub bytes: Vec<u8>,
}

impl Output {
    pub fn json(file: &str, value: &impl Serialize) -> Output {
        let mut bytes = serde_json::to_vec_pretty(value).expect("serialisable record");
        bytes.push(b'\n');
        Output { file: file.into(), bytes }
    }

    pub fn text(file: &str, s: String) -> Output {
        Output { file: file.into(), bytes: s.into_bytes() }
    }
}

/// Files to write, a one-line summary for stdout, and how the run ended.
/// Partial outputs may accompany an error.
#[derive(Default)]
pub struct Outcome {
    pub outputs: Vec<Output>,
    pub summary: Option<serde_json::Value>,
    pub error: Option<Error>,
    /// Exit status for non-error verdicts such as a failed identity check.
    pub verdict_code: Option<i32>,
    pub seed: Option<u64>,
    pub notes: serde_json::Map<String, serde_json::Value>,
}

impl Outcome {
    pub fn ok(outputs: Vec<Output>, summary: serde_json::Value) -> Outcome {
        Outcome { outputs, summary: Some(summary), ..Outcome::default() }
    }

    pub fn failed(outputs: Vec<Output>, error: Error) -> Outcome {
        Outcome { outputs, error: Some(error), ..Outcome::default() }
    }

    pub fn exit_code(&self) -> i32 {
        match (&self.error, self.verdict_code) {
            (Some(e), _) => e.exit_code(),
            (None, Some(code)) => code,
            (None, None) => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub file: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub argv: Vec<String>,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub threads: usize,
    pub wall_time_s: f64,
    pub status: String,
    pub exit_code: i32,
    pub error: Option<String>,
    pub outputs: Vec<OutputRecord>,
    pub notes: serde_json::Map<String, serde_json::Value>,
}

pub fn manifest_name(command: &str) -> String {
    format!("{command}.manifest.json")
}

/// Writes every output into `dir`, returning name, digest and size of each.
pub fn write_outputs(dir: &Path, outputs: &[Output]) -> unicrit::Result<Vec<OutputRecord>> {
    outputs
        .iter()
        .map(|o| {
            Ok(OutputRecord {
                file: o.file.clone(),
                sha256: write_file(&dir.join(&o.file), &o.bytes)?,
                bytes: o.bytes.len(),
            })
        })
        .collect()
}
