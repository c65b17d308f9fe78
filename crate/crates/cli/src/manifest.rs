use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

/// Record of one command invocation, written next to its artifacts.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Value,
    pub artifacts: Vec<PathBuf>,
    pub versions: BTreeMap<&'static str, &'static str>,
    pub wall_time_seconds: f64,
    pub exit_status: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub run: Value,
}

impl RunManifest {
    pub fn new<P: Serialize>(command: &str, parameters: &P) -> Self {
        let versions = BTreeMap::from([("compacton-cli", env!("CARGO_PKG_VERSION")), ("compacton-core", compacton::VERSION)]);
        Self {
            command: command.into(),
            parameters: serde_json::to_value(parameters).unwrap_or(Value::Null),
            artifacts: Vec::new(),
            versions,
            wall_time_seconds: 0.0,
            exit_status: 0,
            error: None,
            run: Value::Null,
        }
    }

    pub fn finish(mut self, started: Instant, path: &Path, outcome: &Result<(), CliError>) -> Result<(), CliError> {
        self.wall_time_seconds = started.elapsed().as_secs_f64();
        if let Err(e) = outcome {
            self.exit_status = e.code;
            self.error = Some(e.msg.clone());
        }
        compacton::io::write_json(path, &self)?;
        Ok(())
    }
}

/// `dir/run.csv` → `dir/run.csv.run.json`.
pub fn manifest_for(artifact: &Path) -> PathBuf {
    let mut s = artifact.as_os_str().to_owned();
    s.push(".run.json");
    PathBuf::from(s)
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value).map_err(|e| CliError::runtime(e.to_string()))
}

/// Print `value` as JSON, or write it to `out` with a run manifest.
pub fn emit<T: Serialize, P: Serialize>(command: &str, params: &P, value: &T, out: Option<&Path>, started: Instant) -> Result<(), CliError> {
    let text = to_json(value)?;
    match out {
        None => {
            println!("{text}");
            Ok(())
        }
        Some(path) => {
            std::fs::write(path, text + "\n").map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))?;
            let mut m = RunManifest::new(command, params);
            m.artifacts.push(path.to_path_buf());
            m.finish(started, &manifest_for(path), &Ok(()))
        }
    }
}
