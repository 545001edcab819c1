use std::path::{Path, PathBuf};
use std::time::Instant;

use cogrowth::io::{file_digest, write_json, IoError};
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct InputFile {
    pub path: PathBuf,
    pub sha256: String,
}

/// Written next to every output; enough to rerun the command exactly.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'static str,
    pub argv: Vec<String>,
    pub parameters: serde_json::Value,
    pub inputs: Vec<InputFile>,
    pub seeds: Vec<u64>,
    pub outputs: Vec<PathBuf>,
    pub wall_clock_secs: f64,
    pub steps_per_sec: Option<f64>,
}

impl RunManifest {
    pub fn start(subcommand: &'static str, inputs: &[PathBuf]) -> Result<Self, IoError> {
        let inputs = inputs
            .iter()
            .map(|p| {
                Ok(InputFile {
                    path: p.clone(),
                    sha256: file_digest(p)?,
                })
            })
            .collect::<Result<_, IoError>>()?;
        Ok(RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            subcommand,
            argv: std::env::args().collect(),
            parameters: serde_json::Value::Null,
            inputs,
            seeds: Vec::new(),
            outputs: Vec::new(),
            wall_clock_secs: 0.0,
            steps_per_sec: None,
        })
    }

    pub fn finish(&mut self, started: Instant, steps: Option<u64>) {
        self.wall_clock_secs = started.elapsed().as_secs_f64();
        self.steps_per_sec = steps.map(|s| s as f64 / self.wall_clock_secs.max(1e-9));
    }

    pub fn write(&self, path: &Path) -> Result<(), IoError> {
        write_json(path, self)
    }
}
