//! Versioned JSON report envelope.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

pub const SCHEMA: u32 = 1;

/// Everything needed to rerun a command.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub subcommand: &'static str,
    pub args: Vec<String>,
    pub inputs: Vec<PathBuf>,
    pub output: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub rho: Option<String>,
    pub tolerances: BTreeMap<&'static str, f64>,
    pub max_iter: Option<usize>,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(subcommand: &'static str, args: Vec<String>) -> Self {
        Self {
            subcommand,
            args,
            inputs: Vec::new(),
            output: None,
            report: None,
            rho: None,
            tolerances: BTreeMap::new(),
            max_iter: None,
            seed: 0,
        }
    }

    pub fn tolerance(&mut self, name: &'static str, value: f64) -> Result<(), String> {
        if !(value > 0.0) || !value.is_finite() {
            return Err(format!("--{} must be a positive number, got {value}", name.replace('_', "-")));
        }
        self.tolerances.insert(name, value);
        Ok(())
    }
}

#[derive(Serialize)]
struct Envelope<'a, R: Serialize> {
    schema: u32,
    version: &'static str,
    config: &'a RunConfig,
    result: &'a R,
}

/// Writes the report to `config.report`, or to stdout when unset.
pub fn emit<R: Serialize>(config: &RunConfig, result: &R) -> Result<(), String> {
    let env = Envelope {
        schema: SCHEMA,
        version: env!("CARGO_PKG_VERSION"),
        config,
        result,
    };
    let mut text = serde_json::to_string_pretty(&env).map_err(|e| e.to_string())?;
    text.push('\n');
    match &config.report {
        Some(p) => write_file(p, text.as_bytes()),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| format!("stdout: {e}")),
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), String> {
    fs::write(path, bytes).map_err(|e| format!("{}: {e}", path.display()))
}
