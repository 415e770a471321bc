//! Tabular output, JSON artifacts and run manifests.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::{io_error, CliError};

pub struct Ctx {
    pub json: bool,
    pub command: &'static str,
    pub started: Instant,
}

impl Ctx {
    /// Prints one JSON line in `--json` mode, the human text otherwise.
    pub fn emit<T: Serialize>(&self, record: &T, human: impl FnOnce() -> String) {
        let line = if self.json { serde_json::to_string(record).expect("serializable record") } else { human() };
        println!("{line}");
    }
}

/// Writes `rows` as CSV to `path`, or to stdout (CSV or JSON-lines) when no path is given.
pub fn write_rows<R: Serialize>(ctx: &Ctx, path: Option<&Path>, rows: &[R]) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let mut w = csv::Writer::from_path(p).map_err(|e| io_error(p, e))?;
            for r in rows {
                w.serialize(r).map_err(|e| io_error(p, e))?;
            }
            w.flush().map_err(|e| io_error(p, e))
        }
        None if ctx.json => {
            let mut out = io::stdout().lock();
            for r in rows {
                let line = serde_json::to_string(r).expect("serializable row");
                writeln!(out, "{line}").map_err(|e| io_error(Path::new("<stdout>"), e))?;
            }
            Ok(())
        }
        None => {
            let mut w = csv::Writer::from_writer(io::stdout().lock());
            for r in rows {
                w.serialize(r).map_err(|e| io_error(Path::new("<stdout>"), e))?;
            }
            w.flush().map_err(|e| io_error(Path::new("<stdout>"), e))
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| io_error(path, e))?;
    fs::write(path, text + "\n").map_err(|e| io_error(path, e))
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    seed: Option<u64>,
    config_hash: String,
    config: &'a Value,
    dim_cap: usize,
    artifacts: Vec<String>,
    wall_time_secs: f64,
}

pub fn config_hash(command: &str, config: &Value) -> String {
    let mut h = Sha256::new();
    h.update(command.as_bytes());
    h.update([0]);
    h.update(serde_json::to_string(config).expect("config is JSON").as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// `<artifact>.manifest.json` next to the first artifact, if any was written.
pub fn manifest_path(artifact: &Path) -> PathBuf {
    let name = artifact.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    artifact.with_file_name(format!("{name}.manifest.json"))
}

pub fn write_manifest(ctx: &Ctx, seed: Option<u64>, config: &Value, artifacts: &[&Path]) -> Result<(), CliError> {
    let Some(first) = artifacts.first() else {
        return Ok(());
    };
    let m = Manifest {
        tool: "steinlab",
        version: env!("CARGO_PKG_VERSION"),
        command: ctx.command,
        seed,
        config_hash: config_hash(ctx.command, config),
        config,
        dim_cap: steinlab::limits::dim_cap(),
        artifacts: artifacts.iter().map(|p| p.display().to_string()).collect(),
        wall_time_secs: ctx.started.elapsed().as_secs_f64(),
    };
    write_json(&manifest_path(first), &m)
}
