//! Output files. Every file starts with comment lines (`#`) giving the code
//! version, the unit conventions and the resolved configuration.

use std::fs;
use std::path::{Path, PathBuf};

use nanolin::{Error, Result};
use serde::Serialize;

use crate::config::RunConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const UNITS: &str = "config frequencies in Hz; rates and fluxes in 1/s; angular frequencies in rad/s; times in s; lengths in m; temperatures in K";

pub struct Writer {
    dir: PathBuf,
    config_json: String,
    written: Vec<PathBuf>,
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Config(format!("cannot write {}: {e}", path.display()))
}

impl Writer {
    pub fn new(dir: &Path, config: &RunConfig) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            config_json: serde_json::to_string(config).expect("config serializes"),
            written: Vec::new(),
        })
    }

    fn header(&self) -> String {
        format!(
            "# nanolin {VERSION}\n# units: {UNITS}\n# config: {}\n",
            self.config_json
        )
    }

    /// Writes a CSV table under the provenance header.
    pub fn csv(&mut self, name: &str, columns: &[&str], rows: &[Vec<String>]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(columns).map_err(|e| io_error(&path, e))?;
        for r in rows {
            w.write_record(r).map_err(|e| io_error(&path, e))?;
        }
        let body = w.into_inner().map_err(|e| io_error(&path, e))?;
        let mut text = self.header().into_bytes();
        text.extend(body);
        self.put(path, &text)
    }

    /// Writes CSV text produced elsewhere (time series) under the header.
    pub fn raw_csv(&mut self, name: &str, body: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        let text = format!("{}{body}", self.header());
        self.put(path, text.as_bytes())
    }

    /// Writes `{"nanolin": .., "units": .., "config": .., "result": ..}`.
    pub fn json<T: Serialize>(&mut self, name: &str, result: &T) -> Result<PathBuf> {
        let path = self.dir.join(name);
        let doc = serde_json::json!({
            "nanolin": VERSION,
            "units": UNITS,
            "config": serde_json::from_str::<serde_json::Value>(&self.config_json).expect("valid json"),
            "result": result,
        });
        let mut text = serde_json::to_string_pretty(&doc).map_err(|e| io_error(&path, e))?;
        text.push('\n');
        self.put(path, text.as_bytes())
    }

    fn put(&mut self, path: PathBuf, bytes: &[u8]) -> Result<PathBuf> {
        fs::write(&path, bytes).map_err(|e| io_error(&path, e))?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}

pub fn num(v: f64) -> String {
    format!("{v:e}")
}

/// Error document printed on stderr.
pub fn error_json(e: &Error) -> String {
    let (kind, field) = match e {
        Error::InvalidParameter { name, .. } => ("invalid_parameter", Some(name.clone())),
        Error::Config(_) => ("config", None),
        Error::Convergence { .. } => ("convergence", None),
        Error::TraceDrift { .. } | Error::NonFinite { .. } | Error::InvalidState { .. } => ("integration", None),
        Error::Quadrature { .. } => ("quadrature", None),
        _ => ("internal", None),
    };
    serde_json::json!({ "error": { "kind": kind, "field": field, "message": e.to_string() } }).to_string()
}

pub fn usage_json(message: &str) -> String {
    serde_json::json!({ "error": { "kind": "usage", "field": null, "message": message.trim() } }).to_string()
}
