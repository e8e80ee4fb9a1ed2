//! CSV tables with a trailing `#` metadata block.

use crate::config::RunConfig;
use crate::error::CliError;
use sha2::{Digest, Sha256};
use std::io::Write;

pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

/// Shortest decimal that parses back to the same f64.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:?}")
    }
}

pub fn config_hash(cfg: &RunConfig) -> String {
    let digest = Sha256::digest(cfg.canonical().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    #[cfg(test)]
    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn write<W: Write>(&self, cfg: &RunConfig, out: W) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        let mut out = w.into_inner().map_err(|e| CliError::Data(e.to_string()))?;
        writeln!(out, "# lowlying {}", env!("CARGO_PKG_VERSION"))?;
        writeln!(out, "# config-sha256 {}", config_hash(cfg))?;
        for line in cfg.canonical().lines() {
            writeln!(out, "# {line}")?;
        }
        Ok(())
    }

    /// Writes to `cfg.output` or stdout.
    pub fn emit(&self, cfg: &RunConfig) -> Result<(), CliError> {
        match &cfg.output {
            Some(path) => {
                let f = std::fs::File::create(path)
                    .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
                self.write(cfg, std::io::BufWriter::new(f))
            }
            None => self.write(cfg, std::io::stdout().lock()),
        }
    }
}
