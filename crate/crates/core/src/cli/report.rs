//! Artifact files and run manifests.
//!
//! Every command writes `<command>-<space>-<params>.{csv,json}` into the
//! output directory plus `<stem>.manifest.json` echoing the full
//! configuration. Nothing time- or host-dependent goes into these files, so
//! identical configurations give byte-identical artifacts.

use crate::error::{Error, Result};
use crate::space::fmt_num;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

/// Resolved configuration of one run (flags over config file over defaults).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub m: i64,
    pub k: i64,
    pub qtilde: Option<f64>,
    pub rmax: Option<f64>,
    pub dr: Option<f64>,
    pub lmax: Option<f64>,
    pub dlam: Option<f64>,
    pub out: PathBuf,
    pub seed: u64,
    /// Command-specific options as given.
    pub options: BTreeMap<String, serde_json::Value>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a RunConfig,
    artifacts: &'a [String],
}

/// Collects the artifacts of one run.
pub struct Report {
    dir: PathBuf,
    stem: String,
    artifacts: Vec<String>,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

/// Keeps file names portable: lists become `a+b+c`, anything odd becomes `~`.
fn sanitize(s: &str) -> String {
    s.chars()
        .map(|c| match c {
            ',' => '+',
            c if c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '+' | '_') => c,
            _ => '~',
        })
        .collect()
}

/// Compact rendering of a parameter value for file names.
pub fn param(x: f64) -> String {
    fmt_num(x)
}

pub fn params_list(xs: &[f64]) -> String {
    xs.iter().map(|&x| fmt_num(x)).collect::<Vec<_>>().join(",")
}

impl Report {
    pub fn new(cfg: &RunConfig, space_tag: &str, params: &[(&str, String)]) -> Result<Self> {
        fs::create_dir_all(&cfg.out).map_err(|e| io_err(&cfg.out, e))?;
        let mut stem = cfg.command.replace(' ', "-");
        stem.push('-');
        stem.push_str(space_tag);
        for (k, v) in params {
            stem.push('-');
            stem.push_str(&sanitize(&format!("{k}{v}")));
        }
        Ok(Report { dir: cfg.out.clone(), stem, artifacts: Vec::new() })
    }

    fn create(&mut self, suffix: &str) -> Result<BufWriter<File>> {
        let name = format!("{}{suffix}", self.stem);
        let path = self.dir.join(&name);
        let f = File::create(&path).map_err(|e| io_err(&path, e))?;
        self.artifacts.push(name);
        Ok(BufWriter::new(f))
    }

    /// `<stem>.csv`, or `<stem>.<label>.csv` for additional tables. The
    /// metadata lines are written as `#`-prefixed headers.
    pub fn csv(&mut self, label: Option<&str>, meta: &[(&str, String)]) -> Result<BufWriter<File>> {
        let suffix = match label {
            Some(l) => format!(".{l}.csv"),
            None => ".csv".to_string(),
        };
        let mut w = self.create(&suffix)?;
        for (k, v) in meta {
            writeln!(w, "# {k}: {v}")?;
        }
        Ok(w)
    }

    pub fn json<T: Serialize>(&mut self, value: &T) -> Result<()> {
        let mut w = self.create(".json")?;
        serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    /// Writes the manifest and returns the list of artifact paths.
    pub fn finish(mut self, cfg: &RunConfig) -> Result<Vec<PathBuf>> {
        let manifest_name = format!("{}.manifest.json", self.stem);
        let m = Manifest { tool: "drwave", version: env!("CARGO_PKG_VERSION"), config: cfg, artifacts: &self.artifacts };
        let path = self.dir.join(&manifest_name);
        let mut w = BufWriter::new(File::create(&path).map_err(|e| io_err(&path, e))?);
        serde_json::to_writer_pretty(&mut w, &m).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(w)?;
        w.flush()?;
        self.artifacts.push(manifest_name);
        Ok(self.artifacts.iter().map(|a| self.dir.join(a)).collect())
    }
}
