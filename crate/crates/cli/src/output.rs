use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use crate::args::Command;

/// Writes a CSV file with a header and pre-formatted rows.
pub fn write_csv<I, R>(path: &Path, header: &str, rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: AsRef<str>,
{
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{header}")?;
    for row in rows {
        writeln!(w, "{}", row.as_ref())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Everything needed to re-run a command. Outputs other than the manifest
/// itself are byte-identical across re-runs; only `timings` vary.
#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub invocation: Command,
    /// Values derived at run time, such as the β actually used.
    pub resolved: BTreeMap<String, serde_json::Value>,
    pub outputs: Vec<String>,
    pub timings: BTreeMap<String, f64>,
}

/// Collects output names, resolved parameters and stage timings for one run.
pub struct Run {
    pub dir: PathBuf,
    invocation: Command,
    resolved: BTreeMap<String, serde_json::Value>,
    outputs: Vec<String>,
    timings: BTreeMap<String, f64>,
}

impl Run {
    pub fn start(dir: &Path, invocation: Command) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            invocation,
            resolved: BTreeMap::new(),
            outputs: Vec::new(),
            timings: BTreeMap::new(),
        })
    }

    /// Path of an output file, recorded in the manifest.
    pub fn output(&mut self, name: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        self.outputs.push(name.to_string());
        Ok(path)
    }

    pub fn resolve(&mut self, key: &str, value: impl Serialize) {
        self.resolved.insert(key.to_string(), serde_json::to_value(value).expect("serializable"));
    }

    pub fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings.insert(stage.to_string(), start.elapsed().as_secs_f64());
        out
    }

    pub fn finish(self) -> Result<()> {
        let manifest = RunManifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            invocation: self.invocation,
            resolved: self.resolved,
            outputs: self.outputs,
            timings: self.timings,
        };
        write_json(&self.dir.join("manifest.json"), &manifest)
    }
}

pub fn read_manifest(path: &Path) -> Result<RunManifest> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(serde_json::from_str(&text)?)
}
