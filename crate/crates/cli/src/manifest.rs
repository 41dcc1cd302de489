//! Output directory handling and the per-command run manifest.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    pub args: Vec<String>,
    pub config: String,
    pub config_digest: String,
    pub seed: u64,
    /// Fully resolved settings (steps, population, episodes, ...).
    pub settings: Value,
    pub started: String,
    pub finished: String,
    pub status: String,
    pub outputs: Vec<OutputEntry>,
}

pub fn timestamp() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

/// Write `contents` to `path` through a temporary sibling and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("output");
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })
}

/// Collects the files a command writes and finally its manifest.
#[derive(Debug)]
pub struct Outputs {
    dir: PathBuf,
    entries: Vec<OutputEntry>,
    started: String,
}

impl Outputs {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::runtime(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            entries: Vec::new(),
            started: timestamp(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write(&mut self, name: &str, contents: impl AsRef<[u8]>) -> Result<PathBuf, CliError> {
        let contents = contents.as_ref();
        let path = self.path(name);
        write_atomic(&path, contents).map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))?;
        self.entries.retain(|e| e.path != name);
        self.entries.push(OutputEntry {
            path: name.to_string(),
            bytes: contents.len() as u64,
            sha256: hex::encode(Sha256::digest(contents)),
        });
        Ok(path)
    }

    pub fn entries(&self) -> &[OutputEntry] {
        &self.entries
    }

    /// Write `<name>.manifest.json` listing everything written so far.
    pub fn finish(self, name: &str, manifest: ManifestInfo, ok: bool) -> Result<PathBuf, CliError> {
        let m = RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: manifest.command,
            args: manifest.args,
            config: manifest.config,
            config_digest: manifest.config_digest,
            seed: manifest.seed,
            settings: manifest.settings,
            started: self.started,
            finished: timestamp(),
            status: if ok { "ok" } else { "failed" }.to_string(),
            outputs: self.entries,
        };
        let path = self.dir.join(format!("{name}.manifest.json"));
        let text = serde_json::to_string_pretty(&m).expect("manifest serializes");
        write_atomic(&path, text.as_bytes())
            .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }
}

/// The parts of a manifest a command supplies.
#[derive(Clone, Debug)]
pub struct ManifestInfo {
    pub command: String,
    pub args: Vec<String>,
    pub config: String,
    pub config_digest: String,
    pub seed: u64,
    pub settings: Value,
}
