//! Atomic output files and the per-run manifest.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::failure::Failure;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileHash {
    pub path: String,
    pub sha256: String,
}

/// What a run read, what it wrote, and how long it took.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: String,
    pub seed: Option<u64>,
    pub status: String,
    pub inputs: Vec<FileHash>,
    pub outputs: Vec<FileHash>,
    /// Digest of every output path and hash, in write order.
    pub content_hash: String,
    pub wall_time_ms: f64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Write through a temporary file in the same directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Collects input and output hashes for one command.
pub struct Run {
    command: &'static str,
    config: PathBuf,
    out: PathBuf,
    seed: Option<u64>,
    inputs: Vec<FileHash>,
    outputs: Vec<FileHash>,
    start: Instant,
}

impl Run {
    pub fn start(command: &'static str, config: &Path, out: &Path) -> Result<Self, Failure> {
        let mut run = Self {
            command,
            config: config.to_path_buf(),
            out: out.to_path_buf(),
            seed: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
            start: Instant::now(),
        };
        run.input(config)?;
        Ok(run)
    }

    pub fn seed(&mut self, seed: u64) {
        self.seed = Some(seed);
    }

    pub fn input(&mut self, path: &Path) -> Result<(), Failure> {
        let bytes =
            fs::read(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        self.inputs.push(FileHash {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        });
        Ok(())
    }

    /// Write `rel` (relative to the output directory) atomically.
    pub fn write(&mut self, rel: &str, bytes: &[u8]) -> Result<(), Failure> {
        let path = self.out.join(rel);
        write_atomic(&path, bytes)
            .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        self.outputs.push(FileHash {
            path: rel.to_string(),
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<(), Failure> {
        let mut text =
            serde_json::to_string_pretty(value).map_err(|e| Failure::input(e.to_string()))?;
        text.push('\n');
        self.write(rel, text.as_bytes())
    }

    /// Write `manifest.json`; `ok` records whether the command succeeded.
    pub fn finish(self, ok: bool) -> Result<(), Failure> {
        let listing: String = self
            .outputs
            .iter()
            .map(|f| format!("{}\0{}\n", f.path, f.sha256))
            .collect();
        let manifest = RunManifest {
            command: self.command.into(),
            config: self.config.display().to_string(),
            seed: self.seed,
            status: if ok { "ok" } else { "numerical-failure" }.into(),
            content_hash: sha256_hex(listing.as_bytes()),
            inputs: self.inputs,
            outputs: self.outputs,
            wall_time_ms: self.start.elapsed().as_secs_f64() * 1e3,
        };
        let mut text =
            serde_json::to_string_pretty(&manifest).map_err(|e| Failure::input(e.to_string()))?;
        text.push('\n');
        let path = self.out.join("manifest.json");
        write_atomic(&path, text.as_bytes())
            .map_err(|e| Failure::input(format!("{}: {e}", path.display())))
    }
}
