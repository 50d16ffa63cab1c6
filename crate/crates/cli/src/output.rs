//! Output directory bookkeeping: CSV tables, JSON-lines logs, plot scripts and
//! the per-run JSON manifest listing every file with its SHA-256.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::Config;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputEntry {
    /// Path relative to the output directory, with `/` separators.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub preset: String,
    pub code_version: String,
    pub base_seed: u64,
    pub workers: usize,
    pub started_at: String,
    pub finished_at: String,
    pub config: Config,
    pub notes: Vec<String>,
    pub outputs: Vec<OutputEntry>,
}

pub fn manifest_name(preset: &str) -> String {
    format!("manifest_{}.json", preset.replace('-', "_"))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Collects the files written by one preset run.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    entries: Vec<OutputEntry>,
}

impl OutputDir {
    pub fn create(root: &Path) -> anyhow::Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("creating output directory {}", root.display()))?;
        Ok(Self { root: root.to_path_buf(), entries: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn entries(&self) -> &[OutputEntry] {
        &self.entries
    }

    pub fn write_bytes(&mut self, rel: &str, bytes: &[u8]) -> anyhow::Result<()> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        self.entries.retain(|e| e.path != rel);
        self.entries.push(OutputEntry { path: rel.to_owned(), sha256: sha256_hex(bytes), bytes: bytes.len() as u64 });
        Ok(())
    }

    /// Writes `rows` with a header taken from the row type's field names.
    pub fn write_csv<R: Serialize>(&mut self, rel: &str, rows: &[R]) -> anyhow::Result<()> {
        if rows.is_empty() {
            bail!("refusing to write {rel} without rows");
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in rows {
            w.serialize(row)?;
        }
        let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("flushing {rel}: {e}"))?;
        self.write_bytes(rel, &bytes)
    }

    pub fn write_jsonl<R: Serialize>(&mut self, rel: &str, rows: impl IntoIterator<Item = R>) -> anyhow::Result<()> {
        let mut bytes = Vec::new();
        for row in rows {
            serde_json::to_writer(&mut bytes, &row)?;
            bytes.push(b'\n');
        }
        self.write_bytes(rel, &bytes)
    }

    /// Writes the manifest for everything recorded so far and returns its path.
    pub fn finish(self, preset: &str, config: &Config, workers: usize, started_at: String, notes: Vec<String>) -> anyhow::Result<PathBuf> {
        let manifest = Manifest {
            preset: preset.to_owned(),
            code_version: env!("CARGO_PKG_VERSION").to_owned(),
            base_seed: config.seed,
            workers,
            started_at,
            finished_at: timestamp(),
            config: config.clone(),
            notes,
            outputs: self.entries,
        };
        let path = self.root.join(manifest_name(preset));
        fs::write(&path, serde_json::to_vec_pretty(&manifest)?).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

pub fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

/// Files whose current checksum differs from the manifest, or that are missing.
pub fn verify_manifest(path: &Path) -> anyhow::Result<Vec<String>> {
    let manifest: Manifest = serde_json::from_slice(&fs::read(path).with_context(|| format!("reading {}", path.display()))?)?;
    let root = path.parent().unwrap_or(Path::new("."));
    let mut bad = Vec::new();
    for entry in &manifest.outputs {
        match fs::read(root.join(&entry.path)) {
            Ok(bytes) if sha256_hex(&bytes) == entry.sha256 => {}
            _ => bad.push(entry.path.clone()),
        }
    }
    Ok(bad)
}
