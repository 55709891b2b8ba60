//! Run manifests and atomic file writes.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::error::Result;

/// Provenance record emitted for every CLI invocation. Replaying the same
/// subcommand with the same config and replay providers reproduces the
/// listed outputs byte-for-byte (the manifest itself carries timestamps
/// and is not byte-stable).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config_hash: String,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub seeds: BTreeMap<String, u64>,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub warnings: Vec<String>,
}

impl RunManifest {
    pub fn start(subcommand: impl Into<String>, config_hash: impl Into<String>) -> Self {
        RunManifest {
            subcommand: subcommand.into(),
            config_hash: config_hash.into(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            seeds: BTreeMap::new(),
            started_unix: now(),
            finished_unix: 0,
            warnings: Vec::new(),
        }
    }

    pub fn input(&mut self, path: impl Into<PathBuf>) -> &mut Self {
        self.inputs.push(path.into());
        self
    }

    pub fn output(&mut self, path: impl Into<PathBuf>) -> &mut Self {
        self.outputs.push(path.into());
        self
    }

    pub fn seed(&mut self, name: impl Into<String>, value: u64) -> &mut Self {
        self.seeds.insert(name.into(), value);
        self
    }

    /// Finish and write the manifest under `<output_dir>/manifests/`.
    pub fn finish(mut self, output_dir: &Path) -> Result<PathBuf> {
        self.finished_unix = now();
        let dir = output_dir.join("manifests");
        std::fs::create_dir_all(&dir)?;
        let name = self.subcommand.replace([' ', '/'], "_");
        let path = dir.join(format!("{name}.json"));
        write_atomic(&path, serde_json::to_string_pretty(&self)?.as_bytes())?;
        Ok(path)
    }
}

fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Write via a temp file in the same directory plus rename, so interrupted
/// runs never leave partial artifacts at the final path.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Serialize records as JSONL and write atomically (replacing the target).
pub fn write_jsonl_atomic<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    let mut buf = Vec::new();
    for r in records {
        serde_json::to_writer(&mut buf, r)?;
        buf.push(b'\n');
    }
    write_atomic(path, &buf)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/out.json");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"two");
        assert!(!path.with_extension("tmp").exists());
    }

    #[test]
    fn manifest_records_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = RunManifest::start("bench gen", "abc123");
        m.seed("bench", 42).input("in.json").output("out.json");
        let path = m.finish(dir.path()).unwrap();
        let loaded: RunManifest =
            serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        assert_eq!(loaded.subcommand, "bench gen");
        assert_eq!(loaded.seeds["bench"], 42);
        assert!(loaded.finished_unix >= loaded.started_unix);
    }
}
