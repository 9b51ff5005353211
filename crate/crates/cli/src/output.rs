//! Output directories, embedded headers and the hash manifest.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const VERSION: &str = concat!("couette ", env!("CARGO_PKG_VERSION"));
pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, Serialize)]
pub struct Artifact {
    pub file: String,
    pub sha256: String,
    pub bytes: usize,
}

/// A run directory that records every file written into it.
pub struct OutputDir {
    root: PathBuf,
    command: String,
    config: Value,
    artifacts: Vec<Artifact>,
}

impl OutputDir {
    /// Uses `base` when it holds no manifest yet, otherwise the first free
    /// `base/<command>-<n>` so earlier results are never overwritten.
    pub fn create(base: &Path, command: &str, config: Value) -> Result<Self> {
        let root = if base.join(MANIFEST).exists() {
            (1..)
                .map(|n| base.join(format!("{command}-{n}")))
                .find(|p| !p.exists())
                .expect("unbounded suffix search")
        } else {
            base.to_path_buf()
        };
        fs::create_dir_all(&root).with_context(|| format!("creating {}", root.display()))?;
        Ok(Self {
            root,
            command: command.to_string(),
            config,
            artifacts: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn config(&self) -> &Value {
        &self.config
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.root.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        self.artifacts.push(Artifact {
            file: name.to_string(),
            sha256: hex::encode(Sha256::digest(bytes)),
            bytes: bytes.len(),
        });
        Ok(path)
    }

    /// Comment lines that open every CSV file.
    pub fn csv_preamble(&self) -> String {
        format!("# {VERSION}\n# config: {}\n", self.config)
    }

    pub fn write_csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let mut buf = self.csv_preamble().into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(header)?;
            for r in rows {
                w.write_record(r)?;
            }
            w.flush()?;
        }
        self.write(name, &buf)?;
        Ok(())
    }

    /// One header object, then one JSON object per line.
    pub fn write_ndjson<T: Serialize>(&mut self, name: &str, items: &[T]) -> Result<()> {
        let mut s = serde_json::to_string(&json!({
            "kind": "header",
            "version": VERSION,
            "config": self.config,
        }))?;
        s.push('\n');
        for it in items {
            s.push_str(&serde_json::to_string(it)?);
            s.push('\n');
        }
        self.write(name, s.as_bytes())?;
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, body: &T) -> Result<()> {
        let doc = json!({
            "version": VERSION,
            "config": self.config,
            "result": body,
        });
        let mut s = serde_json::to_string_pretty(&doc)?;
        s.push('\n');
        self.write(name, s.as_bytes())?;
        Ok(())
    }

    pub fn finish(self) -> Result<PathBuf> {
        let doc = json!({
            "version": VERSION,
            "command": self.command,
            "config": self.config,
            "artifacts": self.artifacts,
        });
        let path = self.root.join(MANIFEST);
        let mut s = serde_json::to_string_pretty(&doc)?;
        s.push('\n');
        fs::write(&path, s).with_context(|| format!("writing {}", path.display()))?;
        Ok(self.root)
    }
}

/// Shortest round-trip float formatting, so CSV bytes are reproducible.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_run_leaves_a_config_only_manifest() {
        let tmp = tempfile::tempdir().unwrap();
        let dir = OutputDir::create(tmp.path(), "x", json!({"a": 1})).unwrap();
        let root = dir.finish().unwrap();
        let m: Value = serde_json::from_str(&fs::read_to_string(root.join(MANIFEST)).unwrap()).unwrap();
        assert_eq!(m["config"]["a"], 1);
        assert_eq!(m["artifacts"].as_array().unwrap().len(), 0);
    }

    #[test]
    fn existing_manifest_gets_a_suffixed_sibling() {
        let tmp = tempfile::tempdir().unwrap();
        let first = OutputDir::create(tmp.path(), "sweep", json!({})).unwrap().finish().unwrap();
        let second = OutputDir::create(tmp.path(), "sweep", json!({})).unwrap().finish().unwrap();
        let third = OutputDir::create(tmp.path(), "sweep", json!({})).unwrap().finish().unwrap();
        assert_eq!(first, tmp.path());
        assert_eq!(second, tmp.path().join("sweep-1"));
        assert_eq!(third, tmp.path().join("sweep-2"));
    }

    #[test]
    fn hashes_match_contents() {
        let tmp = tempfile::tempdir().unwrap();
        let mut dir = OutputDir::create(tmp.path(), "x", json!({})).unwrap();
        dir.write("a.txt", b"abc").unwrap();
        dir.finish().unwrap();
        let m: Value =
            serde_json::from_str(&fs::read_to_string(tmp.path().join(MANIFEST)).unwrap()).unwrap();
        assert_eq!(
            m["artifacts"][0]["sha256"],
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
