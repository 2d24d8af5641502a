//! Per-invocation run manifest.
//!
//! Written next to each artifact as `key = value` lines. The wall-clock
//! timestamp is always the last line so that manifests from two identical
//! runs differ only there.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::kv::KvFile;

pub const TOOL_NAME: &str = "radoppler";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const TIMESTAMP_KEY: &str = "timestamp_unix";

#[derive(Debug, Clone, Default)]
pub struct RunManifest {
    body: KvFile,
}

impl RunManifest {
    pub fn new(subcommand: &str, command_line: &[String]) -> Self {
        let mut body = KvFile::new();
        body.push("tool", TOOL_NAME)
            .push("version", TOOL_VERSION)
            .push("subcommand", subcommand)
            .push("command_line", command_line.join(" "));
        Self { body }
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.body.push(key, value);
        self
    }

    /// Copies every entry of `kv` under `prefix.`.
    pub fn push_section(&mut self, prefix: &str, kv: &KvFile) -> &mut Self {
        for (k, v) in kv.entries() {
            self.body.push(format!("{prefix}.{k}"), v);
        }
        self
    }

    /// Records path and SHA-256 of an input file.
    pub fn input(&mut self, label: &str, path: &Path) -> Result<&mut Self> {
        let digest = sha256_file(path)?;
        self.body
            .push(format!("input.{label}.path"), path.display())
            .push(format!("input.{label}.sha256"), digest);
        Ok(self)
    }

    pub fn output(&mut self, label: &str, path: &Path) -> Result<&mut Self> {
        let digest = sha256_file(path)?;
        self.body
            .push(format!("output.{label}.path"), path.display())
            .push(format!("output.{label}.sha256"), digest);
        Ok(self)
    }

    pub fn entries(&self) -> &[(String, String)] {
        self.body.entries()
    }

    /// Body plus the timestamp line.
    pub fn render(&self, now: SystemTime) -> String {
        let secs = now
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs_f64())
            .unwrap_or(0.0);
        format!("{}{TIMESTAMP_KEY} = {secs:.3}\n", self.body)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render(SystemTime::now())).map_err(|e| Error::io(path, e))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(sha256_hex(&bytes))
}

/// `<artifact>.<suffix>`, appended rather than replacing any extension.
pub fn sidecar_path(artifact: &Path, suffix: &str) -> PathBuf {
    let mut s = artifact.as_os_str().to_owned();
    s.push(".");
    s.push(suffix);
    PathBuf::from(s)
}
