//! The plain-text `key = value` dialect shared by cube sidecars, pipeline
//! configs, scenario files, axis sidecars and run manifests.
//!
//! One entry per line. Blank lines and lines starting with `#` are ignored.
//! Keys may repeat (scenario files list one `scatterer = { ... }` per line);
//! entry order is preserved on both read and write.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KvFile {
    entries: Vec<(String, String)>,
    origin: PathBuf,
}

impl KvFile {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut entries = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::metadata(
                    origin,
                    format!("line {}: expected `key = value`", lineno + 1),
                )
            })?;
            let key = k.trim();
            if key.is_empty() {
                return Err(Error::metadata(
                    origin,
                    format!("line {}: empty key", lineno + 1),
                ));
            }
            entries.push((key.to_string(), v.trim().to_string()));
        }
        Ok(Self {
            entries,
            origin: origin.to_path_buf(),
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_string()).map_err(|e| Error::io(path, e))
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.entries.push((key.into(), value.to_string()));
        self
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn origin(&self) -> &Path {
        &self.origin
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn get_all<'a>(&'a self, key: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.entries
            .iter()
            .filter(move |(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::metadata(&self.origin, format!("missing key `{key}`")))
    }

    pub fn require_parsed<T: FromStr>(&self, key: &str) -> Result<T> {
        let raw = self.require(key)?;
        raw.parse().map_err(|_| {
            Error::metadata(&self.origin, format!("key `{key}`: cannot parse `{raw}`"))
        })
    }

    pub fn parsed_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.get(key) {
            None => Ok(default),
            Some(_) => self.require_parsed(key),
        }
    }

    /// Parses a comma-separated list of floats, e.g. `p = 0,1.5,3`.
    pub fn require_f64_list(&self, key: &str) -> Result<Vec<f64>> {
        let raw = self.require(key)?;
        if raw.is_empty() {
            return Ok(Vec::new());
        }
        raw.split(',')
            .map(|s| {
                s.trim().parse::<f64>().map_err(|_| {
                    Error::metadata(&self.origin, format!("key `{key}`: bad number `{s}`"))
                })
            })
            .collect()
    }
}

impl std::fmt::Display for KvFile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

/// Splits the body of an inline block `{ a = 1, b = 2 }` into key/value pairs.
pub fn parse_block(raw: &str, origin: &Path) -> Result<Vec<(String, String)>> {
    let inner = raw
        .trim()
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| {
            Error::metadata(origin, format!("expected `{{ ... }}` block, got `{raw}`"))
        })?;
    inner
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|item| {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::metadata(origin, format!("bad block item `{item}`")))?;
            Ok((k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}

pub fn format_block(items: &[(&str, String)]) -> String {
    let mut out = String::from("{ ");
    for (i, (k, v)) in items.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{k} = {v}");
    }
    out.push_str(" }");
    out
}

pub fn format_list(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| crate::io::fmt_g17(*v))
        .collect::<Vec<_>>()
        .join(",")
}
