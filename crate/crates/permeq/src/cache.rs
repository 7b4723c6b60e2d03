//! Persistent results keyed by (canonical partition text, n, method).
//!
//! One JSON file per cache directory. Records written by another tool
//! version are ignored on load and dropped on the next save.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const FILE_NAME: &str = "permeq-cache.json";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CacheKey {
    pub partition: String,
    pub n: usize,
    pub method: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub key: CacheKey,
    pub value: String,
    pub version: String,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct CacheFile {
    records: Vec<CacheRecord>,
}

/// A cached value that differs from its recomputation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub key: CacheKey,
    pub cached: String,
    pub fresh: String,
}

#[derive(Debug)]
pub struct Cache {
    path: Option<PathBuf>,
    verify: bool,
    records: BTreeMap<CacheKey, String>,
    dirty: bool,
    mismatches: Vec<Mismatch>,
}

impl Cache {
    /// A cache that stores nothing.
    pub fn disabled() -> Self {
        Self {
            path: None,
            verify: false,
            records: BTreeMap::new(),
            dirty: false,
            mismatches: Vec::new(),
        }
    }

    /// Loads the cache file in `dir`, if any. With `verify`, every hit is
    /// recomputed and compared.
    pub fn open(dir: &Path, verify: bool) -> CliResult<Self> {
        let path = dir.join(FILE_NAME);
        let mut records = BTreeMap::new();
        match fs::read_to_string(&path) {
            Ok(text) => {
                let file: CacheFile = serde_json::from_str(&text)?;
                for r in file.records {
                    if r.version == TOOL_VERSION {
                        records.insert(r.key, r.value);
                    }
                }
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => return Err(CliError::io(&path)(e)),
        }
        Ok(Self {
            path: Some(path),
            verify,
            records,
            dirty: false,
            mismatches: Vec::new(),
        })
    }

    pub fn is_enabled(&self) -> bool {
        self.path.is_some()
    }

    pub fn get(&self, key: &CacheKey) -> Option<&str> {
        self.records.get(key).map(String::as_str)
    }

    pub fn insert(&mut self, key: CacheKey, value: String) {
        if self.path.is_some() && self.records.get(&key) != Some(&value) {
            self.records.insert(key, value);
            self.dirty = true;
        }
    }

    /// The cached value for `key`, computing and storing it on a miss.
    ///
    /// In verify mode a hit is recomputed; a disagreement is recorded and the
    /// fresh value is returned and stored.
    pub fn resolve(&mut self, key: CacheKey, compute: impl FnOnce() -> CliResult<String>) -> CliResult<String> {
        match self.get(&key).map(str::to_owned) {
            Some(cached) if !self.verify => Ok(cached),
            Some(cached) => {
                let fresh = compute()?;
                if fresh != cached {
                    self.mismatches.push(Mismatch {
                        key: key.clone(),
                        cached,
                        fresh: fresh.clone(),
                    });
                    self.insert(key, fresh.clone());
                }
                Ok(fresh)
            }
            None => {
                let fresh = compute()?;
                self.insert(key, fresh.clone());
                Ok(fresh)
            }
        }
    }

    pub fn mismatches(&self) -> &[Mismatch] {
        &self.mismatches
    }

    /// Writes the cache file if anything changed.
    pub fn save(&mut self) -> CliResult<()> {
        let Some(path) = &self.path else { return Ok(()) };
        if !self.dirty {
            return Ok(());
        }
        let file = CacheFile {
            records: self
                .records
                .iter()
                .map(|(key, value)| CacheRecord {
                    key: key.clone(),
                    value: value.clone(),
                    version: TOOL_VERSION.into(),
                })
                .collect(),
        };
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(CliError::io(dir))?;
        }
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, serde_json::to_string_pretty(&file)? + "\n").map_err(CliError::io(&tmp))?;
        fs::rename(&tmp, path).map_err(CliError::io(path))?;
        self.dirty = false;
        Ok(())
    }
}
