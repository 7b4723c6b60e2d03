//! Optional TOML configuration with the same keys as the command-line flags.
//!
//! Top-level keys apply to every command; a table named after a subcommand
//! (`[count]`, `[sc-sequence]`, ...) overrides them for that command.
//! Flags override both.
//!
//! ```toml
//! jobs = 4
//! cache-dir = "/var/cache/permeq"
//!
//! [count]
//! method = "all"
//! n = "3..8"
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Deserialize;

use crate::error::{CliError, CliResult};

/// `n` as an integer or as text such as `"3..7"`.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum NValue {
    One(usize),
    Text(String),
}

impl NValue {
    pub fn into_text(self) -> String {
        match self {
            Self::One(n) => n.to_string(),
            Self::Text(s) => s,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Keys {
    pub partition: Option<String>,
    pub straightening: Option<String>,
    pub n: Option<NValue>,
    pub c: Option<usize>,
    pub max_n: Option<usize>,
    pub perm: Option<String>,
    pub method: Option<String>,
    pub reading: Option<String>,
    pub format: Option<String>,
    pub suite: Option<String>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub roots: Option<bool>,
    pub diamond: Option<bool>,
    pub sizes_only: Option<bool>,
    pub dot: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub guard: Option<usize>,
    pub allow_large: Option<bool>,
    pub cache_dir: Option<PathBuf>,
    pub no_cache: Option<bool>,
    pub verify_cache: Option<bool>,
}

/// Subcommands that may have their own configuration table.
pub const SECTIONS: [&str; 7] = [
    "classes",
    "count",
    "confluence",
    "normal-form",
    "toothed",
    "sc-sequence",
    "verify",
];

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FileConfig {
    pub keys: Keys,
    pub sections: BTreeMap<String, Keys>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        let mut table: toml::Table = text.parse()?;
        let mut sections = BTreeMap::new();
        for name in SECTIONS {
            if let Some(v) = table.remove(name) {
                sections.insert(name.to_string(), v.try_into()?);
            }
        }
        let keys = toml::Value::Table(table).try_into()?;
        Ok(Self { keys, sections })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(CliError::io(path))?;
        Self::parse(&text).map_err(|source| CliError::Config {
            path: path.to_owned(),
            source,
        })
    }
}

/// Configuration values visible to one command.
#[derive(Clone, Debug, Default)]
pub struct Layer {
    section: Option<Keys>,
    top: Keys,
}

impl Layer {
    pub fn new(file: Option<FileConfig>, command: &str) -> Self {
        match file {
            None => Self::default(),
            Some(f) => Self {
                section: f.sections.get(command).cloned(),
                top: f.keys,
            },
        }
    }

    /// The first of `flag`, the command's section, the top level.
    pub fn pick<T: Clone>(&self, flag: Option<T>, key: impl Fn(&Keys) -> Option<T>) -> Option<T> {
        flag.or_else(|| self.section.as_ref().and_then(&key))
            .or_else(|| key(&self.top))
    }

    /// A boolean switch: set by the flag or by configuration.
    pub fn switch(&self, flag: bool, key: impl Fn(&Keys) -> Option<bool>) -> bool {
        flag || self.pick(None, key).unwrap_or(false)
    }

    /// An enumerated value, parsed from configuration text with the flag's
    /// own value names.
    pub fn pick_enum<T: ValueEnum + Clone>(
        &self,
        flag: Option<T>,
        name: &str,
        key: impl Fn(&Keys) -> Option<String>,
    ) -> CliResult<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.pick(None, key) {
            None => Ok(None),
            Some(text) => T::from_str(&text, true)
                .map(Some)
                .map_err(|_| CliError::Usage(format!("config key `{name}`: unknown value `{text}`"))),
        }
    }
}
