//! Plain-text key-value configuration files.
//!
//! Lines are `key = value`; `#` starts a comment. Keys mirror the long
//! command-line flags (dashes and underscores are interchangeable).
//! Command-line values win over config-file values.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::errors::{CliError, CliResult};

#[derive(Debug, Default)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn empty() -> ConfigFile {
        ConfigFile::default()
    }

    pub fn load(path: &Path) -> CliResult<ConfigFile> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))?;
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!(
                    "config {}: line {} is not 'key = value'",
                    path.display(),
                    idx + 1
                ))
            })?;
            entries.insert(normalize(key.trim()), value.trim().to_string());
        }
        Ok(ConfigFile { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(&normalize(key)).map(String::as_str)
    }

    /// CLI value if present, else the config-file value parsed, else the
    /// built-in default.
    pub fn resolve<T: Clone + FromStr>(
        &self,
        cli: Option<T>,
        key: &str,
        default: T,
    ) -> CliResult<T> {
        if let Some(v) = cli {
            return Ok(v);
        }
        match self.get(key) {
            Some(raw) => raw.parse().map_err(|_| {
                CliError::Config(format!("config key '{key}': cannot parse '{raw}'"))
            }),
            None => Ok(default),
        }
    }

    /// Same as [`resolve`](Self::resolve) but without a default; `None`
    /// when the key is absent everywhere.
    pub fn resolve_opt<T: FromStr>(&self, cli: Option<T>, key: &str) -> CliResult<Option<T>> {
        if let Some(v) = cli {
            return Ok(Some(v));
        }
        match self.get(key) {
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| CliError::Config(format!("config key '{key}': cannot parse '{raw}'"))),
            None => Ok(None),
        }
    }

    /// Resolves a required input path and checks that it exists.
    pub fn resolve_input(&self, cli: Option<PathBuf>, key: &str) -> CliResult<PathBuf> {
        let path = match cli {
            Some(p) => p,
            None => self
                .get(key)
                .map(PathBuf::from)
                .ok_or_else(|| CliError::Config(format!("missing required input '{key}'")))?,
        };
        if !path.is_file() {
            return Err(CliError::Config(format!(
                "input '{key}' does not exist: {}",
                path.display()
            )));
        }
        Ok(path)
    }
}

fn normalize(key: &str) -> String {
    key.replace('-', "_")
}

/// Creates the output directory (if needed) and verifies it is usable.
pub fn prepare_out_dir(cli: Option<PathBuf>, config: &ConfigFile) -> CliResult<PathBuf> {
    let dir = match cli {
        Some(d) => d,
        None => config
            .get("out")
            .map(PathBuf::from)
            .ok_or_else(|| CliError::Config("missing required output directory 'out'".into()))?,
    };
    std::fs::create_dir_all(&dir)
        .map_err(|e| CliError::Config(format!("cannot create output dir {}: {e}", dir.display())))?;
    Ok(dir)
}
