//! Config file handling. The file is TOML:
//!
//! ```toml
//! seed = 7
//! jobs = 4
//! out = "runs/a"
//!
//! [task]
//! k-neighbors = 15
//!
//! [correlate]
//! features = "feats"
//! setting = "semi-supervised"
//! ```
//!
//! Flags given on the command line replace the matching file value.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::CliError;

pub struct ConfigFile {
    table: toml::Table,
}

impl ConfigFile {
    pub fn empty() -> Self {
        Self { table: toml::Table::new() }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let table: toml::Table = text
            .parse()
            .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))?;
        Ok(Self { table })
    }

    /// Top-level scalar keys (seed, jobs, out).
    fn globals(&self) -> toml::Table {
        self.table
            .iter()
            .filter(|(_, v)| !v.is_table())
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }

    fn section(&self, name: &str) -> Result<toml::Table, CliError> {
        match self.table.get(name) {
            None => Ok(toml::Table::new()),
            Some(toml::Value::Table(t)) => Ok(t.clone()),
            Some(_) => Err(CliError::Config(format!("`{name}` must be a table"))),
        }
    }

    /// Reject tables that match no subcommand so typos do not go unnoticed.
    pub fn check_sections(&self, known: &[&str]) -> Result<(), CliError> {
        for (k, v) in &self.table {
            if v.is_table() && k != "task" && !known.contains(&k.as_str()) {
                return Err(CliError::Config(format!("unknown config section [{k}]")));
            }
        }
        Ok(())
    }

    pub fn resolve_globals<T: Serialize + DeserializeOwned>(&self, flags: &T) -> Result<T, CliError> {
        overlay(self.globals(), flags)
    }

    pub fn resolve_section<T: Serialize + DeserializeOwned>(&self, name: &str, flags: &T) -> Result<T, CliError> {
        overlay(self.section(name)?, flags)
    }
}

fn overlay<T: Serialize + DeserializeOwned>(mut base: toml::Table, flags: &T) -> Result<T, CliError> {
    // unset flags are Options and vanish on serialization
    let set = toml::Table::try_from(flags).map_err(|e| CliError::Config(e.to_string()))?;
    base.extend(set);
    toml::Value::Table(base)
        .try_into()
        .map_err(|e: toml::de::Error| CliError::Config(e.message().to_string()))
}
