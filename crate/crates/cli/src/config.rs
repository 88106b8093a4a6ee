use std::path::Path;

use orbitforge_core::Error;
use serde::{Deserialize, Serialize};

/// Defaults shared by subcommands; command-line flags override them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Settings {
    /// Target absolute error for certified floating-point values.
    pub precision: f64,
    /// Series truncation order.
    pub truncation: usize,
    /// Iteration cap for orbit and escape searches.
    pub iter_cap: usize,
    /// Cap on `d^n` for small-orbit levels.
    pub level_cap: usize,
    pub threads: Option<usize>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { precision: 1e-12, truncation: 40, iter_cap: 4096, level_cap: 4096, threads: None }
    }
}

impl Settings {
    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read config: {e}")))?;
        let s: Settings = toml::from_str(&text).map_err(|e| Error::Parse(format!("bad config: {e}")))?;
        if !(s.precision > 0.0) {
            return Err(Error::Parse("precision must be positive".into()));
        }
        Ok(s)
    }
}
