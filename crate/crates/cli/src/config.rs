//! TOML config file. Each section mirrors a library config; missing keys
//! keep their defaults and command-line flags win over both.
//!
//! ```toml
//! [gen]
//! n_cuts = 6
//! erosion_px = 3
//!
//! [genetic]
//! population = 128
//!
//! [metrics]
//! neighbor_tau = 6.0
//! ```

use std::path::Path;

use anyhow::Result;
use fragsolve::metrics::MetricsConfig;
use fragsolve::puzzle_gen::GenConfig;
use fragsolve::solver_genetic::GeneticConfig;
use fragsolve::solver_greedy::GreedyConfig;
use serde::Deserialize;

use crate::batch::UsageError;

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub gen: GenConfig,
    pub genetic: GeneticConfig,
    pub greedy: GreedyConfig,
    pub metrics: MetricsConfig,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<FileConfig> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("reading config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| UsageError(format!("config {}: {e}", path.display())).into())
    }
}

/// Overwrite `slot` when a flag was given.
pub fn set<T>(slot: &mut T, flag: Option<T>) {
    if let Some(v) = flag {
        *slot = v;
    }
}

/// Library validation failures on user-supplied settings are usage errors.
pub fn check(result: fragsolve::Result<()>) -> Result<()> {
    result.map_err(|e| UsageError(e.to_string()).into())
}
