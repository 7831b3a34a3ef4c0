//! Optional TOML config file. Command-line flags win over it, and it wins
//! over the built-in defaults.

use std::path::Path;

use anyhow::{Context, Result};
use hawkes_hazards::inference::KernelFamily;
use hawkes_hazards::Method;
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub seed: Option<u64>,
    pub stream: Option<u64>,
    pub horizon: Option<f64>,
    pub method: Option<Method>,
    pub family: Option<KernelFamily>,
    pub start: Option<f64>,
    pub end: Option<f64>,
    pub paths: Option<usize>,
    pub bins: Option<usize>,
    pub reps: Option<usize>,
    pub parallel: Option<bool>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// First of flag, config value, default.
pub fn pick<T>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}
