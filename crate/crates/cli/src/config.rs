//! `key: value` config files. One entry per line, `#` starts a comment
//! line, values run to the end of the line (they may contain `:`).
//! Unknown and duplicate keys are rejected.

use std::collections::BTreeMap;

use anyhow::{bail, Context, Result};
use fixlab_core::expr::parse_const;

/// Every key any command understands; commands read the subset they
/// need so one bundle file can drive several commands.
const KNOWN_KEYS: &[&str] = &[
    // maps
    "f",
    "g",
    "T",
    // certification
    "kind",
    "F",
    "phi",
    "tau",
    "p",
    "grid",
    "lambda",
    "alpha",
    "beta",
    "gamma",
    "delta",
    // pair analysis
    "resolution",
    // functional-equation instances
    "W",
    "W_grid",
    "D",
    "D_grid",
    "G1",
    "G2",
    "tau_map",
    "tol",
    "max_iters",
    "hyp_tau",
    "hyp_phi",
    "hyp_pairs",
    "hyp_lo",
    "hyp_hi",
    // integral-inclusion instances
    "q",
    "k",
    "sigma",
    "n",
    "rule",
    "a",
    "b",
];

#[derive(Debug, Clone)]
pub struct Config {
    map: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once(':') else {
                bail!("line {}: expected 'key: value', got '{line}'", lineno + 1);
            };
            let key = key.trim();
            let value = value.trim();
            if !KNOWN_KEYS.contains(&key) {
                bail!("line {}: unknown key '{key}'", lineno + 1);
            }
            if map.insert(key.to_string(), value.to_string()).is_some() {
                bail!("line {}: duplicate key '{key}'", lineno + 1);
            }
        }
        Ok(Config { map })
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .with_context(|| format!("config is missing required key '{key}'"))
    }

    /// Numeric value through the expression-constant parser, so
    /// fractions like `1/5` work.
    pub fn number(&self, key: &str) -> Result<Option<f64>> {
        match self.get(key) {
            Some(text) => Ok(Some(
                parse_const(text).with_context(|| format!("config key '{key}'"))?,
            )),
            None => Ok(None),
        }
    }

    pub fn integer(&self, key: &str) -> Result<Option<usize>> {
        match self.get(key) {
            Some(text) => {
                Ok(Some(text.parse::<usize>().with_context(|| {
                    format!("config key '{key}' must be an integer")
                })?))
            }
            None => Ok(None),
        }
    }
}
