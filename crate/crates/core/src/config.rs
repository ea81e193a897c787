//! Flat `key = value` configuration files.
//!
//! One setting per line, `#` starts a comment line, blank lines are ignored.
//! Lists are comma separated. Keys may not repeat.
//!
//! ```text
//! # engine.conf
//! store = ./store
//! functions = sum_distinct, weighted
//! iexplore = 50
//! ```

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::best_trail::{Params, ScoringFunction};
use crate::error::{Error, Result};
use crate::potential_gain::StartStrategy;

/// Environment variable that overrides the configured store directory.
pub const STORE_ENV: &str = "TRAILFINDER_STORE";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

/// Splits flat configuration text into entries. `origin` names the source
/// in error messages.
pub fn parse_key_values(text: &str, origin: &str) -> Result<Vec<Entry>> {
    let err = |line: usize, message: String| Error::Config {
        path: origin.to_string(),
        message: format!("line {line}: {message}"),
    };
    let mut entries: Vec<Entry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (key, value) = trimmed
            .split_once('=')
            .ok_or_else(|| err(line, format!("expected key = value, got {trimmed:?}")))?;
        let key = key.trim();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.') {
            return Err(err(line, format!("invalid key {key:?}")));
        }
        if let Some(first) = entries.iter().find(|e| e.key == key) {
            return Err(err(line, format!("key {key} already set on line {}", first.line)));
        }
        entries.push(Entry {
            line,
            key: key.to_string(),
            value: value.trim().to_string(),
        });
    }
    Ok(entries)
}

/// Parses a comma-separated list; an empty value is an empty list.
pub fn parse_list<T: FromStr>(value: &str) -> std::result::Result<Vec<T>, String>
where
    T::Err: fmt::Display,
{
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|item| {
            let item = item.trim();
            item.parse::<T>().map_err(|e| format!("{item:?}: {e}"))
        })
        .collect()
}

pub(crate) fn parse_value<T: FromStr>(entry: &Entry, origin: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    entry.value.parse::<T>().map_err(|e| Error::Config {
        path: origin.to_string(),
        message: format!("line {}: {}: {e}", entry.line, entry.key),
    })
}

pub(crate) fn parse_list_value<T: FromStr>(entry: &Entry, origin: &str) -> Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    parse_list(&entry.value).map_err(|e| Error::Config {
        path: origin.to_string(),
        message: format!("line {}: {}: {e}", entry.line, entry.key),
    })
}

/// Everything the engine and server need at startup.
#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    pub params: Params,
    /// Scoring functions run per starting point, also used for ranking.
    pub functions: Vec<ScoringFunction>,
    pub strategy: StartStrategy,
    /// Starting points per query.
    pub k: usize,
    pub dmax: usize,
    pub hub_iterations: usize,
    pub store_dir: Option<PathBuf>,
    pub listen: String,
    /// Worker threads for tree growing; 0 uses every core.
    pub workers: usize,
    /// Trails kept per response.
    pub max_trails: usize,
    /// Upper bound for per-request `k`.
    pub max_k: usize,
    /// Upper bound for per-request iteration counts.
    pub max_iterations: usize,
    pub static_dir: Option<PathBuf>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            params: Params::default(),
            functions: vec![ScoringFunction::SumDistinct, ScoringFunction::Weighted],
            strategy: StartStrategy::default(),
            k: 10,
            dmax: 8,
            hub_iterations: 30,
            store_dir: None,
            listen: "127.0.0.1:8080".to_string(),
            workers: 0,
            max_trails: 20,
            max_k: 50,
            max_iterations: 500,
            static_dir: None,
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.functions.is_empty() {
            return Err(Error::param("functions", "at least one scoring function is required"));
        }
        let mut seen = self.functions.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.functions.len() {
            return Err(Error::param("functions", "functions repeat"));
        }
        if self.k < 1 {
            return Err(Error::param("k", "must be at least 1"));
        }
        if self.dmax < 1 {
            return Err(Error::param("dmax", "must be at least 1"));
        }
        if self.max_trails < 1 {
            return Err(Error::param("max_trails", "must be at least 1"));
        }
        if self.max_k < self.k {
            return Err(Error::param("max_k", "must not be below k"));
        }
        let iterations = self.params.explore_iterations.max(self.params.converge_iterations);
        if self.max_iterations < iterations {
            return Err(Error::param("max_iterations", "must not be below iexplore or iconverge"));
        }
        Ok(())
    }

    /// Parses configuration text over the defaults. The result is not yet
    /// validated.
    pub fn from_str_with_origin(text: &str, origin: &str) -> Result<Self> {
        let mut cfg = EngineConfig::default();
        for entry in parse_key_values(text, origin)? {
            cfg.set(&entry, origin)?;
        }
        Ok(cfg)
    }

    /// Reads a configuration file and applies the store override from the
    /// environment.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::from_str_with_origin(&text, &path.display().to_string())?;
        cfg.apply_env();
        Ok(cfg)
    }

    pub fn apply_env(&mut self) {
        if let Some(dir) = std::env::var_os(STORE_ENV).filter(|v| !v.is_empty()) {
            self.store_dir = Some(PathBuf::from(dir));
        }
    }

    fn set(&mut self, e: &Entry, origin: &str) -> Result<()> {
        let p = &mut self.params;
        match e.key.as_str() {
            "iexplore" => p.explore_iterations = parse_value(e, origin)?,
            "iconverge" => p.converge_iterations = parse_value(e, origin)?,
            "m" => p.repetitions = parse_value(e, origin)?,
            "df" => p.discrimination = parse_value(e, origin)?,
            "gamma" => p.gamma = parse_value(e, origin)?,
            "delta" => p.delta = parse_value(e, origin)?,
            "c" => p.sum_distinct_constant = parse_value(e, origin)?,
            "depth_cap" => p.depth_cap = parse_value(e, origin)?,
            "seed" => p.seed = parse_value(e, origin)?,
            "functions" => self.functions = parse_list_value(e, origin)?,
            "strategy" => self.strategy = parse_value(e, origin)?,
            "k" => self.k = parse_value(e, origin)?,
            "dmax" => self.dmax = parse_value(e, origin)?,
            "hub_iterations" => self.hub_iterations = parse_value(e, origin)?,
            "store" => self.store_dir = Some(PathBuf::from(&e.value)),
            "listen" => self.listen = e.value.clone(),
            "workers" => self.workers = parse_value(e, origin)?,
            "max_trails" => self.max_trails = parse_value(e, origin)?,
            "max_k" => self.max_k = parse_value(e, origin)?,
            "max_iterations" => self.max_iterations = parse_value(e, origin)?,
            "static" => self.static_dir = Some(PathBuf::from(&e.value)),
            other => {
                return Err(Error::Config {
                    path: origin.to_string(),
                    message: format!("line {}: unknown key {other}", e.line),
                })
            }
        }
        Ok(())
    }

    /// Serialized form; parsing it yields an equal configuration.
    pub fn to_config_string(&self) -> String {
        let p = &self.params;
        let mut out = String::new();
        let mut put = |k: &str, v: &dyn fmt::Display| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("iexplore", &p.explore_iterations);
        put("iconverge", &p.converge_iterations);
        put("m", &p.repetitions);
        put("df", &p.discrimination);
        put("gamma", &p.gamma);
        put("delta", &p.delta);
        put("c", &p.sum_distinct_constant);
        put("depth_cap", &p.depth_cap);
        put("seed", &p.seed);
        let names: Vec<&str> = self.functions.iter().map(|f| f.name()).collect();
        put("functions", &names.join(", "));
        put("strategy", &self.strategy);
        put("k", &self.k);
        put("dmax", &self.dmax);
        put("hub_iterations", &self.hub_iterations);
        if let Some(dir) = &self.store_dir {
            put("store", &dir.display());
        }
        put("listen", &self.listen);
        put("workers", &self.workers);
        put("max_trails", &self.max_trails);
        put("max_k", &self.max_k);
        put("max_iterations", &self.max_iterations);
        if let Some(dir) = &self.static_dir {
            put("static", &dir.display());
        }
        out
    }
}

impl FromStr for EngineConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_str_with_origin(s, "<config>")
    }
}
