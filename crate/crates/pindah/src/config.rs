//! `pindah.toml`: advisor policy, backend conventions and the simulator
//! cost model. Every key is optional; absent keys keep their defaults.
//!
//! ```toml
//! [advisor]
//! small_threshold_rows = 1000000
//! prefer_loader_mid_band = false
//!
//! [backend]
//! delimiter = "|"
//! staging_suffix = "_STG"
//!
//! [cost]
//! query_setup_secs = 1130
//! query_per_row_us = 360
//! ```

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use pindah_core::advisor::AdvisorPolicy;
use pindah_core::backends::BackendConfig;
use pindah_core::simdb::CostModel;
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config {path}: {message}")]
    Invalid { path: PathBuf, message: String },
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    advisor: RawAdvisor,
    #[serde(default)]
    backend: RawBackend,
    #[serde(default)]
    cost: RawCost,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAdvisor {
    small_threshold_rows: Option<u64>,
    prefer_loader_mid_band: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBackend {
    delimiter: Option<String>,
    staging_suffix: Option<String>,
    default_date_column: Option<String>,
    tolerant_error_limit: Option<u32>,
    source_password_env: Option<String>,
    dest_password_env: Option<String>,
    dump_directory: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCost {
    query_setup_secs: Option<u64>,
    loader_setup_secs: Option<u64>,
    tts_setup_secs: Option<u64>,
    query_per_row_us: Option<u64>,
    loader_per_row_us: Option<u64>,
    tts_per_row_us: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    pub advisor: AdvisorPolicy,
    pub backend: BackendConfig,
    pub cost: CostModel,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, String> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        let mut cfg = Config::default();

        let a = raw.advisor;
        let threshold = a.small_threshold_rows.unwrap_or(cfg.advisor.small_threshold_rows);
        let mid = a.prefer_loader_mid_band.unwrap_or(cfg.advisor.prefer_loader_mid_band);
        cfg.advisor = AdvisorPolicy::new(threshold, mid)
            .map_err(|_| "advisor.small_threshold_rows must be positive".to_string())?;

        let b = raw.backend;
        if let Some(d) = b.delimiter {
            let mut chars = d.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => cfg.backend.delimiter = c,
                _ => return Err(format!("backend.delimiter must be one character, found {d:?}")),
            }
        }
        set(&mut cfg.backend.staging_suffix, b.staging_suffix);
        set(&mut cfg.backend.default_date_column, b.default_date_column);
        set(&mut cfg.backend.tolerant_error_limit, b.tolerant_error_limit);
        set(&mut cfg.backend.source_password_env, b.source_password_env);
        set(&mut cfg.backend.dest_password_env, b.dest_password_env);
        set(&mut cfg.backend.dump_directory, b.dump_directory);

        let c = raw.cost;
        set(&mut cfg.cost.query_setup, c.query_setup_secs.map(Duration::from_secs));
        set(&mut cfg.cost.loader_setup, c.loader_setup_secs.map(Duration::from_secs));
        set(&mut cfg.cost.tts_setup, c.tts_setup_secs.map(Duration::from_secs));
        set(&mut cfg.cost.query_per_row, c.query_per_row_us.map(Duration::from_micros));
        set(&mut cfg.cost.loader_per_row, c.loader_per_row_us.map(Duration::from_micros));
        set(&mut cfg.cost.tts_per_row, c.tts_per_row_us.map(Duration::from_micros));
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Config, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Config::parse(&text).map_err(|message| ConfigError::Invalid {
            path: path.to_path_buf(),
            message,
        })
    }
}
