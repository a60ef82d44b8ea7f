//! TOML run configuration.
//!
//! ```toml
//! schema_version = 1
//! output_dir = "runs/default"
//! models = ["qrnn", "crnn"]
//!
//! [data]
//! window = 8
//! train_ratio = 0.7
//! fixture_dir = "fixtures"
//! tickers = ["AAPL", "SONY", "AMZN", "NVDA", "INTC", "GM"]
//!
//! [model]
//! ridgelet_units = 32
//! qubits = 1
//! vqc_layers = 6
//!
//! [train]
//! epochs = 50
//! seed = 42
//! ```
//!
//! Every section and field is optional and falls back to its default.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::benchmark::{BenchSettings, DataConfig, ModelKind};
use crate::error::{Error, Result};
use crate::training::TrainConfig;
use crate::vqc::ModelConfig;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub output_dir: PathBuf,
    pub models: Vec<ModelKind>,
    pub data: DataConfig,
    pub model: ModelConfig,
    pub train: TrainConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            schema_version: SCHEMA_VERSION,
            output_dir: PathBuf::from("runs/default"),
            models: vec![ModelKind::Qrnn, ModelKind::Crnn],
            data: DataConfig::default(),
            model: ModelConfig::default(),
            train: TrainConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml()?)?;
        Ok(())
    }

    /// Checks every section; problems are reported as [`Error::Config`].
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let as_config = |e: Error| match e {
            Error::InvalidParameter(m) => Error::Config(m),
            other => other,
        };
        self.model.validate().map_err(as_config)?;
        self.train.validate().map_err(as_config)?;
        if self.data.window == 0 {
            return Err(Error::Config("data.window must be positive".into()));
        }
        if !(self.data.train_ratio > 0.0 && self.data.train_ratio < 1.0) {
            return Err(Error::Config("data.train_ratio must lie in (0, 1)".into()));
        }
        if self.models.is_empty() {
            return Err(Error::Config("models must not be empty".into()));
        }
        Ok(())
    }

    /// Applies command-line overrides on top of the file values.
    pub fn apply(&mut self, o: &Overrides) {
        if let Some(seed) = o.seed {
            self.train.seed = seed;
        }
        if let Some(out) = &o.output_dir {
            self.output_dir = out.clone();
        }
        if let Some(epochs) = o.epochs {
            self.train.epochs = epochs;
        }
        if let Some(dir) = &o.fixture_dir {
            self.data.fixture_dir = dir.clone();
        }
        if let Some(tickers) = &o.tickers {
            self.data.tickers = tickers.clone();
        }
        if let Some(shots) = o.shots {
            self.model.shots = Some(shots);
        }
    }

    pub fn bench_settings(&self) -> BenchSettings {
        BenchSettings {
            data: self.data.clone(),
            model: self.model.clone(),
            train: self.train.clone(),
            models: self.models.clone(),
        }
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub epochs: Option<usize>,
    pub fixture_dir: Option<PathBuf>,
    pub tickers: Option<Vec<String>>,
    pub shots: Option<u64>,
}

/// Loads `path` if given (defaults otherwise), applies `overrides` and validates.
pub fn resolve(path: Option<&Path>, overrides: &Overrides) -> Result<RunConfig> {
    let mut config = match path {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    config.apply(overrides);
    config.validate()?;
    Ok(config)
}
