//! Flat `key = value` experiment configuration (TOML without tables).
//!
//! Every key is optional and unknown keys are rejected. Defaults follow the
//! reference experiment: QT-LSTM with 10 QT layers, 100 rounds, 4 clients,
//! 1 local epoch, Adam at 0.01, setting 1, lookback 8, 2/3 split.

use std::path::{Path, PathBuf};

use fedqt_core::fed::FedConfig;
use fedqt_core::gwdata::WaveformSpec;
use fedqt_core::optim::{OptimizerKind, OptimizerSpec};
use fedqt_core::rnn::{Architecture, LstmConfig, ModelKind, QlstmConfig, QtLstmConfig};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// `lstm`, `qlstm` or `qtlstm`.
    pub model: String,
    /// Variational layers of the QT generator.
    pub qt_layers: usize,
    /// Hidden width of the classical LSTM (also the QT-generated one).
    pub hidden_size: usize,
    pub qlstm_hidden_size: usize,
    pub qlstm_layers: usize,

    pub rounds: usize,
    pub clients: usize,
    pub local_epochs: usize,
    /// Mini-batch size; 0 means one full-shard step per epoch.
    pub batch_size: usize,
    /// `adam` or `sgd`.
    pub optimizer: String,
    pub lr: f64,
    /// Drives initialization, partitioning and mini-batch order.
    pub seed: u64,

    /// Built-in waveform 1, 2 or 3; ignored when `input` is set.
    pub setting: u8,
    /// Initial phase of the synthesized waveform.
    pub waveform_seed: u64,
    /// `t,h` CSV to train on instead of a synthesized waveform; min-max
    /// rescaled into [-0.8, 0.8].
    pub input: String,
    pub lookback: usize,
    pub split_fraction: f64,

    pub out_dir: String,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            model: "qtlstm".into(),
            qt_layers: 10,
            hidden_size: 20,
            qlstm_hidden_size: 4,
            qlstm_layers: 10,
            rounds: 100,
            clients: 4,
            local_epochs: 1,
            batch_size: 0,
            optimizer: "adam".into(),
            lr: 0.01,
            seed: 1,
            setting: 1,
            waveform_seed: 0,
            input: String::new(),
            lookback: 8,
            split_fraction: 2.0 / 3.0,
            out_dir: "out".into(),
        }
    }
}

/// Where the series comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Synthetic(WaveformSpec),
    Csv(PathBuf),
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::ConfigSyntax(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::parse(&text)?;
        // Relative input paths are relative to the config file.
        if !cfg.input.is_empty() && Path::new(&cfg.input).is_relative() {
            if let Some(dir) = path.parent() {
                cfg.input = dir.join(&cfg.input).to_string_lossy().into_owned();
            }
        }
        Ok(cfg)
    }

    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("flat config always serializes")
    }

    pub fn model_kind(&self) -> Result<ModelKind> {
        self.model
            .parse()
            .map_err(|_| Error::config("model", "expected one of lstm, qlstm, qtlstm"))
    }

    pub fn architecture(&self) -> Result<Architecture> {
        let lstm = || {
            LstmConfig::new(self.hidden_size)
                .map_err(|_| Error::config("hidden_size", "must be at least 1"))
        };
        Ok(match self.model_kind()? {
            ModelKind::Lstm => Architecture::Lstm(lstm()?),
            ModelKind::Qlstm => Architecture::Qlstm(
                QlstmConfig::new(self.qlstm_hidden_size, self.qlstm_layers)
                    .map_err(|e| Error::config("qlstm_hidden_size/qlstm_layers", e.to_string()))?,
            ),
            ModelKind::QtLstm => {
                if self.qt_layers == 0 {
                    return Err(Error::config("qt_layers", "must be at least 1"));
                }
                let c = QtLstmConfig {
                    lstm: lstm()?,
                    layers: self.qt_layers,
                };
                c.shape()
                    .map_err(|e| Error::config("qt_layers", e.to_string()))?;
                Architecture::QtLstm(c)
            }
        })
    }

    pub fn fed_config(&self) -> Result<FedConfig> {
        let kind = match self.optimizer.as_str() {
            "adam" => OptimizerKind::Adam,
            "sgd" => OptimizerKind::Sgd,
            _ => return Err(Error::config("optimizer", "expected adam or sgd")),
        };
        let cfg = FedConfig {
            rounds: self.rounds,
            clients: self.clients,
            local_epochs: self.local_epochs,
            batch_size: (self.batch_size > 0).then_some(self.batch_size),
            optimizer: OptimizerSpec { kind, lr: self.lr },
            seed: self.seed,
        };
        cfg.validate().map_err(|e| match e {
            fedqt_core::Error::Config { key, reason } => Error::config(key, reason),
            other => other.into(),
        })?;
        Ok(cfg)
    }

    pub fn data_source(&self) -> Result<DataSource> {
        if !self.input.is_empty() {
            return Ok(DataSource::Csv(PathBuf::from(&self.input)));
        }
        let spec = WaveformSpec::setting(self.setting)
            .map_err(|_| Error::config("setting", "must be 1, 2 or 3"))?;
        Ok(DataSource::Synthetic(spec.with_seed(self.waveform_seed)))
    }

    /// Checks every key whose range the parser cannot.
    pub fn validate(&self) -> Result<()> {
        self.architecture()?;
        self.fed_config()?;
        self.data_source()?;
        if self.lookback == 0 {
            return Err(Error::config("lookback", "must be at least 1"));
        }
        if !(self.split_fraction > 0.0 && self.split_fraction < 1.0) {
            return Err(Error::config(
                "split_fraction",
                "must lie strictly between 0 and 1",
            ));
        }
        Ok(())
    }
}
