//! Sequence models: classical LSTM, QLSTM and QT-LSTM.
//!
//! All three predict the next sample of a scalar series from a lookback
//! window, starting from `h_0 = c_0 = 0`, and are trained on mean squared
//! error. [`Architecture`] gives them one flat-parameter interface for the
//! federated layer.

pub mod lstm;
pub mod qlstm;
pub mod qtlstm;

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{self, Purpose};

pub use lstm::{LstmConfig, LstmWeights};
pub use qlstm::{QlstmConfig, QlstmModel};
pub use qtlstm::QtLstmConfig;

use crate::qtgen::QtModel;

/// One training or evaluation example: `input` precedes series index `t`,
/// whose value is `target`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: usize,
    pub input: Vec<f64>,
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellState {
    pub h: Vec<f64>,
    pub c: Vec<f64>,
}

pub fn mse_loss(predictions: &[f64], targets: &[f64]) -> Result<f64> {
    if predictions.len() != targets.len() {
        return Err(Error::Dimension {
            what: "targets",
            expected: predictions.len(),
            found: targets.len(),
        });
    }
    if predictions.is_empty() {
        return Err(Error::Empty("predictions"));
    }
    let sum: f64 = predictions
        .iter()
        .zip(targets)
        .map(|(p, t)| (p - t) * (p - t))
        .sum();
    Ok(sum / predictions.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    Lstm,
    Qlstm,
    QtLstm,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Lstm => "lstm",
            ModelKind::Qlstm => "qlstm",
            ModelKind::QtLstm => "qtlstm",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lstm" => Ok(ModelKind::Lstm),
            "qlstm" => Ok(ModelKind::Qlstm),
            "qtlstm" | "qt-lstm" => Ok(ModelKind::QtLstm),
            _ => Err(Error::Config {
                key: "model",
                reason: "expected one of lstm, qlstm, qtlstm",
            }),
        }
    }
}

/// A model family together with its sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Architecture {
    Lstm(LstmConfig),
    Qlstm(QlstmConfig),
    QtLstm(QtLstmConfig),
}

/// Trainable parameter counts split by where they live.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamCounts {
    pub classical: usize,
    pub quantum: usize,
}

impl ParamCounts {
    pub fn total(&self) -> usize {
        self.classical + self.quantum
    }
}

impl Architecture {
    pub fn kind(&self) -> ModelKind {
        match self {
            Architecture::Lstm(_) => ModelKind::Lstm,
            Architecture::Qlstm(_) => ModelKind::Qlstm,
            Architecture::QtLstm(_) => ModelKind::QtLstm,
        }
    }

    pub fn counts(&self) -> Result<ParamCounts> {
        Ok(match self {
            Architecture::Lstm(c) => ParamCounts {
                classical: c.param_count(),
                quantum: 0,
            },
            Architecture::Qlstm(c) => ParamCounts {
                classical: c.classical_params(),
                quantum: c.quantum_params(),
            },
            Architecture::QtLstm(c) => {
                let shape = c.shape()?;
                ParamCounts {
                    classical: shape.classical_params(),
                    quantum: shape.quantum_params(),
                }
            }
        })
    }

    /// Length of the flat trainable vector exchanged between nodes.
    pub fn param_count(&self) -> Result<usize> {
        Ok(self.counts()?.total())
    }

    /// Seeded starting point.
    ///
    /// LSTM weights are uniform in `[-0.5, 0.5]`; circuit angles uniform in
    /// `[0, π]`; QT mapping parameters uniform in `[-0.1, 0.1]`; the QLSTM
    /// head uniform in `[-0.5, 0.5]`.
    pub fn init_params(&self, seed: u64) -> Result<Vec<f64>> {
        let mut rng = rng::stream(seed, Purpose::Init, 0, 0);
        let pi = core::f64::consts::PI;
        Ok(match self {
            Architecture::Lstm(c) => (0..c.param_count())
                .map(|_| rng.random_range(-0.5..=0.5))
                .collect(),
            Architecture::Qlstm(c) => (0..c.param_count())
                .map(|k| {
                    if k < c.quantum_params() {
                        rng.random_range(0.0..=pi)
                    } else {
                        rng.random_range(-0.5..=0.5)
                    }
                })
                .collect(),
            Architecture::QtLstm(c) => {
                let shape = c.shape()?;
                (0..shape.total_params())
                    .map(|k| {
                        if k < shape.quantum_params() {
                            rng.random_range(0.0..=pi)
                        } else {
                            rng.random_range(-0.1..=0.1)
                        }
                    })
                    .collect()
            }
        })
    }

    /// MSE over `batch` and its gradient in the flat layout.
    pub fn loss_and_grad(&self, params: &[f64], batch: &[Sample]) -> Result<(f64, Vec<f64>)> {
        match self {
            Architecture::Lstm(c) => LstmWeights::new(*c, params.to_vec())?.loss_and_grad(batch),
            Architecture::Qlstm(c) => QlstmModel::from_flat(*c, params)?.loss_and_grad(batch),
            Architecture::QtLstm(c) => {
                let model = QtModel::from_flat(c.shape()?, params)?;
                let (loss, mut grad, dbeta) = qtlstm::loss_and_grad(c.lstm, &model, batch)?;
                grad.extend(dbeta);
                Ok((loss, grad))
            }
        }
    }

    /// Inference-ready model. QT-LSTM parameters are turned into plain LSTM
    /// weights here, once.
    pub fn predictor(&self, params: &[f64]) -> Result<Predictor> {
        Ok(match self {
            Architecture::Lstm(c) => Predictor::Lstm(LstmWeights::new(*c, params.to_vec())?),
            Architecture::Qlstm(c) => Predictor::Qlstm(QlstmModel::from_flat(*c, params)?),
            Architecture::QtLstm(c) => {
                let model = QtModel::from_flat(c.shape()?, params)?;
                Predictor::Lstm(qtlstm::materialize(c.lstm, &model)?)
            }
        })
    }

    /// MSE of the model described by `params` on `samples`.
    pub fn loss(&self, params: &[f64], samples: &[Sample]) -> Result<f64> {
        let predictor = self.predictor(params)?;
        let preds = predictor.predict(samples)?;
        let targets: Vec<f64> = samples.iter().map(|s| s.target).collect();
        mse_loss(&preds, &targets)
    }
}

/// A model ready for forward evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum Predictor {
    Lstm(LstmWeights),
    Qlstm(QlstmModel),
}

impl Predictor {
    pub fn sequence_forward(&self, window: &[f64]) -> Result<f64> {
        match self {
            Predictor::Lstm(w) => w.sequence_forward(window),
            Predictor::Qlstm(m) => m.sequence_forward(window),
        }
    }

    pub fn predict(&self, samples: &[Sample]) -> Result<Vec<f64>> {
        samples
            .iter()
            .map(|s| self.sequence_forward(&s.input))
            .collect()
    }
}
