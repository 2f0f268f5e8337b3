//! The four experiment commands, as library calls.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use fedqt_core::fed::{ClientExecutor, FedOutcome, Federation, RoundRecord};
use fedqt_core::gwdata::{self, Rescale, SeriesDataset, WaveformSpec};
use fedqt_core::rnn::{Architecture, ModelKind, ParamCounts, QtLstmConfig};

use crate::config::{DataSource, ExperimentConfig};
use crate::error::{Error, Result};
use crate::exec::Rayon;
use crate::{model_file, series_csv};

pub const HISTORY_FILE: &str = "history.csv";
pub const PREDICTION_FILE: &str = "prediction.csv";
pub const MODEL_FILE: &str = "model.txt";
pub const CONFIG_FILE: &str = "config.toml";
pub const SWEEP_FILE: &str = "sweep.csv";

/// Writes the synthesized waveform of a built-in setting.
pub fn cmd_synth(setting: u8, seed: u64, out: &Path) -> Result<Vec<f64>> {
    let spec = WaveformSpec::setting(setting)
        .map_err(|_| Error::config("setting", "must be 1, 2 or 3"))?
        .with_seed(seed);
    let series = gwdata::synthesize(&spec)?;
    series_csv::save_series_csv(out, &series)?;
    Ok(series)
}

/// Classical and quantum trainable counts. `qt_layers` only matters for
/// QT-LSTM; the other models use their reference sizes.
pub fn cmd_params(kind: ModelKind, qt_layers: usize) -> Result<ParamCounts> {
    let arch = match kind {
        ModelKind::Lstm => Architecture::Lstm(Default::default()),
        ModelKind::Qlstm => Architecture::Qlstm(Default::default()),
        ModelKind::QtLstm => {
            if qt_layers == 0 {
                return Err(Error::config("layers", "must be at least 1"));
            }
            Architecture::QtLstm(QtLstmConfig {
                layers: qt_layers,
                ..Default::default()
            })
        }
    };
    Ok(arch.counts()?)
}

pub fn format_params(kind: ModelKind, counts: &ParamCounts) -> String {
    format!(
        "model={kind} classical={} quantum={} total={}",
        counts.classical,
        counts.quantum,
        counts.total()
    )
}

/// Series and windows described by `cfg`.
pub fn load_dataset(cfg: &ExperimentConfig) -> Result<SeriesDataset> {
    let (series, rescale) = match cfg.data_source()? {
        DataSource::Synthetic(spec) => (gwdata::synthesize(&spec)?, Rescale::None),
        DataSource::Csv(path) => (series_csv::load_series_csv(&path)?, Rescale::MinMax),
    };
    Ok(gwdata::make_dataset(
        &series,
        cfg.lookback,
        cfg.split_fraction,
        rescale,
    )?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutput {
    pub dataset: SeriesDataset,
    pub outcome: FedOutcome,
    /// One-step prediction for each series index; `None` before the first
    /// full window.
    pub predictions: Vec<Option<f64>>,
}

impl TrainOutput {
    pub fn final_record(&self) -> &RoundRecord {
        self.outcome.history.last().expect("at least one round")
    }
}

/// Federated training without touching the filesystem (beyond reading a CSV
/// input). `observer` sees each round as it completes.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    executor: &dyn ClientExecutor,
    observer: &mut dyn FnMut(&RoundRecord),
) -> Result<TrainOutput> {
    cfg.validate()?;
    let arch = cfg.architecture()?;
    let fed_cfg = cfg.fed_config()?;
    let dataset = load_dataset(cfg)?;
    let fed = Federation::new(arch, fed_cfg, dataset.train.clone(), dataset.test.clone())?;
    let outcome = fed.run(executor, observer)?;
    let predictor = arch.predictor(outcome.model.params())?;
    let mut predictions = vec![None; dataset.series.len()];
    for s in dataset.all_samples() {
        predictions[s.t] = Some(predictor.sequence_forward(&s.input)?);
    }
    Ok(TrainOutput {
        dataset,
        outcome,
        predictions,
    })
}

pub fn render_history(history: &[RoundRecord]) -> String {
    let mut out = String::from("round,train_loss,test_loss\n");
    for r in history {
        writeln!(out, "{},{},{}", r.round, r.train_loss, r.test_loss).unwrap();
    }
    out
}

pub fn render_predictions(series: &[f64], predictions: &[Option<f64>]) -> String {
    let mut out = String::from("t,truth,prediction\n");
    for (t, (truth, pred)) in series.iter().zip(predictions).enumerate() {
        match pred {
            Some(p) => writeln!(out, "{t},{truth},{p}").unwrap(),
            None => writeln!(out, "{t},{truth},").unwrap(),
        }
    }
    out
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Trains and writes `history.csv`, `prediction.csv`, `model.txt` and the
/// resolved `config.toml` into `out_dir`.
pub fn cmd_train(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    observer: &mut dyn FnMut(&RoundRecord),
) -> Result<TrainOutput> {
    cfg.validate()?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let output = run_experiment(cfg, &Rayon, observer)?;
    let mut resolved = cfg.clone();
    resolved.out_dir = out_dir.to_string_lossy().into_owned();
    write(&out_dir.join(CONFIG_FILE), &resolved.to_text())?;
    write(
        &out_dir.join(HISTORY_FILE),
        &render_history(&output.outcome.history),
    )?;
    write(
        &out_dir.join(PREDICTION_FILE),
        &render_predictions(&output.dataset.series, &output.predictions),
    )?;
    model_file::save(&out_dir.join(MODEL_FILE), &output.outcome.model)?;
    Ok(output)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub layers: usize,
    pub quantum_params: usize,
    pub final_train_loss: f64,
    pub final_test_loss: f64,
}

pub fn render_sweep(rows: &[SweepRow]) -> String {
    let mut out = String::from("layers,quantum_params,final_train_loss,final_test_loss\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{}",
            r.layers, r.quantum_params, r.final_train_loss, r.final_test_loss
        )
        .unwrap();
    }
    out
}

/// Parses `1,2,4` into layer counts, each at least 1.
pub fn parse_layer_list(text: &str) -> Result<Vec<usize>> {
    let layers = text
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| Error::config("layers", "expected comma-separated integers"))?;
    if layers.is_empty() || layers.contains(&0) {
        return Err(Error::config(
            "layers",
            "need at least one layer count, each >= 1",
        ));
    }
    Ok(layers)
}

/// Runs [`cmd_train`] once per layer count into `out_dir/L<k>/` and writes
/// `out_dir/sweep.csv`. QT-LSTM only.
pub fn cmd_sweep(
    cfg: &ExperimentConfig,
    layers: &[usize],
    out_dir: &Path,
    observer: &mut dyn FnMut(usize, &RoundRecord),
) -> Result<Vec<SweepRow>> {
    if cfg.model_kind()? != ModelKind::QtLstm {
        return Err(Error::config("model", "the layer sweep needs qtlstm"));
    }
    if layers.is_empty() || layers.contains(&0) {
        return Err(Error::config(
            "layers",
            "need at least one layer count, each >= 1",
        ));
    }
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut rows = Vec::with_capacity(layers.len());
    for &l in layers {
        let run_cfg = ExperimentConfig {
            qt_layers: l,
            ..cfg.clone()
        };
        let out = cmd_train(&run_cfg, &out_dir.join(format!("L{l}")), &mut |r| {
            observer(l, r)
        })?;
        let last = out.final_record();
        rows.push(SweepRow {
            layers: l,
            quantum_params: run_cfg.architecture()?.counts()?.quantum,
            final_train_loss: last.train_loss,
            final_test_loss: last.test_loss,
        });
    }
    write(&out_dir.join(SWEEP_FILE), &render_sweep(&rows))?;
    Ok(rows)
}
