use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use fedqt::experiments::{self, parse_layer_list};
use fedqt::ExperimentConfig;
use fedqt_core::rnn::ModelKind;

/// Federated Quantum-Train LSTM experiments.
#[derive(Debug, Parser)]
#[command(name = "fedqt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthesized waveform as `t,h` CSV.
    Synth {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        setting: u8,
        /// Waveform seed (initial phase).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Print classical and quantum trainable parameter counts.
    Params {
        #[arg(long, value_parser = parse_kind)]
        model: ModelKind,
        /// QT layers (QT-LSTM only).
        #[arg(long, default_value_t = 10)]
        layers: usize,
    },
    /// Federated training; writes history, predictions and the final model.
    Train {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_kind)]
        model: Option<ModelKind>,
        /// QT layers.
        #[arg(long)]
        layers: Option<usize>,
    },
    /// QT-LSTM layer sweep.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated layer counts.
        #[arg(long, default_value = "1,2,4,6,8,10")]
        layers: String,
    },
}

#[derive(Debug, clap::Args)]
struct Common {
    /// Flat key = value config; defaults apply for missing keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; overrides `out_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `seed`.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    setting: Option<u8>,
}

impl Common {
    fn resolve(&self) -> fedqt::Result<(ExperimentConfig, PathBuf)> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(setting) = self.setting {
            cfg.setting = setting;
        }
        let out = self
            .out
            .clone()
            .unwrap_or_else(|| PathBuf::from(&cfg.out_dir));
        Ok((cfg, out))
    }
}

fn parse_kind(s: &str) -> Result<ModelKind, String> {
    s.parse()
        .map_err(|_| "expected one of lstm, qlstm, qtlstm".to_owned())
}

fn report(round: usize, train: f64, test: f64) {
    eprintln!("round {round:>4}  train {train:.6e}  test {test:.6e}");
}

fn run(command: Command) -> fedqt::Result<()> {
    match command {
        Command::Synth { setting, seed, out } => {
            experiments::cmd_synth(setting, seed, &out)?;
        }
        Command::Params { model, layers } => {
            let counts = experiments::cmd_params(model, layers)?;
            println!("{}", experiments::format_params(model, &counts));
        }
        Command::Train {
            common,
            model,
            layers,
        } => {
            let (mut cfg, out) = common.resolve()?;
            if let Some(m) = model {
                cfg.model = m.to_string();
            }
            if let Some(l) = layers {
                cfg.qt_layers = l;
            }
            let output = experiments::cmd_train(&cfg, &out, &mut |r| {
                report(r.round, r.train_loss, r.test_loss)
            })?;
            let last = output.final_record();
            println!(
                "final train_loss={} test_loss={} out={}",
                last.train_loss,
                last.test_loss,
                out.display()
            );
        }
        Command::Sweep { common, layers } => {
            let (cfg, out) = common.resolve()?;
            let layers = parse_layer_list(&layers)?;
            let rows = experiments::cmd_sweep(&cfg, &layers, &out, &mut |l, r| {
                if r.round == cfg.rounds {
                    eprint!("L={l} ");
                    report(r.round, r.train_loss, r.test_loss);
                }
            })?;
            print!("{}", experiments::render_sweep(&rows));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
