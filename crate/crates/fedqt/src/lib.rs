//! Files, configuration, parallel execution and experiment commands for
//! [`fedqt_core`].
//!
//! The `fedqt` binary is a thin clap front end over [`experiments`].

pub mod config;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod model_file;
pub mod series_csv;

pub use config::ExperimentConfig;
pub use error::{Error, Result};
