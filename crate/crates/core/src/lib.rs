//! Federated Quantum-Train LSTM primitives.
//!
//! Everything in this crate is pure computation over owned buffers and
//! builds without `std`: a dense statevector engine ([`qsim`]), the two
//! variational circuit flavours built on it ([`vqc`]), the Quantum-Train
//! weight generator ([`qtgen`]), the classical / quantum / QT-generated LSTM
//! models with exact gradients ([`rnn`]), an in-process federated averaging
//! orchestrator ([`fed`]) and a chirp waveform synthesizer plus windowed
//! dataset builder ([`gwdata`]).
//!
//! File formats, configuration and the command line live in the companion
//! `fedqt` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod fed;
pub mod gwdata;
pub mod math;
pub mod optim;
pub mod qsim;
pub mod qtgen;
pub mod rng;
pub mod rnn;
pub mod vqc;

pub use error::{Error, Result};
