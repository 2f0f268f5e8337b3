//! Chirp waveforms and windowed next-sample datasets.
//!
//! The synthetic signal is a Newtonian-order inspiral (amplitude
//! `(t_c - t + ε)^(-1/4)`, frequency `f₀ (t_c - t + ε)^(-3/8)`) followed by an
//! exponentially damped ringdown that inherits the merger amplitude and phase.
//! Series are scaled so `max |h| = 0.8`, which keeps every value a
//! comfortable rotation angle.

use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::math::{cos, exp, pow};
use crate::rng::{self, Purpose};
use crate::rnn::Sample;

/// Peak absolute value of every prepared series.
pub const PEAK: f64 = 0.8;

/// Default series length.
pub const DEFAULT_SAMPLES: usize = 300;

const TAU: f64 = 2.0 * core::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveformSpec {
    /// 1, 2 or 3 for the built-in settings; 0 for a custom spec.
    pub setting_id: u8,
    pub total_samples: usize,
    pub merger_index: usize,
    /// Cycles per sample.
    pub base_frequency: f64,
    pub amplitude_floor: f64,
    /// Cycles per sample.
    pub ringdown_frequency: f64,
    /// Samples.
    pub ringdown_decay: f64,
    /// Drives the initial phase offset.
    pub seed: u64,
}

impl WaveformSpec {
    /// Built-in setting `1`, `2` or `3` with `T = 300` and `ε = 1`.
    pub fn setting(id: u8) -> Result<Self> {
        let (t_c, f0, f_r, tau) = match id {
            1 => (200, 0.02, 0.12, 15.0),
            2 => (180, 0.03, 0.16, 10.0),
            3 => (220, 0.015, 0.10, 20.0),
            _ => {
                return Err(Error::Config {
                    key: "setting",
                    reason: "must be 1, 2 or 3",
                })
            }
        };
        Ok(Self {
            setting_id: id,
            total_samples: DEFAULT_SAMPLES,
            merger_index: t_c,
            base_frequency: f0,
            amplitude_floor: 1.0,
            ringdown_frequency: f_r,
            ringdown_decay: tau,
            seed: 0,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |key, reason| Err(Error::Config { key, reason });
        if self.merger_index == 0 || self.merger_index >= self.total_samples {
            return bad("merger_index", "must satisfy 0 < t_c < T");
        }
        if !(self.amplitude_floor > 0.0 && self.amplitude_floor.is_finite()) {
            return bad("amplitude_floor", "must be positive and finite");
        }
        if !(self.ringdown_decay > 0.0 && self.ringdown_decay.is_finite()) {
            return bad("ringdown_decay", "must be positive and finite");
        }
        if !self.base_frequency.is_finite() || !self.ringdown_frequency.is_finite() {
            return bad("frequency", "must be finite");
        }
        Ok(())
    }

    fn amplitude(&self, t: usize) -> f64 {
        pow((self.merger_index - t) as f64 + self.amplitude_floor, -0.25)
    }

    fn frequency(&self, t: usize) -> f64 {
        self.base_frequency
            * pow(
                (self.merger_index - t) as f64 + self.amplitude_floor,
                -0.375,
            )
    }

    /// Phase before the first sample.
    pub fn initial_phase(&self) -> f64 {
        rng::stream(self.seed, Purpose::Waveform, 0, 0).random_range(0.0..TAU)
    }
}

/// Unnormalized waveform; [`synthesize`] rescales it.
pub fn raw_waveform(spec: &WaveformSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let t_c = spec.merger_index;
    let mut out = Vec::with_capacity(spec.total_samples);
    let mut phase = spec.initial_phase();
    for t in 0..t_c {
        phase += TAU * spec.frequency(t);
        out.push(spec.amplitude(t) * cos(phase));
    }
    // φ(t_c) continues the inspiral recursion with f(t_c) = f₀ ε^(-3/8).
    let merger_phase = phase + TAU * spec.base_frequency * pow(spec.amplitude_floor, -0.375);
    let merger_amp = pow(spec.amplitude_floor, -0.25);
    for t in t_c..spec.total_samples {
        let dt = (t - t_c) as f64;
        out.push(
            merger_amp
                * exp(-dt / spec.ringdown_decay)
                * cos(TAU * spec.ringdown_frequency * dt + merger_phase),
        );
    }
    Ok(out)
}

/// Deterministic chirp of `spec.total_samples` values with `max |h| = 0.8`.
pub fn synthesize(spec: &WaveformSpec) -> Result<Vec<f64>> {
    let mut h = raw_waveform(spec)?;
    let peak = h.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if peak == 0.0 {
        return Err(Error::Empty("waveform amplitude"));
    }
    let scale = PEAK / peak;
    for x in &mut h {
        *x *= scale;
    }
    Ok(h)
}

/// How a series is brought into range before windowing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rescale {
    /// Already normalized, e.g. straight from [`synthesize`].
    None,
    /// Affine map of `[min, max]` onto `[-0.8, 0.8]`.
    MinMax,
}

/// How raw values were mapped into the prepared series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Normalization {
    Identity,
    /// `[min, max]` onto `[-0.8, 0.8]`.
    MinMax {
        min: f64,
        max: f64,
    },
    /// A constant series, parked at zero.
    Flat,
}

impl Normalization {
    fn min_max(series: &[f64]) -> Self {
        let (min, max) = series
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
                (lo.min(x), hi.max(x))
            });
        if max == min {
            Self::Flat
        } else {
            Self::MinMax { min, max }
        }
    }

    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            Self::Identity => x,
            Self::MinMax { min, max } => {
                (-PEAK + 2.0 * PEAK * ((x - min) / (max - min))).clamp(-PEAK, PEAK)
            }
            Self::Flat => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesDataset {
    /// The series the windows were cut from, after rescaling.
    pub series: Vec<f64>,
    pub lookback: usize,
    /// First series index whose target belongs to the test set.
    pub split_index: usize,
    pub normalization: Normalization,
    pub train: Vec<Sample>,
    pub test: Vec<Sample>,
}

impl SeriesDataset {
    /// Train windows followed by test windows, in series order.
    pub fn all_samples(&self) -> impl Iterator<Item = &Sample> {
        self.train.iter().chain(self.test.iter())
    }
}

/// `⌊fraction · len⌋`, tolerant of `2/3 · 300` landing a hair under 200.
pub fn split_index(len: usize, fraction: f64) -> usize {
    let s = fraction * len as f64 + 1e-9;
    s as usize
}

/// Sliding windows `series[t-w..t] → series[t]` for `t = w..len`, split by
/// target index at `⌊fraction · len⌋`.
pub fn make_dataset(
    series: &[f64],
    lookback: usize,
    split_fraction: f64,
    rescale: Rescale,
) -> Result<SeriesDataset> {
    if lookback == 0 {
        return Err(Error::Config {
            key: "lookback",
            reason: "must be at least 1",
        });
    }
    if !(split_fraction > 0.0 && split_fraction < 1.0) {
        return Err(Error::Config {
            key: "split_fraction",
            reason: "must lie strictly between 0 and 1",
        });
    }
    if series.len() < lookback + 1 {
        return Err(Error::Dimension {
            what: "series (too short for lookback)",
            expected: lookback + 1,
            found: series.len(),
        });
    }
    if series.iter().any(|x| !x.is_finite()) {
        return Err(Error::Config {
            key: "series",
            reason: "contains a non-finite value",
        });
    }
    let normalization = match rescale {
        Rescale::None => Normalization::Identity,
        Rescale::MinMax => Normalization::min_max(series),
    };
    let series: Vec<f64> = series.iter().map(|&x| normalization.apply(x)).collect();
    let split = split_index(series.len(), split_fraction);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for t in lookback..series.len() {
        let sample = Sample {
            t,
            input: series[t - lookback..t].to_vec(),
            target: series[t],
        };
        if t < split {
            train.push(sample);
        } else {
            test.push(sample);
        }
    }
    Ok(SeriesDataset {
        series,
        lookback,
        split_index: split,
        normalization,
        train,
        test,
    })
}
