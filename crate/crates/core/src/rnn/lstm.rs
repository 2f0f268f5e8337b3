//! Classical LSTM over a scalar input stream.
//!
//! Weight layout of the flat vector `κ` (the contract with [`crate::qtgen`]):
//! for each gate in the order forget, input, candidate, output: `W_g`
//! (`h × (h + 1)`, row-major, acting on `v_t = [h_{t-1}, x_t]`) then `b_g`
//! (`h`); after the four gates, the output head `W_out` (`h`) and `b_out`.

use alloc::vec;
use alloc::vec::Vec;

use super::{CellState, Sample};
use crate::error::{Error, Result};
use crate::math::{sigmoid, sigmoid_grad_from_output, tanh, tanh_grad_from_output};

pub const INPUT_SIZE: usize = 1;

/// Gate order inside `κ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    Forget = 0,
    Input = 1,
    Candidate = 2,
    Output = 3,
}

pub const GATES: [Gate; 4] = [Gate::Forget, Gate::Input, Gate::Candidate, Gate::Output];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LstmConfig {
    pub hidden_size: usize,
}

impl Default for LstmConfig {
    fn default() -> Self {
        Self { hidden_size: 20 }
    }
}

impl LstmConfig {
    pub fn new(hidden_size: usize) -> Result<Self> {
        if hidden_size == 0 {
            return Err(Error::Config {
                key: "hidden_size",
                reason: "must be at least 1",
            });
        }
        Ok(Self { hidden_size })
    }

    /// Width of `v_t`.
    pub fn concat_size(&self) -> usize {
        self.hidden_size + INPUT_SIZE
    }

    fn gate_block(&self) -> usize {
        self.hidden_size * self.concat_size() + self.hidden_size
    }

    /// `4·(h·(1 + h) + h) + h + 1`; 1781 for `h = 20`.
    pub fn param_count(&self) -> usize {
        4 * self.gate_block() + self.hidden_size + 1
    }

    fn weight_offset(&self, gate: Gate) -> usize {
        gate as usize * self.gate_block()
    }

    fn bias_offset(&self, gate: Gate) -> usize {
        self.weight_offset(gate) + self.hidden_size * self.concat_size()
    }

    fn head_offset(&self) -> usize {
        4 * self.gate_block()
    }
}

/// Flat parameter vector `κ` with the documented layout.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmWeights {
    config: LstmConfig,
    kappa: Vec<f64>,
}

impl LstmWeights {
    pub fn new(config: LstmConfig, kappa: Vec<f64>) -> Result<Self> {
        if kappa.len() != config.param_count() {
            return Err(Error::Dimension {
                what: "LSTM weights",
                expected: config.param_count(),
                found: kappa.len(),
            });
        }
        Ok(Self { config, kappa })
    }

    pub fn zeros(config: LstmConfig) -> Self {
        Self {
            kappa: vec![0.0; config.param_count()],
            config,
        }
    }

    pub fn config(&self) -> LstmConfig {
        self.config
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.kappa
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.kappa
    }

    /// `W_g` row-major.
    pub fn gate_weights(&self, gate: Gate) -> &[f64] {
        let start = self.config.weight_offset(gate);
        &self.kappa[start..start + self.config.hidden_size * self.config.concat_size()]
    }

    pub fn gate_bias(&self, gate: Gate) -> &[f64] {
        let start = self.config.bias_offset(gate);
        &self.kappa[start..start + self.config.hidden_size]
    }

    pub fn head_weights(&self) -> &[f64] {
        let start = self.config.head_offset();
        &self.kappa[start..start + self.config.hidden_size]
    }

    pub fn head_bias(&self) -> f64 {
        self.kappa[self.kappa.len() - 1]
    }

    fn preactivation(&self, gate: Gate, v: &[f64]) -> Vec<f64> {
        let w = self.gate_weights(gate);
        self.gate_bias(gate)
            .iter()
            .zip(w.chunks(v.len()))
            .map(|(b, row)| b + crate::math::dot(row, v))
            .collect()
    }

    /// One step of the cell given `v_t = [h_{t-1}, x_t]` and `c_{t-1}`.
    pub fn cell_forward(&self, v: &[f64], c_prev: &[f64]) -> Result<CellState> {
        Ok(self.cell_forward_cached(v, c_prev)?.state())
    }

    fn cell_forward_cached(&self, v: &[f64], c_prev: &[f64]) -> Result<StepCache> {
        let h = self.config.hidden_size;
        if v.len() != self.config.concat_size() {
            return Err(Error::Dimension {
                what: "cell input v_t",
                expected: self.config.concat_size(),
                found: v.len(),
            });
        }
        if c_prev.len() != h {
            return Err(Error::Dimension {
                what: "previous cell state",
                expected: h,
                found: c_prev.len(),
            });
        }
        let f: Vec<f64> = self
            .preactivation(Gate::Forget, v)
            .into_iter()
            .map(sigmoid)
            .collect();
        let i: Vec<f64> = self
            .preactivation(Gate::Input, v)
            .into_iter()
            .map(sigmoid)
            .collect();
        let g: Vec<f64> = self
            .preactivation(Gate::Candidate, v)
            .into_iter()
            .map(tanh)
            .collect();
        let o: Vec<f64> = self
            .preactivation(Gate::Output, v)
            .into_iter()
            .map(sigmoid)
            .collect();
        let c: Vec<f64> = (0..h).map(|k| f[k] * c_prev[k] + i[k] * g[k]).collect();
        let tanh_c: Vec<f64> = c.iter().map(|&x| tanh(x)).collect();
        Ok(StepCache {
            v: v.to_vec(),
            c_prev: c_prev.to_vec(),
            gates: [f, i, g, o],
            c,
            tanh_c,
        })
    }

    /// Runs the cell over `window` from zero state and applies the head.
    pub fn sequence_forward(&self, window: &[f64]) -> Result<f64> {
        let (_, h_last) = self.unroll(window)?;
        Ok(self.head(&h_last))
    }

    fn head(&self, h_last: &[f64]) -> f64 {
        self.head_bias() + crate::math::dot(self.head_weights(), h_last)
    }

    fn unroll(&self, window: &[f64]) -> Result<(Vec<StepCache>, Vec<f64>)> {
        if window.is_empty() {
            return Err(Error::Empty("input window"));
        }
        let h = self.config.hidden_size;
        let mut hidden = vec![0.0; h];
        let mut cell = vec![0.0; h];
        let mut v = vec![0.0; h + 1];
        let mut steps = Vec::with_capacity(window.len());
        for &x in window {
            v[..h].copy_from_slice(&hidden);
            v[h] = x;
            let step = self.cell_forward_cached(&v, &cell)?;
            hidden = step.hidden();
            cell.copy_from_slice(&step.c);
            steps.push(step);
        }
        Ok((steps, hidden))
    }

    pub fn predict(&self, samples: &[Sample]) -> Result<Vec<f64>> {
        samples
            .iter()
            .map(|s| self.sequence_forward(&s.input))
            .collect()
    }

    /// MSE over `batch` and its exact gradient with respect to `κ`.
    pub fn loss_and_grad(&self, batch: &[Sample]) -> Result<(f64, Vec<f64>)> {
        if batch.is_empty() {
            return Err(Error::Empty("training batch"));
        }
        let cfg = self.config;
        let h = cfg.hidden_size;
        let n = cfg.concat_size();
        let scale = 2.0 / batch.len() as f64;
        let mut grad = vec![0.0; cfg.param_count()];
        let mut loss = 0.0;

        for sample in batch {
            let (steps, h_last) = self.unroll(&sample.input)?;
            let residual = self.head(&h_last) - sample.target;
            loss += residual * residual;
            let dpred = scale * residual;
            if dpred == 0.0 {
                continue;
            }

            let head = cfg.head_offset();
            for k in 0..h {
                grad[head + k] += dpred * h_last[k];
            }
            grad[head + h] += dpred;

            let mut dh: Vec<f64> = self.head_weights().iter().map(|w| dpred * w).collect();
            let mut dc = vec![0.0; h];
            for step in steps.iter().rev() {
                let [f, i, g, o] = &step.gates;
                let mut dz = [vec![0.0; h], vec![0.0; h], vec![0.0; h], vec![0.0; h]];
                for k in 0..h {
                    let dck = dc[k] + dh[k] * o[k] * tanh_grad_from_output(step.tanh_c[k]);
                    dz[Gate::Output as usize][k] =
                        dh[k] * step.tanh_c[k] * sigmoid_grad_from_output(o[k]);
                    dz[Gate::Forget as usize][k] =
                        dck * step.c_prev[k] * sigmoid_grad_from_output(f[k]);
                    dz[Gate::Input as usize][k] = dck * g[k] * sigmoid_grad_from_output(i[k]);
                    dz[Gate::Candidate as usize][k] = dck * i[k] * tanh_grad_from_output(g[k]);
                    dc[k] = dck * f[k];
                }

                let mut dv = vec![0.0; n];
                for gate in GATES {
                    let dzg = &dz[gate as usize];
                    let w_off = cfg.weight_offset(gate);
                    let b_off = cfg.bias_offset(gate);
                    let w = self.gate_weights(gate);
                    for r in 0..h {
                        let d = dzg[r];
                        grad[b_off + r] += d;
                        for col in 0..n {
                            grad[w_off + r * n + col] += d * step.v[col];
                            dv[col] += w[r * n + col] * d;
                        }
                    }
                }
                dh.copy_from_slice(&dv[..h]);
            }
        }
        Ok((loss / batch.len() as f64, grad))
    }
}

struct StepCache {
    v: Vec<f64>,
    c_prev: Vec<f64>,
    /// Post-activation `f, i, C̃, o`.
    gates: [Vec<f64>; 4],
    c: Vec<f64>,
    tanh_c: Vec<f64>,
}

impl StepCache {
    fn hidden(&self) -> Vec<f64> {
        self.gates[Gate::Output as usize]
            .iter()
            .zip(&self.tanh_c)
            .map(|(o, t)| o * t)
            .collect()
    }

    fn state(&self) -> CellState {
        CellState {
            h: self.hidden(),
            c: self.c.clone(),
        }
    }
}
