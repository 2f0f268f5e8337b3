//! LSTM whose four gate networks are data-encoding VQCs.
//!
//! Each gate circuit encodes `v_t = [h_{t-1}, x_t]` on `hidden + 1` qubits;
//! the first `hidden` Pauli-Z expectations are the gate pre-activations, to
//! which the usual σ / tanh are applied. A classical affine head maps the
//! final hidden state to the prediction.
//!
//! Flat layout: four blocks of `(hidden + 1) · layers` angles (forget, input,
//! candidate, output), then `W_out` (`hidden`) and `b_out`.

use alloc::vec;
use alloc::vec::Vec;

use super::lstm::{Gate, GATES};
use super::{CellState, Sample};
use crate::error::{Error, Result};
use crate::math::{sigmoid, sigmoid_grad_from_output, tanh, tanh_grad_from_output};
use crate::vqc::{Jacobian, Readout, VqcArchitecture, VqcParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QlstmConfig {
    pub hidden_size: usize,
    pub n_layers: usize,
}

impl Default for QlstmConfig {
    fn default() -> Self {
        Self {
            hidden_size: 4,
            n_layers: 10,
        }
    }
}

impl QlstmConfig {
    pub fn new(hidden_size: usize, n_layers: usize) -> Result<Self> {
        if hidden_size == 0 {
            return Err(Error::Config {
                key: "qlstm_hidden_size",
                reason: "must be at least 1",
            });
        }
        let cfg = Self {
            hidden_size,
            n_layers,
        };
        cfg.circuit()?;
        Ok(cfg)
    }

    /// `dim(v_t)`.
    pub fn n_qubits(&self) -> usize {
        self.hidden_size + 1
    }

    pub fn circuit(&self) -> Result<VqcArchitecture> {
        VqcArchitecture::encoding(self.n_qubits(), self.n_layers)
    }

    pub fn angles_per_gate(&self) -> usize {
        self.n_qubits() * self.n_layers
    }

    /// 200 for the default configuration.
    pub fn quantum_params(&self) -> usize {
        4 * self.angles_per_gate()
    }

    /// Output head; 5 for the default configuration.
    pub fn classical_params(&self) -> usize {
        self.hidden_size + 1
    }

    pub fn param_count(&self) -> usize {
        self.quantum_params() + self.classical_params()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QlstmModel {
    config: QlstmConfig,
    circuit: VqcArchitecture,
    gates: [VqcParams; 4],
    head_weights: Vec<f64>,
    head_bias: f64,
}

/// One recorded cell step.
struct StepCache {
    c_prev: Vec<f64>,
    /// Post-activation `f, i, C̃, o`.
    acts: [Vec<f64>; 4],
    c: Vec<f64>,
    tanh_c: Vec<f64>,
    param_jac: Option<[Jacobian; 4]>,
    input_jac: Option<[Jacobian; 4]>,
}

impl StepCache {
    fn hidden(&self) -> Vec<f64> {
        self.acts[Gate::Output as usize]
            .iter()
            .zip(&self.tanh_c)
            .map(|(o, t)| o * t)
            .collect()
    }
}

impl QlstmModel {
    pub fn from_flat(config: QlstmConfig, flat: &[f64]) -> Result<Self> {
        if flat.len() != config.param_count() {
            return Err(Error::Dimension {
                what: "QLSTM parameters",
                expected: config.param_count(),
                found: flat.len(),
            });
        }
        let circuit = config.circuit()?;
        let per = config.angles_per_gate();
        let gate = |g: usize| VqcParams::new(&circuit, flat[g * per..(g + 1) * per].to_vec());
        let gates = [gate(0)?, gate(1)?, gate(2)?, gate(3)?];
        let head = &flat[4 * per..];
        Ok(Self {
            config,
            circuit,
            gates,
            head_weights: head[..config.hidden_size].to_vec(),
            head_bias: head[config.hidden_size],
        })
    }

    pub fn config(&self) -> QlstmConfig {
        self.config
    }

    fn gate_activation(gate: Gate) -> fn(f64) -> f64 {
        match gate {
            Gate::Candidate => tanh,
            _ => sigmoid,
        }
    }

    fn step(&self, v: &[f64], c_prev: &[f64], grads: StepGrads) -> Result<StepCache> {
        let h = self.config.hidden_size;
        if v.len() != self.config.n_qubits() {
            return Err(Error::Dimension {
                what: "cell input v_t",
                expected: self.config.n_qubits(),
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
        let mut acts: [Vec<f64>; 4] = Default::default();
        let mut param_jac: [Jacobian; 4] = core::array::from_fn(|_| Jacobian::zeros(0, 0));
        let mut input_jac: [Jacobian; 4] = core::array::from_fn(|_| Jacobian::zeros(0, 0));
        for gate in GATES {
            let g = gate as usize;
            let z = if grads.params {
                let (z, jac) = self.circuit.forward_with_param_grad(
                    Some(v),
                    &self.gates[g],
                    Readout::PauliZ,
                )?;
                param_jac[g] = jac;
                z
            } else {
                self.circuit.expectations(v, &self.gates[g])?
            };
            if grads.inputs {
                input_jac[g] = self.circuit.input_shift_grad(v, &self.gates[g])?;
            }
            let act = Self::gate_activation(gate);
            acts[g] = z[..h].iter().map(|&x| act(x)).collect();
        }
        let [f, i, g, _] = &acts;
        let c: Vec<f64> = (0..h).map(|k| f[k] * c_prev[k] + i[k] * g[k]).collect();
        let tanh_c = c.iter().map(|&x| tanh(x)).collect();
        Ok(StepCache {
            c_prev: c_prev.to_vec(),
            acts,
            c,
            tanh_c,
            param_jac: grads.params.then_some(param_jac),
            input_jac: grads.inputs.then_some(input_jac),
        })
    }

    /// One cell step.
    pub fn cell_forward(&self, v: &[f64], c_prev: &[f64]) -> Result<CellState> {
        let step = self.step(v, c_prev, StepGrads::NONE)?;
        Ok(CellState {
            h: step.hidden(),
            c: step.c,
        })
    }

    fn unroll(&self, window: &[f64], with_grads: bool) -> Result<(Vec<StepCache>, Vec<f64>)> {
        if window.is_empty() {
            return Err(Error::Empty("input window"));
        }
        let h = self.config.hidden_size;
        let mut hidden = vec![0.0; h];
        let mut cell = vec![0.0; h];
        let mut v = vec![0.0; h + 1];
        let mut steps = Vec::with_capacity(window.len());
        for (t, &x) in window.iter().enumerate() {
            v[..h].copy_from_slice(&hidden);
            v[h] = x;
            let grads = StepGrads {
                params: with_grads,
                // h_0 is the constant zero state, nothing to propagate into.
                inputs: with_grads && t > 0,
            };
            let step = self.step(&v, &cell, grads)?;
            hidden = step.hidden();
            cell.copy_from_slice(&step.c);
            steps.push(step);
        }
        Ok((steps, hidden))
    }

    fn head(&self, h_last: &[f64]) -> f64 {
        self.head_bias + crate::math::dot(&self.head_weights, h_last)
    }

    pub fn sequence_forward(&self, window: &[f64]) -> Result<f64> {
        let (_, h_last) = self.unroll(window, false)?;
        Ok(self.head(&h_last))
    }

    pub fn predict(&self, samples: &[Sample]) -> Result<Vec<f64>> {
        samples
            .iter()
            .map(|s| self.sequence_forward(&s.input))
            .collect()
    }

    /// MSE over `batch` and its gradient in the flat layout.
    ///
    /// The head gradient is analytic. Circuit gradients come from parameter
    /// shift at every recorded `v_t` (two runs per angle per gate per step)
    /// and are chained through the BPTT recursion; the dependence of `v_t` on
    /// `h_{t-1}` uses the same shift rule on the encoding angles.
    pub fn loss_and_grad(&self, batch: &[Sample]) -> Result<(f64, Vec<f64>)> {
        if batch.is_empty() {
            return Err(Error::Empty("training batch"));
        }
        let cfg = self.config;
        let h = cfg.hidden_size;
        let nq = cfg.n_qubits();
        let per = cfg.angles_per_gate();
        let scale = 2.0 / batch.len() as f64;
        let mut grad = vec![0.0; cfg.param_count()];
        let mut loss = 0.0;

        for sample in batch {
            let (steps, h_last) = self.unroll(&sample.input, true)?;
            let residual = self.head(&h_last) - sample.target;
            loss += residual * residual;
            let dpred = scale * residual;

            let head = 4 * per;
            for k in 0..h {
                grad[head + k] += dpred * h_last[k];
            }
            grad[head + h] += dpred;

            let mut dh: Vec<f64> = self.head_weights.iter().map(|w| dpred * w).collect();
            let mut dc = vec![0.0; h];
            for step in steps.iter().rev() {
                let [f, i, g, o] = &step.acts;
                // Cotangents of the gate circuits' Z readouts; the input qubit
                // is not read out.
                let mut dz = [vec![0.0; nq], vec![0.0; nq], vec![0.0; nq], vec![0.0; nq]];
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
                let param_jac = step.param_jac.as_ref().expect("recorded with gradients");
                let mut dv = vec![0.0; nq];
                for gate in GATES {
                    let gi = gate as usize;
                    let dtheta = param_jac[gi].vjp(&dz[gi]);
                    for (acc, d) in grad[gi * per..(gi + 1) * per].iter_mut().zip(&dtheta) {
                        *acc += d;
                    }
                    if let Some(input_jac) = &step.input_jac {
                        for (acc, d) in dv.iter_mut().zip(input_jac[gi].vjp(&dz[gi])) {
                            *acc += d;
                        }
                    }
                }
                dh.copy_from_slice(&dv[..h]);
            }
        }
        Ok((loss / batch.len() as f64, grad))
    }
}

#[derive(Debug, Clone, Copy)]
struct StepGrads {
    params: bool,
    inputs: bool,
}

impl StepGrads {
    const NONE: Self = Self {
        params: false,
        inputs: false,
    };
}
