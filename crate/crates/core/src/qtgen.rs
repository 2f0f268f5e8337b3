//! Quantum-Train weight generation.
//!
//! A QNN on `n_qt = ⌈log₂ p⌉` qubits produces `2^n_qt` basis probabilities.
//! A mapping model `M_β` turns each (basis bit string, probability) pair into
//! one classical weight, and the first `p` basis states give the full weight
//! vector `κ`. Only `(γ, β)` are trained.
//!
//! `M_β` is a single tanh neuron over `[s_1 … s_n, 2^n · prob]` where
//! `s_j = ±1` codes bit `j` of the basis index (big-endian, see [`crate::qsim`]).
//! Scaling the probability by `2^n` keeps it O(1) next to the bit inputs.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{tanh, tanh_grad_from_output};
use crate::qsim::basis_bit;
use crate::vqc::{Readout, VqcArchitecture, VqcParams};

/// `⌈log₂ p⌉`, the register size needed to index `p` weights.
pub fn required_qubits(p: usize) -> Result<usize> {
    if p < 2 {
        return Err(Error::TargetTooSmall { params: p });
    }
    Ok((usize::BITS - (p - 1).leading_zeros()) as usize)
}

/// Parameters of the mapping neuron: `n_qt + 1` weights and a bias.
#[derive(Debug, Clone, PartialEq)]
pub struct MappingParams {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl MappingParams {
    pub fn zeros(n_qt: usize) -> Self {
        Self {
            weights: vec![0.0; n_qt + 1],
            bias: 0.0,
        }
    }

    /// `n_qt + 2`.
    pub fn len(&self) -> usize {
        self.weights.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn n_qt(&self) -> usize {
        self.weights.len() - 1
    }
}

/// Input vector `u` of the mapping neuron for basis index `index`.
fn mapping_input(index: usize, prob: f64, n_qt: usize, out: &mut [f64]) {
    for (j, slot) in out[..n_qt].iter_mut().enumerate() {
        *slot = if basis_bit(index, j, n_qt) { 1.0 } else { -1.0 };
    }
    out[n_qt] = prob * (1u64 << n_qt) as f64;
}

/// `M_β(bits, prob)`, in `(-1, 1)`. `bits[j]` is qubit `j` of the basis state.
pub fn mapping_forward(bits: &[bool], prob: f64, beta: &MappingParams) -> Result<f64> {
    let n_qt = beta.n_qt();
    if bits.len() != n_qt {
        return Err(Error::Dimension {
            what: "basis bit string",
            expected: n_qt,
            found: bits.len(),
        });
    }
    let mut z = beta.bias;
    for (&b, &w) in bits.iter().zip(&beta.weights) {
        z += w * if b { 1.0 } else { -1.0 };
    }
    z += beta.weights[n_qt] * prob * (1u64 << n_qt) as f64;
    Ok(tanh(z))
}

/// Sizes of a Quantum-Train generator, independent of parameter values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QtShape {
    pub target_params: usize,
    pub n_qt: usize,
    pub layers: usize,
}

impl QtShape {
    pub fn new(target_params: usize, layers: usize) -> Result<Self> {
        let n_qt = required_qubits(target_params)?;
        // validates the layer count and register size
        VqcArchitecture::generator(n_qt, layers)?;
        Ok(Self {
            target_params,
            n_qt,
            layers,
        })
    }

    pub fn architecture(&self) -> VqcArchitecture {
        VqcArchitecture::generator(self.n_qt, self.layers).expect("validated in QtShape::new")
    }

    /// `n_qt · L` circuit angles.
    pub fn quantum_params(&self) -> usize {
        self.n_qt * self.layers
    }

    /// `n_qt + 2` mapping scalars.
    pub fn classical_params(&self) -> usize {
        self.n_qt + 2
    }

    pub fn total_params(&self) -> usize {
        self.quantum_params() + self.classical_params()
    }
}

/// `(γ, β)` for a target of `p` classical parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct QtModel {
    shape: QtShape,
    gamma: VqcParams,
    beta: MappingParams,
}

impl QtModel {
    pub fn new(shape: QtShape, gamma: VqcParams, beta: MappingParams) -> Result<Self> {
        if gamma.len() != shape.quantum_params() {
            return Err(Error::Dimension {
                what: "QT circuit angles",
                expected: shape.quantum_params(),
                found: gamma.len(),
            });
        }
        if beta.len() != shape.classical_params() {
            return Err(Error::Dimension {
                what: "mapping parameters",
                expected: shape.classical_params(),
                found: beta.len(),
            });
        }
        Ok(Self { shape, gamma, beta })
    }

    /// Unpacks the flat `γ ‖ w ‖ b` layout used for federated exchange.
    pub fn from_flat(shape: QtShape, flat: &[f64]) -> Result<Self> {
        if flat.len() != shape.total_params() {
            return Err(Error::Dimension {
                what: "flat QT parameters",
                expected: shape.total_params(),
                found: flat.len(),
            });
        }
        let (g, b) = flat.split_at(shape.quantum_params());
        let gamma = VqcParams::new(&shape.architecture(), g.to_vec())?;
        let beta = MappingParams {
            weights: b[..shape.n_qt + 1].to_vec(),
            bias: b[shape.n_qt + 1],
        };
        Self::new(shape, gamma, beta)
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut flat = Vec::with_capacity(self.shape.total_params());
        flat.extend_from_slice(self.gamma.as_slice());
        flat.extend_from_slice(&self.beta.weights);
        flat.push(self.beta.bias);
        flat
    }

    pub fn shape(&self) -> QtShape {
        self.shape
    }

    pub fn gamma(&self) -> &VqcParams {
        &self.gamma
    }

    pub fn beta(&self) -> &MappingParams {
        &self.beta
    }

    /// `κ_i = M_β(bits(i), p_i(γ))` for `i = 0..p`.
    pub fn generate_weights(&self) -> Result<Vec<f64>> {
        let probs = self.shape.architecture().basis_probs(&self.gamma)?;
        Ok(self.map_probabilities(&probs))
    }

    fn map_probabilities(&self, probs: &[f64]) -> Vec<f64> {
        let n_qt = self.shape.n_qt;
        let mut u = vec![0.0; n_qt + 1];
        probs[..self.shape.target_params]
            .iter()
            .enumerate()
            .map(|(i, &prob)| {
                mapping_input(i, prob, n_qt, &mut u);
                tanh(self.beta.bias + crate::math::dot(&self.beta.weights, &u))
            })
            .collect()
    }

    /// Pulls `∂L/∂κ` back onto `(γ, β)`.
    ///
    /// Returns `(∂L/∂γ, ∂L/∂β)` with `∂L/∂β` in the flat `w ‖ b` order.
    /// The circuit Jacobian comes from parameter shift: two runs per angle,
    /// each yielding the full probability vector.
    pub fn backward(&self, dl_dkappa: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let p = self.shape.target_params;
        if dl_dkappa.len() != p {
            return Err(Error::Dimension {
                what: "weight cotangent",
                expected: p,
                found: dl_dkappa.len(),
            });
        }
        let n_qt = self.shape.n_qt;
        let scale = (1u64 << n_qt) as f64;
        let (probs, jac) = self.shape.architecture().forward_with_param_grad(
            None,
            &self.gamma,
            Readout::BasisProbabilities,
        )?;

        let mut d_beta = vec![0.0; n_qt + 2];
        let mut d_probs = vec![0.0; probs.len()];
        let mut u = vec![0.0; n_qt + 1];
        let w_prob = self.beta.weights[n_qt];
        for (i, (&g, &prob)) in dl_dkappa.iter().zip(&probs).enumerate() {
            mapping_input(i, prob, n_qt, &mut u);
            let kappa = tanh(self.beta.bias + crate::math::dot(&self.beta.weights, &u));
            let dz = g * tanh_grad_from_output(kappa);
            for (d, x) in d_beta.iter_mut().zip(&u) {
                *d += dz * x;
            }
            d_beta[n_qt + 1] += dz;
            d_probs[i] = dz * w_prob * scale;
        }
        Ok((jac.vjp(&d_probs), d_beta))
    }
}
