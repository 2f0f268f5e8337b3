//! Variational quantum circuits.
//!
//! Two flavours share one variational body `W(Θ) = V_L ⋯ V_1`:
//!
//! * data-encoding circuits (`H` then `Ry(x_k)` on every qubit) read out
//!   per-qubit Pauli-Z expectations;
//! * encoding-free circuits (`H` on every qubit only) read out the full
//!   basis probability vector.
//!
//! Each block `V_j` is a nearest-neighbour CNOT chain `CNOT(q, q+1)` for
//! `q = 0..n-2` followed by one `Ry(θ_{j,q})` per qubit. Angles are stored
//! layer-major.
//!
//! Gradients use the parameter-shift rule,
//! `∂f/∂θ = [f(θ + π/2) − f(θ − π/2)] / 2`, which is exact for `Ry`
//! generators and applies to both readouts since probabilities are projector
//! expectations.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;
use core::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, Result};
use crate::qsim::{StateVector, MAX_QUBITS};

static CIRCUIT_RUNS: AtomicUsize = AtomicUsize::new(0);

/// Number of circuits executed and measured by this process so far.
///
/// Every readout counts once, including each shifted evaluation performed
/// for a gradient.
pub fn circuit_runs() -> u64 {
    CIRCUIT_RUNS.load(Ordering::Relaxed) as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VqcArchitecture {
    n_qubits: usize,
    n_layers: usize,
    data_encoding: bool,
}

/// What is measured at the end of a circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Readout {
    /// `<Z_k>` for every qubit `k`.
    PauliZ,
    /// `|<φ_i|ψ>|²` for every basis state.
    BasisProbabilities,
}

impl Readout {
    fn len(self, n_qubits: usize) -> usize {
        match self {
            Readout::PauliZ => n_qubits,
            Readout::BasisProbabilities => 1 << n_qubits,
        }
    }

    fn measure(self, state: &StateVector) -> Vec<f64> {
        CIRCUIT_RUNS.fetch_add(1, Ordering::Relaxed);
        match self {
            Readout::PauliZ => state.z_expectations(),
            Readout::BasisProbabilities => state.probabilities(),
        }
    }
}

impl VqcArchitecture {
    pub fn new(n_qubits: usize, n_layers: usize, data_encoding: bool) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&n_qubits) {
            return Err(Error::QubitCount {
                requested: n_qubits,
            });
        }
        if n_layers == 0 {
            return Err(Error::Config {
                key: "layers",
                reason: "need at least one variational layer",
            });
        }
        Ok(Self {
            n_qubits,
            n_layers,
            data_encoding,
        })
    }

    /// Data-encoding circuit measured in Pauli-Z.
    pub fn encoding(n_qubits: usize, n_layers: usize) -> Result<Self> {
        Self::new(n_qubits, n_layers, true)
    }

    /// Encoding-free circuit measured in the computational basis.
    pub fn generator(n_qubits: usize, n_layers: usize) -> Result<Self> {
        Self::new(n_qubits, n_layers, false)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_layers(&self) -> usize {
        self.n_layers
    }

    pub fn data_encoding(&self) -> bool {
        self.data_encoding
    }

    /// One `Ry` angle per qubit per layer.
    pub fn param_count(&self) -> usize {
        self.n_qubits * self.n_layers
    }

    fn require_encoding(&self, wanted: bool) -> Result<()> {
        if self.data_encoding != wanted {
            return Err(Error::Config {
                key: "data_encoding",
                reason: if wanted {
                    "operation needs a data-encoding circuit"
                } else {
                    "operation needs an encoding-free circuit"
                },
            });
        }
        Ok(())
    }

    fn check_params(&self, params: &VqcParams) -> Result<()> {
        if params.len() != self.param_count() {
            return Err(Error::Dimension {
                what: "variational angles",
                expected: self.param_count(),
                found: params.len(),
            });
        }
        Ok(())
    }

    /// `U(x)|0⟩ = ⊗_k Ry(x_k) H |0⟩`.
    pub fn encode(&self, x: &[f64]) -> Result<StateVector> {
        self.require_encoding(true)?;
        if x.len() != self.n_qubits {
            return Err(Error::Dimension {
                what: "encoded input",
                expected: self.n_qubits,
                found: x.len(),
            });
        }
        let mut state = StateVector::zero(self.n_qubits)?;
        for (q, &angle) in x.iter().enumerate() {
            state.apply_hadamard(q)?;
            state.apply_ry(q, angle)?;
        }
        Ok(state)
    }

    /// `H^⊗n |0⟩`, the starting point of the encoding-free circuit.
    pub fn uniform(&self) -> Result<StateVector> {
        let mut state = StateVector::zero(self.n_qubits)?;
        for q in 0..self.n_qubits {
            state.apply_hadamard(q)?;
        }
        Ok(state)
    }

    fn prepare(&self, x: Option<&[f64]>) -> Result<StateVector> {
        match (self.data_encoding, x) {
            (true, Some(x)) => self.encode(x),
            (false, None) => self.uniform(),
            (true, None) => Err(Error::Empty("encoded input")),
            (false, Some(_)) => Err(Error::Config {
                key: "data_encoding",
                reason: "encoding-free circuit was given an input",
            }),
        }
    }

    fn apply_layer(&self, state: &mut StateVector, angles: &[f64]) -> Result<()> {
        for q in 0..self.n_qubits.saturating_sub(1) {
            state.apply_cnot(q, q + 1)?;
        }
        for (q, &theta) in angles.iter().enumerate() {
            state.apply_ry(q, theta)?;
        }
        Ok(())
    }

    /// Applies `W(Θ)` in place.
    pub fn apply_variational(&self, state: &mut StateVector, params: &VqcParams) -> Result<()> {
        self.check_params(params)?;
        if state.num_qubits() != self.n_qubits {
            return Err(Error::Dimension {
                what: "state qubits",
                expected: self.n_qubits,
                found: state.num_qubits(),
            });
        }
        for layer in params.layers(self.n_qubits) {
            self.apply_layer(state, layer)?;
        }
        Ok(())
    }

    fn run(&self, x: Option<&[f64]>, params: &VqcParams, readout: Readout) -> Result<Vec<f64>> {
        let mut state = self.prepare(x)?;
        self.apply_variational(&mut state, params)?;
        Ok(readout.measure(&state))
    }

    /// `(⟨Z_1⟩, …, ⟨Z_n⟩)` after encoding `x` and applying `W(Θ)`.
    pub fn expectations(&self, x: &[f64], params: &VqcParams) -> Result<Vec<f64>> {
        self.require_encoding(true)?;
        self.run(Some(x), params, Readout::PauliZ)
    }

    /// Basis probabilities of `W(Θ) H^⊗n |0⟩`.
    pub fn basis_probs(&self, params: &VqcParams) -> Result<Vec<f64>> {
        self.require_encoding(false)?;
        self.run(None, params, Readout::BasisProbabilities)
    }

    /// Parameter-shift Jacobian of the chosen readout with respect to every
    /// variational angle. `x` must be given exactly when the circuit encodes
    /// data.
    pub fn param_shift_grad(
        &self,
        x: Option<&[f64]>,
        params: &VqcParams,
        readout: Readout,
    ) -> Result<Jacobian> {
        Ok(self.forward_with_param_grad(x, params, readout)?.1)
    }

    /// Readout plus its parameter-shift Jacobian.
    ///
    /// Shifting `θ_{j,q}` is the same as applying `Ry_q(±π/2)` right after
    /// layer `j` (rotations on one qubit compose additively and commute with
    /// the other rotations of that layer), so each shifted circuit resumes
    /// from the cached state after layer `j`.
    pub fn forward_with_param_grad(
        &self,
        x: Option<&[f64]>,
        params: &VqcParams,
        readout: Readout,
    ) -> Result<(Vec<f64>, Jacobian)> {
        self.check_params(params)?;
        let mut state = self.prepare(x)?;
        let mut after_layer = Vec::with_capacity(self.n_layers);
        for layer in params.layers(self.n_qubits) {
            self.apply_layer(&mut state, layer)?;
            after_layer.push(state.clone());
        }
        let value = readout.measure(&state);

        let mut jac = Jacobian::zeros(readout.len(self.n_qubits), self.param_count());
        let layers: Vec<&[f64]> = params.layers(self.n_qubits).collect();
        for (j, cached) in after_layer.iter().enumerate() {
            for q in 0..self.n_qubits {
                let mut shifted = [Vec::new(), Vec::new()];
                for (slot, shift) in shifted.iter_mut().zip([FRAC_PI_2, -FRAC_PI_2]) {
                    let mut s = cached.clone();
                    s.apply_ry(q, shift)?;
                    for later in &layers[j + 1..] {
                        self.apply_layer(&mut s, later)?;
                    }
                    *slot = readout.measure(&s);
                }
                let col = j * self.n_qubits + q;
                for (row, (plus, minus)) in shifted[0].iter().zip(&shifted[1]).enumerate() {
                    jac.set(row, col, 0.5 * (plus - minus));
                }
            }
        }
        Ok((value, jac))
    }

    /// Jacobian of `⟨Z⟩` with respect to the encoded inputs, by shifting each
    /// encoding angle by `±π/2`.
    pub fn input_shift_grad(&self, x: &[f64], params: &VqcParams) -> Result<Jacobian> {
        self.require_encoding(true)?;
        let mut jac = Jacobian::zeros(self.n_qubits, self.n_qubits);
        let mut shifted_x = x.to_vec();
        for k in 0..x.len() {
            shifted_x[k] = x[k] + FRAC_PI_2;
            let plus = self.run(Some(&shifted_x), params, Readout::PauliZ)?;
            shifted_x[k] = x[k] - FRAC_PI_2;
            let minus = self.run(Some(&shifted_x), params, Readout::PauliZ)?;
            shifted_x[k] = x[k];
            for (row, (p, m)) in plus.iter().zip(&minus).enumerate() {
                jac.set(row, k, 0.5 * (p - m));
            }
        }
        Ok(jac)
    }
}

/// Variational angles `Θ`, layer-major.
#[derive(Debug, Clone, PartialEq)]
pub struct VqcParams {
    angles: Vec<f64>,
}

impl VqcParams {
    pub fn new(arch: &VqcArchitecture, angles: Vec<f64>) -> Result<Self> {
        if angles.len() != arch.param_count() {
            return Err(Error::Dimension {
                what: "variational angles",
                expected: arch.param_count(),
                found: angles.len(),
            });
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonFiniteAngle);
        }
        Ok(Self { angles })
    }

    pub fn zeros(arch: &VqcArchitecture) -> Self {
        Self {
            angles: vec![0.0; arch.param_count()],
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    fn layers(&self, n_qubits: usize) -> core::slice::Chunks<'_, f64> {
        self.angles.chunks(n_qubits)
    }
}

/// Dense row-major `outputs x parameters` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Jacobian {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Jacobian {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.cols + col] = value;
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    /// `vᵀ J`, the pullback of an output cotangent onto the parameters.
    pub fn vjp(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (r, &w) in v.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for (o, j) in out.iter_mut().zip(self.row(r)) {
                *o += w * j;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::oracle;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_params(arch: &VqcArchitecture, rng: &mut ChaCha8Rng) -> VqcParams {
        let angles = (0..arch.param_count())
            .map(|_| rng.random_range(-PI..PI))
            .collect();
        VqcParams::new(arch, angles).unwrap()
    }

    /// Dense-matrix version of the whole circuit.
    fn dense_circuit(
        arch: &VqcArchitecture,
        x: Option<&[f64]>,
        params: &VqcParams,
    ) -> Vec<Complex64> {
        let n = arch.n_qubits();
        let mut v = oracle::zero_state(n);
        for q in 0..n {
            v = oracle::apply(&oracle::lift(&oracle::hadamard(), q, n), &v);
            if let Some(x) = x {
                v = oracle::apply(&oracle::lift(&oracle::ry(x[q]), q, n), &v);
            }
        }
        for layer in params.as_slice().chunks(n) {
            for q in 0..n - 1 {
                v = oracle::apply(&oracle::cnot(q, q + 1, n), &v);
            }
            for (q, &t) in layer.iter().enumerate() {
                v = oracle::apply(&oracle::lift(&oracle::ry(t), q, n), &v);
            }
        }
        v
    }

    fn finite_difference(
        f: impl Fn(&VqcParams) -> Vec<f64>,
        arch: &VqcArchitecture,
        params: &VqcParams,
        step: f64,
    ) -> Vec<Vec<f64>> {
        let base = params.as_slice().to_vec();
        (0..base.len())
            .map(|k| {
                let mut p = base.clone();
                p[k] += step;
                let plus = f(&VqcParams::new(arch, p.clone()).unwrap());
                p[k] -= 2.0 * step;
                let minus = f(&VqcParams::new(arch, p).unwrap());
                plus.iter()
                    .zip(&minus)
                    .map(|(a, b)| (a - b) / (2.0 * step))
                    .collect()
            })
            .collect()
    }

    #[test]
    fn parameter_count_is_qubits_times_layers() {
        assert_eq!(
            VqcArchitecture::generator(11, 10).unwrap().param_count(),
            110
        );
        assert_eq!(VqcArchitecture::encoding(5, 10).unwrap().param_count(), 50);
        assert!(VqcArchitecture::encoding(5, 0).is_err());
    }

    #[test]
    fn encode_cases() {
        let arch = VqcArchitecture::encoding(3, 1).unwrap();
        let p = arch.encode(&[0.0; 3]).unwrap().probabilities();
        assert!(p.iter().all(|x| (x - 0.125).abs() < 1e-15));

        // Ry(π/2) H |0> = |1>
        let one = VqcArchitecture::encoding(1, 1).unwrap();
        let s = one.encode(&[PI / 2.0]).unwrap();
        assert!(s.amplitudes()[0].norm() < 1e-15);
        assert!((s.amplitudes()[1].re - 1.0).abs() < 1e-15);

        assert!(matches!(
            arch.encode(&[0.0; 2]),
            Err(Error::Dimension { .. })
        ));
        let gen = VqcArchitecture::generator(3, 1).unwrap();
        assert!(matches!(gen.encode(&[0.0; 3]), Err(Error::Config { .. })));
    }

    #[test]
    fn perturbing_one_input_changes_only_that_qubit() {
        let arch = VqcArchitecture::encoding(3, 1).unwrap();
        let a = arch.encode(&[0.3, -0.2, 0.9]).unwrap();
        let b = arch.encode(&[0.3, 1.1, 0.9]).unwrap();
        for q in [0, 2] {
            assert!((a.z_expectation(q).unwrap() - b.z_expectation(q).unwrap()).abs() < 1e-15);
        }
        assert!((a.z_expectation(1).unwrap() - b.z_expectation(1).unwrap()).abs() > 1e-3);
    }

    #[test]
    fn zero_angles_act_trivially() {
        let arch = VqcArchitecture::generator(2, 3).unwrap();
        let mut s = StateVector::zero(2).unwrap();
        arch.apply_variational(&mut s, &VqcParams::zeros(&arch))
            .unwrap();
        assert_eq!(s, StateVector::zero(2).unwrap());

        for n in 1..=5 {
            let arch = VqcArchitecture::generator(n, 2).unwrap();
            let p = arch.basis_probs(&VqcParams::zeros(&arch)).unwrap();
            let u = 1.0 / (1 << n) as f64;
            assert!(p.iter().all(|x| (x - u).abs() < 1e-14));
        }

        let enc = VqcArchitecture::encoding(4, 2).unwrap();
        let z = enc
            .expectations(&[0.0; 4], &VqcParams::zeros(&enc))
            .unwrap();
        assert!(z.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn random_three_qubit_two_layers_matches_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let enc = VqcArchitecture::encoding(3, 2).unwrap();
        let x = [0.4, -1.2, 2.5];
        let params = random_params(&enc, &mut rng);
        let mut s = enc.encode(&x).unwrap();
        enc.apply_variational(&mut s, &params).unwrap();
        let dense = dense_circuit(&enc, Some(&x), &params);
        for (a, b) in s.amplitudes().iter().zip(&dense) {
            assert!((a - b).norm() < 1e-12);
        }

        let gen = VqcArchitecture::generator(2, 1).unwrap();
        let params = VqcParams::new(&gen, vec![PI, 0.0]).unwrap();
        let dense: Vec<f64> = dense_circuit(&gen, None, &params)
            .iter()
            .map(|a| a.norm_sqr())
            .collect();
        let p = gen.basis_probs(&params).unwrap();
        for (a, b) in p.iter().zip(&dense) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn single_qubit_closed_form() {
        // H|0> = Ry(π/2)|0>, so Ry(θ) Ry(x) H |0> = Ry(θ + x + π/2)|0>
        // and <Z> = cos(θ + x + π/2) = -sin(θ + x).
        let arch = VqcArchitecture::encoding(1, 1).unwrap();
        let z = arch
            .expectations(&[0.0], &VqcParams::new(&arch, vec![PI / 2.0]).unwrap())
            .unwrap();
        assert!((z[0] + 1.0).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let (x, t) = (rng.random_range(-PI..PI), rng.random_range(-PI..PI));
            let z = arch
                .expectations(&[x], &VqcParams::new(&arch, vec![t]).unwrap())
                .unwrap();
            assert!((z[0] + (x + t).sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn expectations_are_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10_000 {
            let n = rng.random_range(1..=4);
            let arch = VqcArchitecture::encoding(n, rng.random_range(1..=3)).unwrap();
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-PI..PI)).collect();
            let z = arch
                .expectations(&x, &random_params(&arch, &mut rng))
                .unwrap();
            assert!(z.iter().all(|v| (-1.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn param_shift_matches_finite_differences_four_qubits_three_layers() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let enc = VqcArchitecture::encoding(4, 3).unwrap();
        let gen = VqcArchitecture::generator(4, 3).unwrap();
        for _ in 0..5 {
            let x: Vec<f64> = (0..4).map(|_| rng.random_range(-PI..PI)).collect();
            let params = random_params(&enc, &mut rng);
            let jac = enc
                .param_shift_grad(Some(&x), &params, Readout::PauliZ)
                .unwrap();
            let fd = finite_difference(|p| enc.expectations(&x, p).unwrap(), &enc, &params, 1e-4);
            for (k, col) in fd.iter().enumerate() {
                for (r, v) in col.iter().enumerate() {
                    assert!((jac.get(r, k) - v).abs() < 1e-6);
                }
            }

            let params = random_params(&gen, &mut rng);
            let jac = gen
                .param_shift_grad(None, &params, Readout::BasisProbabilities)
                .unwrap();
            let fd = finite_difference(|p| gen.basis_probs(p).unwrap(), &gen, &params, 1e-4);
            for (k, col) in fd.iter().enumerate() {
                for (r, v) in col.iter().enumerate() {
                    assert!((jac.get(r, k) - v).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn forward_value_matches_plain_run() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let gen = VqcArchitecture::generator(5, 3).unwrap();
        let params = random_params(&gen, &mut rng);
        let (value, _) = gen
            .forward_with_param_grad(None, &params, Readout::BasisProbabilities)
            .unwrap();
        assert_eq!(value, gen.basis_probs(&params).unwrap());
    }

    #[test]
    fn param_shift_costs_two_runs_per_parameter() {
        let enc = VqcArchitecture::encoding(3, 2).unwrap();
        let params = VqcParams::zeros(&enc);
        let before = circuit_runs();
        enc.forward_with_param_grad(Some(&[0.1, 0.2, 0.3]), &params, Readout::PauliZ)
            .unwrap();
        // Other tests may run concurrently; the counter is monotone.
        assert!(circuit_runs() - before > 2 * 6);
    }

    #[test]
    fn unused_parameter_has_zero_gradient() {
        // With one layer, the rotation on qubit 1 comes after the only CNOT
        // and cannot reach <Z_0>.
        let arch = VqcArchitecture::encoding(2, 1).unwrap();
        let params = VqcParams::new(&arch, vec![0.3, 1.1]).unwrap();
        let jac = arch
            .param_shift_grad(Some(&[0.5, -0.4]), &params, Readout::PauliZ)
            .unwrap();
        assert!(jac.get(0, 1).abs() < 1e-12);
    }

    #[test]
    fn input_shift_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let arch = VqcArchitecture::encoding(3, 2).unwrap();
        let params = random_params(&arch, &mut rng);
        let x = [0.2, -0.7, 1.3];
        let jac = arch.input_shift_grad(&x, &params).unwrap();
        let h = 1e-5;
        for k in 0..3 {
            let mut xp = x;
            xp[k] += h;
            let mut xm = x;
            xm[k] -= h;
            let plus = arch.expectations(&xp, &params).unwrap();
            let minus = arch.expectations(&xm, &params).unwrap();
            for r in 0..3 {
                assert!((jac.get(r, k) - (plus[r] - minus[r]) / (2.0 * h)).abs() < 1e-8);
            }
        }
    }

    fn arb_config() -> impl Strategy<Value = (usize, usize, u64)> {
        (1usize..=4, 1usize..=3, any::<u64>())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn param_shift_agrees_with_finite_differences((n, layers, seed) in arb_config()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let enc = VqcArchitecture::encoding(n, layers).unwrap();
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-PI..PI)).collect();
            let params = random_params(&enc, &mut rng);
            let jac = enc.param_shift_grad(Some(&x), &params, Readout::PauliZ).unwrap();
            let fd = finite_difference(|p| enc.expectations(&x, p).unwrap(), &enc, &params, 1e-4);
            for (k, col) in fd.iter().enumerate() {
                for (r, v) in col.iter().enumerate() {
                    let g = jac.get(r, k);
                    if g.abs() > 1e-6 {
                        prop_assert!(((g - v) / g).abs() < 1e-4);
                    } else {
                        prop_assert!((g - v).abs() < 1e-6);
                    }
                }
            }
        }

        #[test]
        fn probability_gradient_rows_sum_to_zero((n, layers, seed) in arb_config()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let gen = VqcArchitecture::generator(n, layers).unwrap();
            let params = random_params(&gen, &mut rng);
            let (p, jac) = gen.forward_with_param_grad(None, &params, Readout::BasisProbabilities).unwrap();
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            for k in 0..jac.cols() {
                let col: f64 = (0..jac.rows()).map(|r| jac.get(r, k)).sum();
                prop_assert!(col.abs() < 1e-10);
            }
        }

        #[test]
        fn expectations_are_two_pi_periodic((n, layers, seed) in arb_config()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let enc = VqcArchitecture::encoding(n, layers).unwrap();
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-PI..PI)).collect();
            let params = random_params(&enc, &mut rng);
            let base = enc.expectations(&x, &params).unwrap();
            for k in 0..params.len() {
                let mut shifted = params.as_slice().to_vec();
                shifted[k] += 2.0 * PI;
                let other = enc.expectations(&x, &VqcParams::new(&enc, shifted).unwrap()).unwrap();
                for (a, b) in base.iter().zip(&other) {
                    prop_assert!((a - b).abs() < 1e-10);
                }
            }
        }
    }
}
