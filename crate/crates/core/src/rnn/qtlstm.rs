//! Classical LSTM whose weights are produced by a Quantum-Train generator.
//!
//! Training differentiates through the generator; inference materializes
//! `κ` once and then runs the plain [`LstmWeights`] model, so predictions need
//! no circuit evaluations.

use alloc::vec::Vec;

use super::lstm::{LstmConfig, LstmWeights};
use super::Sample;
use crate::error::Result;
use crate::qtgen::{QtModel, QtShape};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QtLstmConfig {
    pub lstm: LstmConfig,
    pub layers: usize,
}

impl Default for QtLstmConfig {
    fn default() -> Self {
        Self {
            lstm: LstmConfig::default(),
            layers: 10,
        }
    }
}

impl QtLstmConfig {
    pub fn shape(&self) -> Result<QtShape> {
        QtShape::new(self.lstm.param_count(), self.layers)
    }
}

/// Generates `κ` and wraps it as ordinary LSTM weights.
pub fn materialize(lstm: LstmConfig, model: &QtModel) -> Result<LstmWeights> {
    LstmWeights::new(lstm, model.generate_weights()?)
}

/// MSE over `batch` and `(∂L/∂γ, ∂L/∂β)`: BPTT onto `κ`, then the
/// generator's chain rule.
pub fn loss_and_grad(
    lstm: LstmConfig,
    model: &QtModel,
    batch: &[Sample],
) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    let weights = materialize(lstm, model)?;
    let (loss, dkappa) = weights.loss_and_grad(batch)?;
    let (dgamma, dbeta) = model.backward(&dkappa)?;
    Ok((loss, dgamma, dbeta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn toy(seed: u64) -> (LstmConfig, QtModel, Vec<Sample>) {
        let lstm = LstmConfig::new(2).unwrap();
        let shape = QtShape::new(lstm.param_count(), 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let flat: Vec<f64> = (0..shape.total_params())
            .map(|k| {
                if k < shape.quantum_params() {
                    rng.random_range(0.0..PI)
                } else {
                    rng.random_range(-0.3..0.3)
                }
            })
            .collect();
        let model = QtModel::from_flat(shape, &flat).unwrap();
        let batch = (0..2)
            .map(|t| Sample {
                t,
                input: (0..3).map(|_| rng.random_range(-0.8..0.8)).collect(),
                target: rng.random_range(-0.8..0.8),
            })
            .collect();
        (lstm, model, batch)
    }

    fn check_gradient(seed: u64) {
        let (lstm, model, batch) = toy(seed);
        assert_eq!(lstm.param_count(), 35);
        assert_eq!(model.shape().n_qt, 6);
        let (_, dg, db) = loss_and_grad(lstm, &model, &batch).unwrap();
        let analytic: Vec<f64> = dg.into_iter().chain(db).collect();
        let flat = model.to_flat();
        let loss_at = |p: &[f64]| {
            let m = QtModel::from_flat(model.shape(), p).unwrap();
            materialize(lstm, &m)
                .unwrap()
                .loss_and_grad(&batch)
                .unwrap()
                .0
        };
        let h = 1e-5;
        for k in 0..flat.len() {
            let mut p = flat.clone();
            p[k] += h;
            let up = loss_at(&p);
            p[k] -= 2.0 * h;
            let down = loss_at(&p);
            let fd = (up - down) / (2.0 * h);
            assert!(
                (fd - analytic[k]).abs() < 1e-6,
                "param {k}: {fd} vs {}",
                analytic[k]
            );
        }
    }

    #[test]
    fn chained_gradient_matches_finite_differences() {
        check_gradient(5);
    }

    #[test]
    fn zero_residual_and_determinism() {
        let (lstm, model, mut batch) = toy(1);
        let weights = materialize(lstm, &model).unwrap();
        for s in &mut batch {
            s.target = weights.sequence_forward(&s.input).unwrap();
        }
        let (loss, dg, db) = loss_and_grad(lstm, &model, &batch).unwrap();
        assert_eq!(loss, 0.0);
        assert!(dg.iter().chain(&db).all(|&g| g == 0.0));

        let (_, model, batch) = toy(2);
        let a = loss_and_grad(lstm, &model, &batch).unwrap();
        let b = loss_and_grad(lstm, &model, &batch).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn materialized_model_predicts_like_plain_lstm() {
        let (lstm, model, batch) = toy(3);
        let kappa = model.generate_weights().unwrap();
        let plain = LstmWeights::new(lstm, kappa).unwrap();
        let generated = materialize(lstm, &model).unwrap();
        let a = generated.predict(&batch).unwrap();
        let b = plain.predict(&batch).unwrap();
        assert_eq!(a, b);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]

        #[test]
        fn chained_gradient_random_seeds(seed in any::<u64>()) {
            check_gradient(seed);
        }
    }
}
