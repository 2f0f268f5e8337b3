//! Dense statevector engine.
//!
//! Only the gates the circuits in this crate need are provided: Hadamard,
//! `Ry` and CNOT, plus Pauli-Z expectations and basis probabilities.
//!
//! Basis ordering is big-endian: qubit 0 is the most significant bit of the
//! amplitude index, so amplitude `i` of a 3-qubit register holds
//! `|q0 q1 q2>` with `i = 4*q0 + 2*q1 + q2`. The Quantum-Train mapping reads
//! basis bit strings in this order.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math::{cos, sin};

/// Largest register accepted by [`StateVector::zero`].
pub const MAX_QUBITS: usize = 16;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>` on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&num_qubits) {
            return Err(Error::QubitCount {
                requested: num_qubits,
            });
        }
        let mut amplitudes = vec![ZERO; 1 << num_qubits];
        amplitudes[0] = ONE;
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Bit mask selecting `qubit` in an amplitude index.
    #[inline]
    fn mask(&self, qubit: usize) -> Result<usize> {
        if qubit >= self.num_qubits {
            return Err(Error::QubitIndex {
                index: qubit,
                num_qubits: self.num_qubits,
            });
        }
        Ok(1 << (self.num_qubits - 1 - qubit))
    }

    /// Applies a real 2x2 matrix `[[a, b], [c, d]]` to `qubit`.
    fn apply_real_1q(&mut self, mask: usize, a: f64, b: f64, c: f64, d: f64) {
        let dim = self.amplitudes.len();
        // Walk blocks of 2*mask; the low half has the bit clear.
        let mut base = 0;
        while base < dim {
            for i0 in base..base + mask {
                let i1 = i0 | mask;
                let x0 = self.amplitudes[i0];
                let x1 = self.amplitudes[i1];
                self.amplitudes[i0] = x0 * a + x1 * b;
                self.amplitudes[i1] = x0 * c + x1 * d;
            }
            base += mask << 1;
        }
    }

    pub fn apply_hadamard(&mut self, qubit: usize) -> Result<()> {
        let mask = self.mask(qubit)?;
        let r = core::f64::consts::FRAC_1_SQRT_2;
        self.apply_real_1q(mask, r, r, r, -r);
        Ok(())
    }

    /// `Ry(theta) = [[cos t/2, -sin t/2], [sin t/2, cos t/2]]`.
    pub fn apply_ry(&mut self, qubit: usize, theta: f64) -> Result<()> {
        let mask = self.mask(qubit)?;
        if !theta.is_finite() {
            return Err(Error::NonFiniteAngle);
        }
        let (s, c) = (sin(theta / 2.0), cos(theta / 2.0));
        self.apply_real_1q(mask, c, -s, s, c);
        Ok(())
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        let cmask = self.mask(control)?;
        let tmask = self.mask(target)?;
        if control == target {
            return Err(Error::ControlIsTarget { qubit: control });
        }
        for i in 0..self.amplitudes.len() {
            // Visit each swapped pair once, from its target-bit-clear member.
            if i & cmask != 0 && i & tmask == 0 {
                self.amplitudes.swap(i, i | tmask);
            }
        }
        Ok(())
    }

    /// `<Z_qubit>`, in `[-1, 1]`.
    pub fn z_expectation(&self, qubit: usize) -> Result<f64> {
        let mask = self.mask(qubit)?;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let p = a.norm_sqr();
                if i & mask == 0 {
                    p
                } else {
                    -p
                }
            })
            .sum())
    }

    /// All `<Z_k>` in one pass over the amplitudes.
    pub fn z_expectations(&self) -> Vec<f64> {
        let n = self.num_qubits;
        let mut out = vec![0.0; n];
        for (i, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr();
            for (q, z) in out.iter_mut().enumerate() {
                if i & (1 << (n - 1 - q)) == 0 {
                    *z += p;
                } else {
                    *z -= p;
                }
            }
        }
        out
    }

    /// `|amplitude_i|^2` for every basis index.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Bit `qubit` of basis index `index` in a `num_qubits` register.
#[inline]
pub fn basis_bit(index: usize, qubit: usize, num_qubits: usize) -> bool {
    index >> (num_qubits - 1 - qubit) & 1 == 1
}


#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn amps_close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
    }

    fn real(s: &StateVector) -> Vec<f64> {
        s.amplitudes().iter().map(|a| a.re).collect()
    }

    #[test]
    fn zero_state_shapes() {
        assert_eq!(real(&StateVector::zero(1).unwrap()), [1.0, 0.0]);
        assert_eq!(real(&StateVector::zero(2).unwrap()), [1.0, 0.0, 0.0, 0.0]);
        let s = StateVector::zero(11).unwrap();
        assert_eq!(s.amplitudes().len(), 2048);
        assert_eq!(s.amplitudes()[0], ONE);
        assert!(s.amplitudes()[1..].iter().all(|a| *a == ZERO));
        assert_eq!(
            StateVector::zero(0),
            Err(Error::QubitCount { requested: 0 })
        );
        assert!(StateVector::zero(17).is_err());
    }

    #[test]
    fn hadamard_cases() {
        let mut s = StateVector::zero(1).unwrap();
        s.apply_hadamard(0).unwrap();
        assert!(real(&s).iter().all(|a| (a - FRAC_1_SQRT_2).abs() < 1e-15));
        s.apply_hadamard(0).unwrap();
        assert!(amps_close(s.amplitudes(), &[ONE, ZERO], 1e-12));

        let mut s = StateVector::zero(3).unwrap();
        for q in 0..3 {
            s.apply_hadamard(q).unwrap();
        }
        let expect = 1.0 / 8f64.sqrt();
        assert!(real(&s).iter().all(|a| (a - expect).abs() < 1e-15));
        assert!(matches!(s.apply_hadamard(3), Err(Error::QubitIndex { .. })));
    }

    #[test]
    fn ry_cases() {
        let mut s = StateVector::zero(1).unwrap();
        s.apply_ry(0, PI).unwrap();
        assert!(amps_close(s.amplitudes(), &[ZERO, ONE], 1e-15));

        let mut s = StateVector::zero(1).unwrap();
        s.apply_ry(0, PI / 2.0).unwrap();
        let h = 2f64.sqrt() / 2.0;
        assert!(real(&s).iter().all(|a| (a - h).abs() < 1e-15));

        let mut s = StateVector::zero(2).unwrap();
        s.apply_hadamard(1).unwrap();
        let before = s.clone();
        s.apply_ry(0, 0.0).unwrap();
        assert_eq!(s, before);

        assert_eq!(s.apply_ry(0, f64::NAN), Err(Error::NonFiniteAngle));
        assert_eq!(s.apply_ry(0, f64::INFINITY), Err(Error::NonFiniteAngle));
    }

    #[test]
    fn cnot_cases() {
        // |10> -> |11>
        let mut s = StateVector::zero(2).unwrap();
        s.apply_ry(0, PI).unwrap();
        s.apply_cnot(0, 1).unwrap();
        assert!(amps_close(s.amplitudes(), &[ZERO, ZERO, ZERO, ONE], 1e-15));

        // control |0>: untouched
        let mut s = StateVector::zero(2).unwrap();
        s.apply_ry(1, 0.7).unwrap();
        let before = s.clone();
        s.apply_cnot(0, 1).unwrap();
        assert_eq!(s, before);

        // |++> is a CNOT eigenstate; compare against the 4x4 matrix product.
        let mut s = StateVector::zero(2).unwrap();
        s.apply_hadamard(0).unwrap();
        s.apply_hadamard(1).unwrap();
        let dense = oracle::apply(&oracle::cnot(0, 1, 2), s.amplitudes());
        assert!(amps_close(&dense, s.amplitudes(), 1e-15));
        let before = s.clone();
        s.apply_cnot(0, 1).unwrap();
        assert!(amps_close(s.amplitudes(), before.amplitudes(), 1e-15));

        assert_eq!(s.apply_cnot(1, 1), Err(Error::ControlIsTarget { qubit: 1 }));
        assert!(s.apply_cnot(0, 2).is_err());
    }

    #[test]
    fn z_expectation_cases() {
        let mut s = StateVector::zero(1).unwrap();
        assert_eq!(s.z_expectation(0).unwrap(), 1.0);
        s.apply_ry(0, PI).unwrap();
        assert!((s.z_expectation(0).unwrap() + 1.0).abs() < 1e-15);
        let mut s = StateVector::zero(1).unwrap();
        s.apply_hadamard(0).unwrap();
        assert!(s.z_expectation(0).unwrap().abs() < 1e-12);
        assert!(s.z_expectation(1).is_err());
    }

    #[test]
    fn probability_cases() {
        let s = StateVector::zero(2).unwrap();
        assert_eq!(s.probabilities(), [1.0, 0.0, 0.0, 0.0]);
        let mut s = StateVector::zero(2).unwrap();
        s.apply_hadamard(0).unwrap();
        s.apply_hadamard(1).unwrap();
        assert!(s.probabilities().iter().all(|p| (p - 0.25).abs() < 1e-15));
    }

    #[test]
    fn basis_bit_is_big_endian() {
        // index 4 = 0b100 on 3 qubits: qubit 0 set
        assert!(basis_bit(4, 0, 3));
        assert!(!basis_bit(4, 2, 3));
        assert!(basis_bit(1, 2, 3));
    }

    #[derive(Debug, Clone)]
    enum Gate {
        H(usize),
        Ry(usize, f64),
        Cnot(usize, usize),
    }

    fn gate_strategy(n: usize) -> impl Strategy<Value = Gate> {
        prop_oneof![
            (0..n).prop_map(Gate::H),
            (0..n, -10.0..10.0f64).prop_map(|(q, t)| Gate::Ry(q, t)),
            (0..n, 1..n.max(2)).prop_map(move |(c, d)| Gate::Cnot(c, (c + d) % n)),
        ]
    }

    fn circuit_strategy(min_q: usize, max_q: usize) -> impl Strategy<Value = (usize, Vec<Gate>)> {
        (min_q..=max_q).prop_flat_map(|n| (Just(n), prop::collection::vec(gate_strategy(n), 1..40)))
    }

    fn run(n: usize, gates: &[Gate]) -> StateVector {
        let mut s = StateVector::zero(n).unwrap();
        for g in gates {
            match *g {
                Gate::H(q) => s.apply_hadamard(q).unwrap(),
                Gate::Ry(q, t) => s.apply_ry(q, t).unwrap(),
                Gate::Cnot(c, t) => s.apply_cnot(c, t).unwrap(),
            }
        }
        s
    }

    #[test]
    fn random_three_qubit_circuit_probabilities_match_dense_oracle() {
        let gates = [
            Gate::H(0),
            Gate::Ry(1, 0.31),
            Gate::Ry(2, -1.7),
            Gate::Cnot(0, 1),
            Gate::Ry(0, 2.2),
            Gate::Cnot(1, 2),
            Gate::Cnot(2, 0),
            Gate::Ry(2, 0.05),
            Gate::H(1),
        ];
        let s = run(3, &gates);
        let mut v = oracle::zero_state(3);
        for g in &gates {
            let m = match *g {
                Gate::H(q) => oracle::lift(&oracle::hadamard(), q, 3),
                Gate::Ry(q, t) => oracle::lift(&oracle::ry(t), q, 3),
                Gate::Cnot(c, t) => oracle::cnot(c, t, 3),
            };
            v = oracle::apply(&m, &v);
        }
        let p = s.probabilities();
        for (a, b) in p.iter().zip(v.iter().map(|x| x.norm_sqr())) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn norm_is_preserved((n, gates) in circuit_strategy(2, 6)) {
            let s = run(n, &gates);
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
            prop_assert_eq!(s.amplitudes().len(), 1 << n);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn every_gate_matches_kronecker_oracle((n, gates) in circuit_strategy(1, 4)) {
            let mut s = StateVector::zero(n).unwrap();
            let mut v = oracle::zero_state(n);
            for g in &gates {
                let m = match *g {
                    Gate::H(q) => { s.apply_hadamard(q).unwrap(); oracle::lift(&oracle::hadamard(), q, n) }
                    Gate::Ry(q, t) => { s.apply_ry(q, t).unwrap(); oracle::lift(&oracle::ry(t), q, n) }
                    Gate::Cnot(c, t) => {
                        if n < 2 { continue; }
                        s.apply_cnot(c, t).unwrap();
                        oracle::cnot(c, t, n)
                    }
                };
                v = oracle::apply(&m, &v);
                prop_assert!(amps_close(s.amplitudes(), &v, 1e-12));
            }
        }

        #[test]
        fn z_expectation_is_signed_probability_sum((n, gates) in circuit_strategy(1, 5)) {
            let gates: Vec<Gate> = if n < 2 {
                gates.into_iter().filter(|g| !matches!(g, Gate::Cnot(..))).collect()
            } else { gates };
            let s = run(n, &gates);
            let p = s.probabilities();
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            prop_assert!(p.iter().all(|x| (0.0..=1.0 + 1e-12).contains(x)));
            let all = s.z_expectations();
            for q in 0..n {
                let via_p: f64 = p.iter().enumerate()
                    .map(|(i, pi)| pi * (1.0 - 2.0 * (basis_bit(i, q, n) as u8 as f64)))
                    .sum();
                let z = s.z_expectation(q).unwrap();
                prop_assert_eq!(z, via_p);
                prop_assert!((all[q] - z).abs() < 1e-14);
                prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&z));
            }
        }
    }
}
