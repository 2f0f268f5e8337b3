//! Scalar helpers. Everything routes through `libm` so results are identical
//! with or without `std`.

pub use libm::{cos, exp, pow, sin, sqrt, tanh};

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + exp(-x))
}

/// `sigmoid'(x)` expressed through the activation `s = sigmoid(x)`.
#[inline]
pub fn sigmoid_grad_from_output(s: f64) -> f64 {
    s * (1.0 - s)
}

/// `tanh'(x)` expressed through the activation `t = tanh(x)`.
#[inline]
pub fn tanh_grad_from_output(t: f64) -> f64 {
    1.0 - t * t
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
