//! Velocity-field implementations.
//!
//! The sampling and optimization code only ever needs forward evaluations
//! `v(t, x)`; input vector-Jacobian products are an optional capability used
//! by the gradient-guidance baseline and the verification oracles.

mod gaussian;
mod mlp;

pub use gaussian::{GaussianField, GaussianFieldSpec};
pub use mlp::{cfm_batch_loss, cfm_train, Mlp, MlpField, PairSource, TrainConfig, TrainLog};

use crate::error::FieldError;

/// A time-dependent velocity field on `R^d`. Implementations must be
/// deterministic for fixed inputs and safe to evaluate from multiple threads.
pub trait VelocityField: Send + Sync {
    fn dim(&self) -> usize;

    /// Evaluates `v(t, x)`.
    fn eval(&self, t: f64, x: &[f64]) -> Vec<f64>;

    /// Returns `w^T dv/dx` at `(t, x)`. Optional capability; the default
    /// reports it as unsupported.
    fn input_vjp(&self, t: f64, x: &[f64], w: &[f64]) -> Result<Vec<f64>, FieldError> {
        let _ = (t, x, w);
        Err(FieldError::VjpUnsupported)
    }

    fn has_input_vjp(&self) -> bool {
        false
    }
}

impl<F: VelocityField + ?Sized> VelocityField for &F {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, t: f64, x: &[f64]) -> Vec<f64> {
        (**self).eval(t, x)
    }
    fn input_vjp(&self, t: f64, x: &[f64], w: &[f64]) -> Result<Vec<f64>, FieldError> {
        (**self).input_vjp(t, x, w)
    }
    fn has_input_vjp(&self) -> bool {
        (**self).has_input_vjp()
    }
}

/// `v(t, x) = c`. Zero input Jacobian.
#[derive(Clone, Debug)]
pub struct ConstantField {
    pub c: Vec<f64>,
}

impl VelocityField for ConstantField {
    fn dim(&self) -> usize {
        self.c.len()
    }
    fn eval(&self, _t: f64, _x: &[f64]) -> Vec<f64> {
        self.c.clone()
    }
    fn input_vjp(&self, _t: f64, _x: &[f64], w: &[f64]) -> Result<Vec<f64>, FieldError> {
        Ok(vec![0.0; w.len()])
    }
    fn has_input_vjp(&self) -> bool {
        true
    }
}

/// `v(t, x) = A x + b` with a time-independent square matrix `A` (row-major).
#[derive(Clone, Debug)]
pub struct LinearField {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

impl LinearField {
    pub fn new(a: Vec<Vec<f64>>, b: Vec<f64>) -> Self {
        assert!(a.len() == b.len() && a.iter().all(|row| row.len() == b.len()));
        LinearField { a, b }
    }
}

impl VelocityField for LinearField {
    fn dim(&self) -> usize {
        self.b.len()
    }
    fn eval(&self, _t: f64, x: &[f64]) -> Vec<f64> {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(row, bk)| crate::linalg::dot(row, x) + bk)
            .collect()
    }
    fn input_vjp(&self, _t: f64, _x: &[f64], w: &[f64]) -> Result<Vec<f64>, FieldError> {
        // w^T A
        let d = self.dim();
        let mut out = vec![0.0; d];
        for (row, wk) in self.a.iter().zip(w) {
            crate::linalg::axpy(*wk, row, &mut out);
        }
        Ok(out)
    }
    fn has_input_vjp(&self) -> bool {
        true
    }
}
