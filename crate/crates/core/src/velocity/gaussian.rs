//! Exact marginal velocity field for independent Gaussian endpoints.
//!
//! With `X_0 ~ N(mu0, sigma0^2 I)`, `X_1 ~ N(mu1, sigma1^2 I)` independent
//! and `X_t = alpha_t X_1 + beta_t X_0`, the pair `(X_t, X_1)` is jointly
//! Gaussian, so the conditional means of both endpoints given `X_t = x` are
//! closed-form and the marginal velocity is
//!
//! ```text
//! v_t(x) = alpha_dot_t E[X_1 | X_t = x] + beta_dot_t E[X_0 | X_t = x].
//! ```
//!
//! This field is exact, so it doubles as a ground-truth oracle for the
//! posterior operators and the trained models.

use serde::{Deserialize, Serialize};

use super::VelocityField;
use crate::error::FieldError;
use crate::scheduler::Scheduler;

/// Independent isotropic Gaussian endpoints.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GaussianFieldSpec {
    pub mu0: Vec<f64>,
    pub mu1: Vec<f64>,
    pub sigma0: f64,
    pub sigma1: f64,
}

impl GaussianFieldSpec {
    /// Standard normal prior and target in dimension `d`.
    pub fn standard(d: usize) -> Self {
        GaussianFieldSpec {
            mu0: vec![0.0; d],
            mu1: vec![0.0; d],
            sigma0: 1.0,
            sigma1: 1.0,
        }
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        if self.mu0.len() != self.mu1.len() {
            return Err(FieldError::Dim {
                expected: self.mu0.len(),
                got: self.mu1.len(),
            });
        }
        if !(self.sigma0 > 0.0 && self.sigma1 > 0.0) {
            return Err(FieldError::Config(format!(
                "endpoint standard deviations must be positive (sigma0={}, sigma1={})",
                self.sigma0, self.sigma1
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct GaussianField {
    spec: GaussianFieldSpec,
    sched: Scheduler,
}

impl GaussianField {
    pub fn new(spec: GaussianFieldSpec, sched: Scheduler) -> Result<Self, FieldError> {
        spec.validate()?;
        Ok(GaussianField { spec, sched })
    }

    pub fn spec(&self) -> &GaussianFieldSpec {
        &self.spec
    }

    pub fn scheduler(&self) -> &Scheduler {
        &self.sched
    }

    /// Marginal variance of each coordinate of `X_t`.
    pub fn marginal_var(&self, t: f64) -> f64 {
        let a = self.sched.alpha(t);
        let b = self.sched.beta(t);
        a * a * self.spec.sigma1 * self.spec.sigma1 + b * b * self.spec.sigma0 * self.spec.sigma0
    }

    /// Mean of `X_t`.
    pub fn marginal_mean(&self, t: f64) -> Vec<f64> {
        let a = self.sched.alpha(t);
        let b = self.sched.beta(t);
        self.spec
            .mu1
            .iter()
            .zip(&self.spec.mu0)
            .map(|(m1, m0)| a * m1 + b * m0)
            .collect()
    }

    /// Closed-form conditional means `(E[X_1 | X_t = x], E[X_0 | X_t = x])`.
    pub fn conditional_means(&self, t: f64, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let a = self.sched.alpha(t);
        let b = self.sched.beta(t);
        let s2 = self.marginal_var(t);
        let g1 = a * self.spec.sigma1 * self.spec.sigma1 / s2;
        let g0 = b * self.spec.sigma0 * self.spec.sigma0 / s2;
        let mt = self.marginal_mean(t);
        let m1 = x
            .iter()
            .zip(&self.spec.mu1)
            .zip(&mt)
            .map(|((xi, mu1), mti)| mu1 + g1 * (xi - mti))
            .collect();
        let m0 = x
            .iter()
            .zip(&self.spec.mu0)
            .zip(&mt)
            .map(|((xi, mu0), mti)| mu0 + g0 * (xi - mti))
            .collect();
        (m1, m0)
    }

    /// The scalar `gamma(t)` with `dv/dx = gamma(t) I`.
    pub fn input_jacobian_scalar(&self, t: f64) -> f64 {
        let a = self.sched.alpha(t);
        let b = self.sched.beta(t);
        let s2 = self.marginal_var(t);
        (self.sched.alpha_dot(t) * a * self.spec.sigma1 * self.spec.sigma1
            + self.sched.beta_dot(t) * b * self.spec.sigma0 * self.spec.sigma0)
            / s2
    }
}

impl VelocityField for GaussianField {
    fn dim(&self) -> usize {
        self.spec.mu0.len()
    }

    fn eval(&self, t: f64, x: &[f64]) -> Vec<f64> {
        let (m1, m0) = self.conditional_means(t, x);
        let ad = self.sched.alpha_dot(t);
        let bd = self.sched.beta_dot(t);
        m1.iter().zip(&m0).map(|(a, b)| ad * a + bd * b).collect()
    }

    fn input_vjp(&self, t: f64, _x: &[f64], w: &[f64]) -> Result<Vec<f64>, FieldError> {
        let g = self.input_jacobian_scalar(t);
        Ok(w.iter().map(|wi| g * wi).collect())
    }

    fn has_input_vjp(&self) -> bool {
        true
    }
}
