//! Affine conditional-path schedulers and posterior operators.
//!
//! A scheduler is a differentiable pair `(alpha_t, beta_t)` on `[0, 1]` with
//! `alpha(0) = 0`, `alpha(1) = 1`, `beta(0) = 1`, `beta(1) = 0`, describing
//! the interpolation `X_t = alpha_t X_1 + beta_t X_0`. With
//! `Lambda_t = alpha_t beta_dot_t - alpha_dot_t beta_t != 0`, the velocity
//! field determines the conditional expectations of both endpoints:
//!
//! ```text
//! M_t(x) = (beta_dot_t x - beta_t v) / Lambda_t    (posterior mean of X_1)
//! N_t(x) = (-alpha_dot_t x + alpha_t v) / Lambda_t (posterior mean of X_0)
//! x = alpha_t M_t(x) + beta_t N_t(x)
//! ```

use std::fmt;
use std::sync::Arc;

use crate::error::SchedulerError;

/// Below this magnitude `Lambda_t` is treated as degenerate.
pub const LAMBDA_MIN: f64 = 1e-12;

const BOUNDARY_TOL: f64 = 1e-12;
const DERIV_CHECK_TOL: f64 = 1e-6;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Linear,
    Cosine,
    Custom {
        alpha: ScalarFn,
        beta: ScalarFn,
        alpha_dot: ScalarFn,
        beta_dot: ScalarFn,
    },
}

/// An affine conditional-path scheduler, selectable by name.
#[derive(Clone)]
pub struct Scheduler {
    name: String,
    kind: Kind,
}

impl fmt::Debug for Scheduler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Scheduler").field("name", &self.name).finish()
    }
}

impl Scheduler {
    /// The default scheduler: `alpha_t = t`, `beta_t = 1 - t`.
    pub fn linear() -> Self {
        Scheduler {
            name: "linear".into(),
            kind: Kind::Linear,
        }
    }

    /// `alpha_t = sin(pi t / 2)^2`, `beta_t = 1 - alpha_t`. Note that its
    /// `Lambda_t` vanishes at both endpoints, so it cannot be used on grids
    /// whose posterior operators are evaluated at `t = 0` or `t = 1`.
    pub fn cosine() -> Self {
        Scheduler {
            name: "cosine".into(),
            kind: Kind::Cosine,
        }
    }

    pub fn by_name(name: &str) -> Result<Self, SchedulerError> {
        match name {
            "linear" => Ok(Self::linear()),
            "cosine" => Ok(Self::cosine()),
            other => Err(SchedulerError::UnknownName(other.to_string())),
        }
    }

    /// Registers a custom scheduler. The boundary conditions and the
    /// consistency of the supplied derivatives with centered finite
    /// differences are checked before the scheduler is accepted.
    pub fn custom(
        name: &str,
        alpha: impl Fn(f64) -> f64 + Send + Sync + 'static,
        beta: impl Fn(f64) -> f64 + Send + Sync + 'static,
        alpha_dot: impl Fn(f64) -> f64 + Send + Sync + 'static,
        beta_dot: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self, SchedulerError> {
        let sched = Scheduler {
            name: name.to_string(),
            kind: Kind::Custom {
                alpha: Arc::new(alpha),
                beta: Arc::new(beta),
                alpha_dot: Arc::new(alpha_dot),
                beta_dot: Arc::new(beta_dot),
            },
        };
        sched.validate()?;
        Ok(sched)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alpha(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Linear => t,
            Kind::Cosine => {
                let s = (std::f64::consts::FRAC_PI_2 * t).sin();
                s * s
            }
            Kind::Custom { alpha, .. } => alpha(t),
        }
    }

    pub fn beta(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Linear => 1.0 - t,
            Kind::Cosine => 1.0 - self.alpha(t),
            Kind::Custom { beta, .. } => beta(t),
        }
    }

    pub fn alpha_dot(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Linear => 1.0,
            Kind::Cosine => std::f64::consts::FRAC_PI_2 * (std::f64::consts::PI * t).sin(),
            Kind::Custom { alpha_dot, .. } => alpha_dot(t),
        }
    }

    pub fn beta_dot(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Linear => -1.0,
            Kind::Cosine => -self.alpha_dot(t),
            Kind::Custom { beta_dot, .. } => beta_dot(t),
        }
    }

    /// `Lambda_t = alpha_t beta_dot_t - alpha_dot_t beta_t`, unchecked.
    pub fn lambda_raw(&self, t: f64) -> f64 {
        self.alpha(t) * self.beta_dot(t) - self.alpha_dot(t) * self.beta(t)
    }

    /// `Lambda_t`, reporting a degenerate-scheduler error when its magnitude
    /// falls below [`LAMBDA_MIN`].
    pub fn lambda(&self, t: f64) -> Result<f64, SchedulerError> {
        let v = self.lambda_raw(t);
        if v.abs() < LAMBDA_MIN {
            return Err(SchedulerError::DegenerateLambda {
                t,
                value: v.abs(),
                threshold: LAMBDA_MIN,
            });
        }
        Ok(v)
    }

    /// Posterior terminal estimate `M_t(x)` given the velocity `v` at
    /// `(t, x)`. At `t = 1` this is `x` exactly.
    pub fn posterior_mean(&self, t: f64, x: &[f64], v: &[f64]) -> Result<Vec<f64>, SchedulerError> {
        debug_assert_eq!(x.len(), v.len());
        if t == 1.0 {
            return Ok(x.to_vec());
        }
        let lam = self.lambda(t)?;
        let cx = self.beta_dot(t) / lam;
        let cv = -self.beta(t) / lam;
        Ok(x.iter().zip(v).map(|(xi, vi)| cx * xi + cv * vi).collect())
    }

    /// Posterior noise estimate `N_t(x)` given the velocity `v` at `(t, x)`.
    /// At `t = 0` this is `x` exactly.
    pub fn posterior_noise(
        &self,
        t: f64,
        x: &[f64],
        v: &[f64],
    ) -> Result<Vec<f64>, SchedulerError> {
        debug_assert_eq!(x.len(), v.len());
        if t == 0.0 {
            return Ok(x.to_vec());
        }
        let lam = self.lambda(t)?;
        let cx = -self.alpha_dot(t) / lam;
        let cv = self.alpha(t) / lam;
        Ok(x.iter().zip(v).map(|(xi, vi)| cx * xi + cv * vi).collect())
    }

    /// Checks the boundary conditions and that the supplied derivatives match
    /// centered finite differences at 101 uniform grid points.
    pub fn validate(&self) -> Result<(), SchedulerError> {
        let boundary = [
            ("alpha(0)", self.alpha(0.0), 0.0),
            ("alpha(1)", self.alpha(1.0), 1.0),
            ("beta(0)", self.beta(0.0), 1.0),
            ("beta(1)", self.beta(1.0), 0.0),
        ];
        for (what, got, want) in boundary {
            if (got - want).abs() > BOUNDARY_TOL {
                return Err(SchedulerError::Boundary {
                    name: self.name.clone(),
                    detail: format!("{what} = {got:.3e}, expected {want}"),
                });
            }
        }
        let h = 1e-6;
        for k in 0..=100 {
            let t = k as f64 / 100.0;
            // Centered differences; the scheduler functions are evaluated
            // slightly outside [0, 1] at the interval ends.
            let (lo, hi) = (t - h, t + h);
            let fd_alpha = (self.alpha(hi) - self.alpha(lo)) / (hi - lo);
            let fd_beta = (self.beta(hi) - self.beta(lo)) / (hi - lo);
            if (fd_alpha - self.alpha_dot(t)).abs() > DERIV_CHECK_TOL {
                return Err(SchedulerError::DerivativeMismatch {
                    name: self.name.clone(),
                    t,
                    analytic: self.alpha_dot(t),
                    numeric: fd_alpha,
                });
            }
            if (fd_beta - self.beta_dot(t)).abs() > DERIV_CHECK_TOL {
                return Err(SchedulerError::DerivativeMismatch {
                    name: self.name.clone(),
                    t,
                    analytic: self.beta_dot(t),
                    numeric: fd_beta,
                });
            }
        }
        Ok(())
    }

    /// Checks `Lambda != 0` at every knot of `grid` where posterior operators
    /// will be evaluated (all knots except `t = 0`; `t = 1` is exempt because
    /// both posterior operators are exact there by the boundary conditions).
    pub fn validate_grid(&self, grid: &TimeGrid) -> Result<(), SchedulerError> {
        for &t in grid.knots() {
            if t > 0.0 && t < 1.0 {
                self.lambda(t)?;
            }
        }
        Ok(())
    }
}

/// A strictly increasing grid `0 = t_0 < ... < t_N = 1`.
#[derive(Clone, Debug)]
pub struct TimeGrid {
    knots: Vec<f64>,
}

impl TimeGrid {
    /// Uniform grid with `n` steps (`n + 1` knots).
    pub fn uniform(n: usize) -> Self {
        assert!(n >= 1, "time grid needs at least one step");
        let knots = (0..=n).map(|j| j as f64 / n as f64).collect();
        TimeGrid { knots }
    }

    pub fn from_knots(knots: Vec<f64>) -> Result<Self, SchedulerError> {
        if knots.len() < 2 {
            return Err(SchedulerError::Grid("need at least two knots".into()));
        }
        if knots[0] != 0.0 {
            return Err(SchedulerError::Grid(format!(
                "first knot must be 0, got {}",
                knots[0]
            )));
        }
        if *knots.last().unwrap() != 1.0 {
            return Err(SchedulerError::Grid(format!(
                "last knot must be 1, got {}",
                knots.last().unwrap()
            )));
        }
        let mut sum = 0.0;
        for w in knots.windows(2) {
            let dt = w[1] - w[0];
            if dt <= 0.0 {
                return Err(SchedulerError::Grid(format!(
                    "knots not strictly increasing near t={}",
                    w[0]
                )));
            }
            sum += dt;
        }
        if (sum - 1.0).abs() > 1e-12 {
            return Err(SchedulerError::Grid(format!(
                "step lengths sum to {sum}, expected 1"
            )));
        }
        Ok(TimeGrid { knots })
    }

    /// Number of steps `N`.
    pub fn num_steps(&self) -> usize {
        self.knots.len() - 1
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn knot(&self, j: usize) -> f64 {
        self.knots[j]
    }

    pub fn dt(&self, j: usize) -> f64 {
        self.knots[j + 1] - self.knots[j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lambda_linear() {
        let s = Scheduler::linear();
        assert_eq!(s.lambda(0.5).unwrap(), -1.0);
        assert_eq!(s.lambda(0.0).unwrap(), -1.0);
    }

    #[test]
    fn lambda_cosine_matches_finite_difference_oracle() {
        let s = Scheduler::cosine();
        let t = 0.3;
        // Oracle: Lambda from centered finite differences of alpha and beta.
        let h = 1e-6;
        let fd_alpha_dot = (s.alpha(t + h) - s.alpha(t - h)) / (2.0 * h);
        let fd_beta_dot = (s.beta(t + h) - s.beta(t - h)) / (2.0 * h);
        let oracle = s.alpha(t) * fd_beta_dot - fd_alpha_dot * s.beta(t);
        let got = s.lambda(t).unwrap();
        assert!((got - oracle).abs() < 1e-6, "got {got}, oracle {oracle}");
        // Frozen value: -(pi/2) sin(0.3 pi).
        assert!((got - (-1.270_800_923_078_814_9)).abs() < 1e-12);
    }

    #[test]
    fn cosine_is_degenerate_at_endpoints() {
        let s = Scheduler::cosine();
        assert!(matches!(
            s.lambda(0.0),
            Err(SchedulerError::DegenerateLambda { .. })
        ));
        assert!(matches!(
            s.lambda(1.0),
            Err(SchedulerError::DegenerateLambda { .. })
        ));
    }

    #[test]
    fn builtin_schedulers_validate() {
        Scheduler::linear().validate().unwrap();
        Scheduler::cosine().validate().unwrap();
    }

    #[test]
    fn custom_registration_rejects_bad_boundary() {
        let err = Scheduler::custom("bad", |t| t + 0.1, |t| 1.0 - t, |_| 1.0, |_| -1.0);
        assert!(matches!(err, Err(SchedulerError::Boundary { .. })));
    }

    #[test]
    fn custom_registration_rejects_bad_derivative() {
        let err = Scheduler::custom("bad", |t| t, |t| 1.0 - t, |_| 2.0, |_| -1.0);
        assert!(matches!(err, Err(SchedulerError::DerivativeMismatch { .. })));
    }

    #[test]
    fn custom_quadratic_scheduler_registers() {
        // alpha = t^2 is a valid affine-path scheduler with Lambda < 0 on (0, 1].
        let s = Scheduler::custom(
            "quadratic",
            |t| t * t,
            |t| 1.0 - t * t,
            |t| 2.0 * t,
            |t| -2.0 * t,
        )
        .unwrap();
        assert!((s.lambda(0.5).unwrap() + 1.0).abs() < 1e-12); // -2t*1+... = -2*0.5 = -1
    }

    #[test]
    fn posterior_mean_linear_closed_form() {
        let s = Scheduler::linear();
        let x = [1.0, -2.0];
        let v = [0.5, 3.0];
        for t in [0.0, 0.25, 0.7] {
            let m = s.posterior_mean(t, &x, &v).unwrap();
            for k in 0..2 {
                assert!((m[k] - (x[k] + (1.0 - t) * v[k])).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn posterior_noise_linear_closed_form() {
        let s = Scheduler::linear();
        let x = [1.0, -2.0];
        let v = [0.5, 3.0];
        for t in [0.3, 0.9, 1.0] {
            let n = s.posterior_noise(t, &x, &v).unwrap();
            for k in 0..2 {
                assert!((n[k] - (x[k] - t * v[k])).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn posterior_boundaries_are_exact() {
        let s = Scheduler::linear();
        let x = [0.3, -7.5, 2.0];
        let v = [100.0, -3.0, 0.1];
        assert_eq!(s.posterior_mean(1.0, &x, &v).unwrap(), x.to_vec());
        assert_eq!(s.posterior_noise(0.0, &x, &v).unwrap(), x.to_vec());
    }

    #[test]
    fn uniform_grid_steps_sum_to_one() {
        for n in [1, 7, 50, 400] {
            let g = TimeGrid::uniform(n);
            let sum: f64 = (0..n).map(|j| g.dt(j)).sum();
            assert!((sum - 1.0).abs() < 1e-12);
            assert_eq!(g.knot(0), 0.0);
            assert_eq!(g.knot(n), 1.0);
        }
    }

    #[test]
    fn bad_grids_are_rejected() {
        assert!(TimeGrid::from_knots(vec![0.0, 0.5]).is_err()); // last != 1
        assert!(TimeGrid::from_knots(vec![0.1, 1.0]).is_err()); // first != 0
        assert!(TimeGrid::from_knots(vec![0.0, 0.6, 0.4, 1.0]).is_err()); // not increasing
        assert!(TimeGrid::from_knots(vec![0.0, 0.2, 0.9, 1.0]).is_ok());
    }

    proptest! {
        /// alpha_t M_t(x) + beta_t N_t(x) = x for every scheduler and probe.
        #[test]
        fn posterior_identity(
            t in 0.001f64..0.999,
            x in proptest::collection::vec(-50.0f64..50.0, 1..6),
            v in proptest::collection::vec(-50.0f64..50.0, 1..6),
            cosine in any::<bool>(),
        ) {
            let n = x.len().min(v.len());
            let (x, v) = (&x[..n], &v[..n]);
            let s = if cosine { Scheduler::cosine() } else { Scheduler::linear() };
            let m = s.posterior_mean(t, x, v).unwrap();
            let nz = s.posterior_noise(t, x, v).unwrap();
            let (a, b) = (s.alpha(t), s.beta(t));
            for k in 0..n {
                prop_assert!((a * m[k] + b * nz[k] - x[k]).abs() < 1e-9);
            }
        }
    }
}
