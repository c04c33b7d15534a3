//! Finite-difference Burgers dynamics and state bounds.
//!
//! A sample `x` holds the state and control of the PDE
//! `u_t + u u_s = nu u_ss + f` on an `m x n` space-time grid, flattened as
//! the state block `u[k * n + j]` followed by the control block
//! `f[m * n + k * n + j]` (`k` = time index, `j` = space index).
//!
//! The dynamics residual at an interior grid point, forward Euler in time
//! and central differences in space, is
//!
//! ```text
//! R(nu) = u[k+1][j] - u[k][j] + dt u[k][j] (u[k][j+1] - u[k][j-1]) / (2 ds)
//!         - dt nu (u[k][j+1] - 2 u[k][j] + u[k][j-1]) / ds^2 - dt f[k][j]
//! ```
//!
//! With the viscosity uncertain in `[nu_min, nu_max]`, the sample is
//! dynamically consistent iff `R(nu) = 0` for some admissible `nu`; since
//! `R` is affine in `nu` this is the interval condition
//! `min(R(nu_min), R(nu_max)) <= 0 <= max(R(nu_min), R(nu_max))`, encoded as
//! two inequality components per interior point.

use std::sync::Arc;

use super::{Component, ConstraintSet};
use crate::error::ConstraintError;

/// Time-varying state bound `0.8 (2 t^2 - 2 t + 1)`.
pub fn state_bound(t: f64) -> f64 {
    0.8 * (2.0 * t * t - 2.0 * t + 1.0)
}

#[derive(Debug)]
pub struct BurgersGrid {
    pub m: usize,
    pub n: usize,
    pub nu_min: f64,
    pub nu_max: f64,
    pub dt: f64,
    pub ds: f64,
}

impl BurgersGrid {
    pub fn new(
        m: usize,
        n: usize,
        nu_min: f64,
        nu_max: f64,
        dt: f64,
        ds: f64,
    ) -> Result<Self, ConstraintError> {
        if m < 2 {
            return Err(ConstraintError::GridTooSmall(format!(
                "need at least 2 time steps, got {m}"
            )));
        }
        if n < 3 {
            return Err(ConstraintError::GridTooSmall(format!(
                "need at least 3 spatial points, got {n}"
            )));
        }
        if !(0.0 <= nu_min && nu_min <= nu_max) {
            return Err(ConstraintError::Param(format!(
                "need 0 <= nu_min <= nu_max, got [{nu_min}, {nu_max}]"
            )));
        }
        if !(dt > 0.0 && ds > 0.0) {
            return Err(ConstraintError::Param("dt and ds must be positive".into()));
        }
        Ok(BurgersGrid {
            m,
            n,
            nu_min,
            nu_max,
            dt,
            ds,
        })
    }

    pub fn dim(&self) -> usize {
        2 * self.m * self.n
    }

    pub fn state_index(&self, k: usize, j: usize) -> usize {
        k * self.n + j
    }

    pub fn control_index(&self, k: usize, j: usize) -> usize {
        self.m * self.n + k * self.n + j
    }

    /// `R(nu)` at interior point `(k, j)`, `k < m - 1`, `0 < j < n - 1`.
    pub fn residual_nu(&self, x: &[f64], k: usize, j: usize, nu: f64) -> f64 {
        let u = |k, j| x[self.state_index(k, j)];
        let adv = u(k, j) * (u(k, j + 1) - u(k, j - 1)) / (2.0 * self.ds);
        let diff = (u(k, j + 1) - 2.0 * u(k, j) + u(k, j - 1)) / (self.ds * self.ds);
        u(k + 1, j) - u(k, j) + self.dt * (adv - nu * diff - x[self.control_index(k, j)])
    }

    /// `(min, max)` of the residual over the admissible viscosity interval.
    pub fn residual_range(&self, x: &[f64], k: usize, j: usize) -> (f64, f64) {
        let r_lo = self.residual_nu(x, k, j, self.nu_min);
        let r_hi = self.residual_nu(x, k, j, self.nu_max);
        (r_lo.min(r_hi), r_lo.max(r_hi))
    }

    /// Gradient of the active branch of the interval component:
    /// `min(R(nu_min), R(nu_max))` when `upper` is false, `-max(...)` when
    /// true. Ties take the `nu_min` branch.
    pub(super) fn add_scaled_residual_grad(
        &self,
        x: &[f64],
        k: usize,
        j: usize,
        upper: bool,
        scale: f64,
        out: &mut [f64],
    ) {
        let r_min = self.residual_nu(x, k, j, self.nu_min);
        let r_max = self.residual_nu(x, k, j, self.nu_max);
        let (nu, sign) = if upper {
            (if r_max >= r_min { self.nu_max } else { self.nu_min }, -1.0)
        } else {
            (if r_min <= r_max { self.nu_min } else { self.nu_max }, 1.0)
        };
        let s = scale * sign;
        let u = |k, j| x[self.state_index(k, j)];
        let two_ds = 2.0 * self.ds;
        let ds2 = self.ds * self.ds;
        out[self.state_index(k + 1, j)] += s;
        out[self.state_index(k, j)] +=
            s * (-1.0 + self.dt * (u(k, j + 1) - u(k, j - 1)) / two_ds + 2.0 * self.dt * nu / ds2);
        out[self.state_index(k, j + 1)] += s * (self.dt * u(k, j) / two_ds - self.dt * nu / ds2);
        out[self.state_index(k, j - 1)] += s * (-self.dt * u(k, j) / two_ds - self.dt * nu / ds2);
        out[self.control_index(k, j)] += s * (-self.dt);
    }
}

/// Dynamics interval constraints: two components per interior grid point,
/// `2 (m - 1) (n - 2)` total.
pub fn make_burgers_dynamics(
    m: usize,
    n: usize,
    nu_min: f64,
    nu_max: f64,
    dt: f64,
    ds: f64,
) -> Result<ConstraintSet, ConstraintError> {
    let grid = Arc::new(BurgersGrid::new(m, n, nu_min, nu_max, dt, ds)?);
    let mut comps = Vec::with_capacity(2 * (m - 1) * (n - 2));
    for k in 0..m - 1 {
        for j in 1..n - 1 {
            comps.push(Component::BurgersInterval {
                grid: grid.clone(),
                k,
                j,
                upper: false,
            });
            comps.push(Component::BurgersInterval {
                grid: grid.clone(),
                k,
                j,
                upper: true,
            });
        }
    }
    ConstraintSet::new(grid.dim(), comps)
}

/// `|u(t_k, s_j)| <= 0.8 (2 t_k^2 - 2 t_k + 1)` with `t_k = k / (m - 1)`,
/// `2 m n` components over the state block.
pub fn make_state_bounds_burgers(m: usize, n: usize) -> Result<ConstraintSet, ConstraintError> {
    if m < 2 || n < 1 {
        return Err(ConstraintError::GridTooSmall(format!(
            "state bounds need m >= 2, n >= 1, got {m} x {n}"
        )));
    }
    let mut comps = Vec::with_capacity(2 * m * n);
    for k in 0..m {
        let t = k as f64 / (m - 1) as f64;
        let bound = state_bound(t);
        for j in 0..n {
            let idx = k * n + j;
            comps.push(Component::Affine {
                coeffs: vec![(idx, 1.0)],
                rhs: bound,
            });
            comps.push(Component::Affine {
                coeffs: vec![(idx, -1.0)],
                rhs: bound,
            });
        }
    }
    ConstraintSet::new(2 * m * n, comps)
}

/// Dirichlet boundary `u(t, 0) = u(t, L) = 0` as equality pairs, `4 m`
/// components.
pub fn make_burgers_dirichlet(m: usize, n: usize) -> Result<ConstraintSet, ConstraintError> {
    if n < 2 {
        return Err(ConstraintError::GridTooSmall(
            "dirichlet boundary needs n >= 2".into(),
        ));
    }
    let mut comps = Vec::with_capacity(4 * m);
    for k in 0..m {
        for j in [0, n - 1] {
            let idx = k * n + j;
            comps.push(Component::Affine {
                coeffs: vec![(idx, 1.0)],
                rhs: 0.0,
            });
            comps.push(Component::Affine {
                coeffs: vec![(idx, -1.0)],
                rhs: 0.0,
            });
        }
    }
    ConstraintSet::new(2 * m * n, comps)
}

/// Simulates the discrete update map exactly: given the initial profile
/// `u0` (length `n`; its end values are forced to zero) and the control
/// block `f` (length `m * n`), returns the full flattened sample `[u, f]`.
pub fn simulate_burgers(
    u0: &[f64],
    f: &[f64],
    nu: f64,
    m: usize,
    n: usize,
    dt: f64,
    ds: f64,
) -> Vec<f64> {
    assert_eq!(u0.len(), n);
    assert_eq!(f.len(), m * n);
    let mut x = vec![0.0; 2 * m * n];
    x[m * n..].copy_from_slice(f);
    for j in 1..n - 1 {
        x[j] = u0[j];
    }
    for k in 0..m - 1 {
        for j in 1..n - 1 {
            let u = |jj: usize| x[k * n + jj];
            let adv = u(j) * (u(j + 1) - u(j - 1)) / (2.0 * ds);
            let diff = (u(j + 1) - 2.0 * u(j) + u(j - 1)) / (ds * ds);
            x[(k + 1) * n + j] = u(j) + dt * (-adv + nu * diff + f[k * n + j]);
        }
    }
    x
}
