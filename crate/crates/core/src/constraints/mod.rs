//! Hard constraints `h(x) <= 0` and scalar costs `C(x)`.
//!
//! A [`ConstraintSet`] is a list of scalar components `h_i(x)`, each with a
//! gradient; the inequality is understood componentwise. Equality constraints
//! `g(x) = 0` are stored as the pair `(g <= 0, -g <= 0)`.

mod burgers;
mod cost;

pub use burgers::{
    make_burgers_dirichlet, make_burgers_dynamics, make_state_bounds_burgers, simulate_burgers,
    state_bound, BurgersGrid,
};
pub use cost::{CostClosure, CostFn, CostSpec};

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::ConstraintError;

/// Default tolerance used when classifying a point as feasible in reports.
pub const FEASIBILITY_TOL: f64 = 1e-6;

/// A user-defined differentiable scalar constraint.
pub trait ConstraintFn: Send + Sync {
    fn value(&self, x: &[f64]) -> f64;
    fn grad(&self, x: &[f64]) -> Vec<f64>;
}

/// Declarative, serializable constraint descriptions. Each spec expands into
/// one or more scalar components.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ConstraintSpec {
    /// `normal . x <= offset`
    Halfspace { normal: Vec<f64>, offset: f64 },
    /// Componentwise `lower_k <= x_k <= upper_k`.
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// Keep-out ball: `||x_coords - center|| >= radius`, encoded as
    /// `radius - ||x_coords - center|| <= 0`. `coords` default to `0..center.len()`.
    BallObstacle {
        center: Vec<f64>,
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        coords: Option<Vec<usize>>,
    },
    /// `normal . x = offset`, stored as an inequality pair.
    AffineEquality { normal: Vec<f64>, offset: f64 },
    /// Equality chain `s_{i+1} = A s_i + B a_i + c` over a flattened
    /// trajectory `(s_0, a_0, ..., s_{H-1}, a_{H-1})`.
    LinearDynamics {
        a: Vec<Vec<f64>>,
        b: Vec<Vec<f64>>,
        c: Vec<f64>,
        horizon: usize,
        state_dim: usize,
        action_dim: usize,
    },
    /// Interval form of the discretized Burgers dynamics with uncertain
    /// viscosity.
    BurgersDynamics {
        time_steps: usize,
        space_points: usize,
        nu_min: f64,
        nu_max: f64,
        dt: f64,
        ds: f64,
    },
    /// Time-varying bound `|u(t, s)| <= 0.8 (2 t^2 - 2 t + 1)` on the state
    /// block of a Burgers sample.
    BurgersStateBounds {
        time_steps: usize,
        space_points: usize,
    },
    /// Dirichlet boundary `u(t, 0) = u(t, L) = 0` as equality pairs.
    BurgersDirichlet {
        time_steps: usize,
        space_points: usize,
    },
}

/// One differentiable scalar component `h_i(x) <= 0`.
#[derive(Clone)]
pub enum Component {
    /// `sum_k coeffs_k x_{idx_k} - rhs <= 0`
    Affine { coeffs: Vec<(usize, f64)>, rhs: f64 },
    /// `radius - ||x_coords - center|| <= 0`
    BallOutside {
        coords: Vec<usize>,
        center: Vec<f64>,
        radius: f64,
    },
    /// One side of the interval condition on the Burgers finite-difference
    /// residual at grid point `(k, j)`.
    BurgersInterval {
        grid: Arc<BurgersGrid>,
        k: usize,
        j: usize,
        upper: bool,
    },
    Custom(Arc<dyn ConstraintFn>),
}

impl Component {
    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            Component::Affine { coeffs, rhs } => {
                coeffs.iter().map(|&(i, c)| c * x[i]).sum::<f64>() - rhs
            }
            Component::BallOutside {
                coords,
                center,
                radius,
            } => {
                let d2: f64 = coords
                    .iter()
                    .zip(center)
                    .map(|(&i, c)| (x[i] - c) * (x[i] - c))
                    .sum();
                radius - d2.sqrt()
            }
            Component::BurgersInterval { grid, k, j, upper } => {
                let (lo, hi) = grid.residual_range(x, *k, *j);
                if *upper {
                    -hi
                } else {
                    lo
                }
            }
            Component::Custom(f) => f.value(x),
        }
    }

    /// `out += scale * grad h_i(x)`.
    pub fn add_scaled_grad(&self, x: &[f64], scale: f64, out: &mut [f64]) {
        match self {
            Component::Affine { coeffs, .. } => {
                for &(i, c) in coeffs {
                    out[i] += scale * c;
                }
            }
            Component::BallOutside {
                coords,
                center,
                radius: _,
            } => {
                let mut diff: Vec<f64> = coords
                    .iter()
                    .zip(center)
                    .map(|(&i, c)| x[i] - c)
                    .collect();
                let mut nrm = crate::linalg::norm(&diff);
                if nrm < 1e-9 {
                    // Probes at the exact center are perturbed.
                    diff[0] += 1e-9;
                    nrm = crate::linalg::norm(&diff);
                }
                for (&i, dk) in coords.iter().zip(&diff) {
                    out[i] += scale * (-dk / nrm);
                }
            }
            Component::BurgersInterval { grid, k, j, upper } => {
                grid.add_scaled_residual_grad(x, *k, *j, *upper, scale, out);
            }
            Component::Custom(f) => {
                let g = f.grad(x);
                crate::linalg::axpy(scale, &g, out);
            }
        }
    }

    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        self.add_scaled_grad(x, 1.0, &mut out);
        out
    }
}

/// Feasibility of a point against a constraint set.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FeasibilityReport {
    /// `max_i h_i(x)`; zero for an empty set.
    pub residual: f64,
    pub violated: Vec<usize>,
    /// Components that evaluated to a non-finite value.
    pub non_finite: Vec<usize>,
    pub tolerance: f64,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.residual <= self.tolerance && self.non_finite.is_empty()
    }
}

#[derive(Clone, Default)]
pub struct ConstraintSet {
    dim: usize,
    components: Vec<Component>,
    specs: Option<Vec<ConstraintSpec>>,
}

impl ConstraintSet {
    pub fn empty(dim: usize) -> Self {
        ConstraintSet {
            dim,
            components: Vec::new(),
            specs: Some(Vec::new()),
        }
    }

    pub fn new(dim: usize, components: Vec<Component>) -> Result<Self, ConstraintError> {
        let set = ConstraintSet {
            dim,
            components,
            specs: None,
        };
        set.check_indices()?;
        Ok(set)
    }

    /// Builds a set from declarative specs, remembering them for
    /// serialization.
    pub fn from_specs(dim: usize, specs: &[ConstraintSpec]) -> Result<Self, ConstraintError> {
        let mut components = Vec::new();
        for spec in specs {
            expand_spec(dim, spec, &mut components)?;
        }
        let set = ConstraintSet {
            dim,
            components,
            specs: Some(specs.to_vec()),
        };
        set.check_indices()?;
        Ok(set)
    }

    fn check_indices(&self) -> Result<(), ConstraintError> {
        for comp in &self.components {
            let max = match comp {
                Component::Affine { coeffs, .. } => {
                    coeffs.iter().map(|&(i, _)| i).max().unwrap_or(0)
                }
                Component::BallOutside { coords, .. } => {
                    *coords.iter().max().unwrap_or(&0)
                }
                Component::BurgersInterval { grid, .. } => grid.dim() - 1,
                Component::Custom(_) => 0,
            };
            if max >= self.dim {
                return Err(ConstraintError::Dim(format!(
                    "component touches index {max} but the set has dimension {}",
                    self.dim
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// The specs this set was built from, when available (sets containing
    /// programmatic components are not serializable).
    pub fn specs(&self) -> Option<&[ConstraintSpec]> {
        self.specs.as_deref()
    }

    /// Appends all components (and specs, when both sides carry them) of
    /// `other`.
    pub fn extend(&mut self, other: ConstraintSet) {
        assert_eq!(self.dim, other.dim, "constraint dimension mismatch");
        self.components.extend(other.components);
        match (&mut self.specs, other.specs) {
            (Some(a), Some(b)) => a.extend(b),
            (specs, _) => *specs = None,
        }
    }

    pub fn values_into(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.components.iter().map(|c| c.value(x)));
    }

    /// `max_i h_i(x)`, zero for an empty set and infinite when any component
    /// is non-finite.
    pub fn max_component(&self, x: &[f64]) -> f64 {
        let mut m = f64::NEG_INFINITY;
        for c in &self.components {
            let v = c.value(x);
            if !v.is_finite() {
                return f64::INFINITY;
            }
            m = m.max(v);
        }
        if m == f64::NEG_INFINITY {
            0.0
        } else {
            m
        }
    }

    pub fn residual(&self, x: &[f64]) -> FeasibilityReport {
        self.residual_with_tol(x, FEASIBILITY_TOL)
    }

    pub fn residual_with_tol(&self, x: &[f64], tolerance: f64) -> FeasibilityReport {
        let mut residual = f64::NEG_INFINITY;
        let mut violated = Vec::new();
        let mut non_finite = Vec::new();
        for (i, comp) in self.components.iter().enumerate() {
            let v = comp.value(x);
            if !v.is_finite() {
                non_finite.push(i);
                continue;
            }
            residual = residual.max(v);
            if v > tolerance {
                violated.push(i);
            }
        }
        if self.components.is_empty() || residual == f64::NEG_INFINITY {
            residual = if non_finite.is_empty() { 0.0 } else { f64::INFINITY };
        }
        FeasibilityReport {
            residual,
            violated,
            non_finite,
            tolerance,
        }
    }

    /// When the set is exactly one halfspace, returns its dense normal and
    /// offset.
    pub fn as_single_halfspace(&self) -> Option<(Vec<f64>, f64)> {
        if self.components.len() != 1 {
            return None;
        }
        match &self.components[0] {
            Component::Affine { coeffs, rhs } => {
                let mut a = vec![0.0; self.dim];
                for &(i, c) in coeffs {
                    a[i] += c;
                }
                Some((a, *rhs))
            }
            _ => None,
        }
    }

    /// When every component bounds a single coordinate, returns the
    /// componentwise box `[lo, hi]` (infinite where unbounded).
    pub fn as_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        if self.components.is_empty() {
            return None;
        }
        let mut lo = vec![f64::NEG_INFINITY; self.dim];
        let mut hi = vec![f64::INFINITY; self.dim];
        for comp in &self.components {
            match comp {
                Component::Affine { coeffs, rhs } if coeffs.len() == 1 => {
                    let (i, c) = coeffs[0];
                    if c > 0.0 {
                        hi[i] = hi[i].min(rhs / c);
                    } else if c < 0.0 {
                        lo[i] = lo[i].max(rhs / c);
                    } else if *rhs < 0.0 {
                        return None; // 0 <= rhs < 0: infeasible row
                    }
                }
                _ => return None,
            }
        }
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return None;
        }
        Some((lo, hi))
    }

    /// When the set is exactly one keep-out ball, returns it.
    pub fn as_single_ball(&self) -> Option<(Vec<usize>, Vec<f64>, f64)> {
        if self.components.len() != 1 {
            return None;
        }
        match &self.components[0] {
            Component::BallOutside {
                coords,
                center,
                radius,
            } => Some((coords.clone(), center.clone(), *radius)),
            _ => None,
        }
    }
}

impl std::fmt::Debug for ConstraintSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ConstraintSet")
            .field("dim", &self.dim)
            .field("components", &self.components.len())
            .finish()
    }
}

fn expand_spec(
    dim: usize,
    spec: &ConstraintSpec,
    out: &mut Vec<Component>,
) -> Result<(), ConstraintError> {
    match spec {
        ConstraintSpec::Halfspace { normal, offset } => {
            if normal.len() != dim {
                return Err(ConstraintError::Dim(format!(
                    "halfspace normal has length {}, expected {dim}",
                    normal.len()
                )));
            }
            out.push(dense_affine(normal, *offset));
        }
        ConstraintSpec::Box { lower, upper } => {
            if lower.len() != dim || upper.len() != dim {
                return Err(ConstraintError::Dim("box bounds must match dimension".into()));
            }
            for (i, (&l, &u)) in lower.iter().zip(upper).enumerate() {
                if l > u {
                    return Err(ConstraintError::Param(format!(
                        "box lower {l} exceeds upper {u} at index {i}"
                    )));
                }
                out.push(Component::Affine {
                    coeffs: vec![(i, 1.0)],
                    rhs: u,
                });
                out.push(Component::Affine {
                    coeffs: vec![(i, -1.0)],
                    rhs: -l,
                });
            }
        }
        ConstraintSpec::BallObstacle {
            center,
            radius,
            coords,
        } => {
            let coords = coords
                .clone()
                .unwrap_or_else(|| (0..center.len()).collect());
            if coords.len() != center.len() {
                return Err(ConstraintError::Dim(
                    "ball obstacle coords must match center length".into(),
                ));
            }
            if *radius <= 0.0 {
                return Err(ConstraintError::Param("ball radius must be positive".into()));
            }
            out.push(Component::BallOutside {
                coords,
                center: center.clone(),
                radius: *radius,
            });
        }
        ConstraintSpec::AffineEquality { normal, offset } => {
            if normal.len() != dim {
                return Err(ConstraintError::Dim(format!(
                    "equality normal has length {}, expected {dim}",
                    normal.len()
                )));
            }
            out.push(dense_affine(normal, *offset));
            let neg: Vec<f64> = normal.iter().map(|c| -c).collect();
            out.push(dense_affine(&neg, -offset));
        }
        ConstraintSpec::LinearDynamics {
            a,
            b,
            c,
            horizon,
            state_dim,
            action_dim,
        } => {
            let set = make_linear_dynamics(a, b, c, *horizon, *state_dim, *action_dim)?;
            if set.dim() != dim {
                return Err(ConstraintError::Dim(format!(
                    "linear dynamics need dimension {}, set has {dim}",
                    set.dim()
                )));
            }
            out.extend(set.components);
        }
        ConstraintSpec::BurgersDynamics {
            time_steps,
            space_points,
            nu_min,
            nu_max,
            dt,
            ds,
        } => {
            let set =
                make_burgers_dynamics(*time_steps, *space_points, *nu_min, *nu_max, *dt, *ds)?;
            if set.dim() != dim {
                return Err(ConstraintError::Dim(format!(
                    "burgers dynamics need dimension {}, set has {dim}",
                    set.dim()
                )));
            }
            out.extend(set.components);
        }
        ConstraintSpec::BurgersStateBounds {
            time_steps,
            space_points,
        } => {
            let set = make_state_bounds_burgers(*time_steps, *space_points)?;
            if set.dim() != dim {
                return Err(ConstraintError::Dim(format!(
                    "burgers bounds need dimension {}, set has {dim}",
                    set.dim()
                )));
            }
            out.extend(set.components);
        }
        ConstraintSpec::BurgersDirichlet {
            time_steps,
            space_points,
        } => {
            let set = make_burgers_dirichlet(*time_steps, *space_points)?;
            if set.dim() != dim {
                return Err(ConstraintError::Dim(format!(
                    "burgers dirichlet needs dimension {}, set has {dim}",
                    set.dim()
                )));
            }
            out.extend(set.components);
        }
    }
    Ok(())
}

fn dense_affine(normal: &[f64], rhs: f64) -> Component {
    Component::Affine {
        coeffs: normal
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(i, c)| (i, *c))
            .collect(),
        rhs,
    }
}

/// Index of state coordinate `k` of step `i` in a flattened trajectory.
pub fn traj_state_index(i: usize, k: usize, state_dim: usize, action_dim: usize) -> usize {
    i * (state_dim + action_dim) + k
}

/// Index of action coordinate `k` of step `i` in a flattened trajectory.
pub fn traj_action_index(i: usize, k: usize, state_dim: usize, action_dim: usize) -> usize {
    i * (state_dim + action_dim) + state_dim + k
}

/// Builds the equality chain `s_{i+1} = A s_i + B a_i + c` over a flattened
/// trajectory of `horizon` steps, as `2 (horizon - 1) state_dim` inequality
/// components.
pub fn make_linear_dynamics(
    a: &[Vec<f64>],
    b: &[Vec<f64>],
    c: &[f64],
    horizon: usize,
    state_dim: usize,
    action_dim: usize,
) -> Result<ConstraintSet, ConstraintError> {
    if a.len() != state_dim || a.iter().any(|row| row.len() != state_dim) {
        return Err(ConstraintError::Dim("A must be state_dim x state_dim".into()));
    }
    if b.len() != state_dim || b.iter().any(|row| row.len() != action_dim) {
        return Err(ConstraintError::Dim("B must be state_dim x action_dim".into()));
    }
    if c.len() != state_dim {
        return Err(ConstraintError::Dim("c must have length state_dim".into()));
    }
    if horizon < 2 {
        return Err(ConstraintError::Param("horizon must be at least 2".into()));
    }
    let dim = horizon * (state_dim + action_dim);
    let mut components = Vec::with_capacity(2 * (horizon - 1) * state_dim);
    for i in 0..horizon - 1 {
        for k in 0..state_dim {
            // g = s_{i+1}[k] - (A s_i + B a_i + c)[k]
            let mut coeffs = Vec::with_capacity(1 + state_dim + action_dim);
            coeffs.push((traj_state_index(i + 1, k, state_dim, action_dim), 1.0));
            for (jj, akj) in a[k].iter().enumerate() {
                if *akj != 0.0 {
                    coeffs.push((traj_state_index(i, jj, state_dim, action_dim), -akj));
                }
            }
            for (jj, bkj) in b[k].iter().enumerate() {
                if *bkj != 0.0 {
                    coeffs.push((traj_action_index(i, jj, state_dim, action_dim), -bkj));
                }
            }
            let rhs = c[k];
            components.push(Component::Affine {
                coeffs: coeffs.clone(),
                rhs,
            });
            let neg: Vec<(usize, f64)> = coeffs.iter().map(|&(i, v)| (i, -v)).collect();
            components.push(Component::Affine {
                coeffs: neg,
                rhs: -rhs,
            });
        }
    }
    ConstraintSet::new(dim, components)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn halfspace_residual() {
        let cs = ConstraintSet::from_specs(
            2,
            &[ConstraintSpec::Halfspace {
                normal: vec![1.0, 0.0],
                offset: 1.0,
            }],
        )
        .unwrap();
        let rep = cs.residual(&[0.0, 0.0]);
        assert_eq!(rep.residual, -1.0);
        assert!(rep.is_feasible());
        let rep = cs.residual(&[3.0, 5.0]);
        assert_eq!(rep.residual, 2.0);
        assert_eq!(rep.violated, vec![0]);
    }

    #[test]
    fn ball_obstacle_residual() {
        let cs = ConstraintSet::from_specs(
            2,
            &[ConstraintSpec::BallObstacle {
                center: vec![0.0, 0.0],
                radius: 1.0,
                coords: None,
            }],
        )
        .unwrap();
        let rep = cs.residual(&[0.5, 0.0]);
        assert!((rep.residual - 0.5).abs() < 1e-15);
        assert!(!rep.is_feasible());
        assert!(cs.residual(&[2.0, 0.0]).is_feasible());
    }

    #[test]
    fn equality_pair_residual_is_abs() {
        let cs = ConstraintSet::from_specs(
            2,
            &[ConstraintSpec::AffineEquality {
                normal: vec![1.0, 1.0],
                offset: 1.0,
            }],
        )
        .unwrap();
        assert_eq!(cs.len(), 2);
        for x in [[0.3, 0.2], [1.5, 0.5], [0.5, 0.5]] {
            let g: f64 = x[0] + x[1] - 1.0;
            let rep = cs.residual(&x);
            assert!((rep.residual - g.abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_dynamics_constructive_satisfaction() {
        // Iterate the map so the equality chain is satisfied by construction.
        let a = vec![vec![1.0, 0.1], vec![0.0, 0.9]];
        let b = vec![vec![0.0], vec![0.1]];
        let c = vec![0.01, -0.02];
        let (sd, ad, h) = (2, 1, 5);
        let set = make_linear_dynamics(&a, &b, &c, h, sd, ad).unwrap();
        assert_eq!(set.len(), 2 * (h - 1) * sd);

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut x = vec![0.0; h * (sd + ad)];
        let mut s = vec![0.3, -0.4];
        for i in 0..h {
            let act = [rng.random_range(-1.0..1.0)];
            for k in 0..sd {
                x[traj_state_index(i, k, sd, ad)] = s[k];
            }
            x[traj_action_index(i, 0, sd, ad)] = act[0];
            let next: Vec<f64> = (0..sd)
                .map(|k| {
                    a[k].iter().zip(&s).map(|(m, v)| m * v).sum::<f64>()
                        + b[k][0] * act[0]
                        + c[k]
                })
                .collect();
            s = next;
        }
        let rep = set.residual(&x);
        assert!(rep.residual <= 1e-12, "residual {}", rep.residual);

        // A random trajectory is infeasible.
        let y: Vec<f64> = (0..x.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        assert!(set.residual(&y).residual > 1e-3);
    }

    #[test]
    fn zero_dynamics_accepts_constant_state() {
        let eye = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let b = vec![vec![0.0], vec![0.0]];
        let c = vec![0.0, 0.0];
        let set = make_linear_dynamics(&eye, &b, &c, 4, 2, 1).unwrap();
        let mut x = vec![0.0; 4 * 3];
        for i in 0..4 {
            x[traj_state_index(i, 0, 2, 1)] = 0.7;
            x[traj_state_index(i, 1, 2, 1)] = -0.2;
            x[traj_action_index(i, 0, 2, 1)] = 99.0; // actions are free
        }
        assert!(set.residual(&x).residual <= 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = vec![vec![1.0]];
        let b = vec![vec![1.0, 2.0]];
        let c = vec![0.0];
        assert!(matches!(
            make_linear_dynamics(&a, &b, &c, 3, 1, 1),
            Err(ConstraintError::Dim(_))
        ));
    }

    #[test]
    fn structure_detection() {
        let hs = ConstraintSet::from_specs(
            2,
            &[ConstraintSpec::Halfspace {
                normal: vec![1.0, 2.0],
                offset: 4.0,
            }],
        )
        .unwrap();
        let (a, b) = hs.as_single_halfspace().unwrap();
        assert_eq!((a, b), (vec![1.0, 2.0], 4.0));
        assert!(hs.as_box().is_none());

        // An axis-aligned halfspace is also a (half-open) box.
        let axis = ConstraintSet::from_specs(
            2,
            &[ConstraintSpec::Halfspace {
                normal: vec![0.0, 2.0],
                offset: 4.0,
            }],
        )
        .unwrap();
        let (lo, hi) = axis.as_box().unwrap();
        assert_eq!(lo, vec![f64::NEG_INFINITY, f64::NEG_INFINITY]);
        assert_eq!(hi, vec![f64::INFINITY, 2.0]);

        let bx = ConstraintSet::from_specs(
            2,
            &[ConstraintSpec::Box {
                lower: vec![-1.0, -2.0],
                upper: vec![1.0, 2.0],
            }],
        )
        .unwrap();
        let (lo, hi) = bx.as_box().unwrap();
        assert_eq!(lo, vec![-1.0, -2.0]);
        assert_eq!(hi, vec![1.0, 2.0]);
        assert!(bx.as_single_halfspace().is_none());

        let ball = ConstraintSet::from_specs(
            3,
            &[ConstraintSpec::BallObstacle {
                center: vec![1.0, 0.0],
                radius: 0.5,
                coords: Some(vec![0, 2]),
            }],
        )
        .unwrap();
        assert!(ball.as_single_ball().is_some());
    }

    #[test]
    fn non_finite_component_is_flagged() {
        struct Bad;
        impl ConstraintFn for Bad {
            fn value(&self, _x: &[f64]) -> f64 {
                f64::NAN
            }
            fn grad(&self, x: &[f64]) -> Vec<f64> {
                vec![0.0; x.len()]
            }
        }
        let set = ConstraintSet::new(1, vec![Component::Custom(Arc::new(Bad))]).unwrap();
        let rep = set.residual(&[0.0]);
        assert_eq!(rep.non_finite, vec![0]);
        assert!(!rep.is_feasible());
    }

    #[test]
    fn spec_json_round_trip() {
        let specs = vec![
            ConstraintSpec::Halfspace {
                normal: vec![1.0, 0.0],
                offset: -1.0,
            },
            ConstraintSpec::BallObstacle {
                center: vec![0.5, 0.5],
                radius: 0.25,
                coords: Some(vec![0, 1]),
            },
        ];
        let text = serde_json::to_string(&specs).unwrap();
        assert!(text.contains("\"kind\":\"halfspace\""));
        assert!(text.contains("\"kind\":\"ball-obstacle\""));
        let back: Vec<ConstraintSpec> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, specs);
    }

    /// Central finite-difference check of the supplied gradients, one batch
    /// of random probes per component kind.
    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let grid = Arc::new(BurgersGrid::new(4, 6, 0.0, 0.02, 1.0 / 3.0, 0.2).unwrap());
        let kinds: Vec<Component> = vec![
            Component::Affine {
                coeffs: vec![(0, 1.5), (2, -0.5)],
                rhs: 0.3,
            },
            Component::BallOutside {
                coords: vec![0, 1],
                center: vec![0.2, -0.1],
                radius: 0.7,
            },
            Component::BurgersInterval {
                grid: grid.clone(),
                k: 1,
                j: 2,
                upper: false,
            },
            Component::BurgersInterval {
                grid,
                k: 2,
                j: 3,
                upper: true,
            },
        ];
        for comp in &kinds {
            let dim = match comp {
                Component::BurgersInterval { grid, .. } => grid.dim(),
                _ => 3,
            };
            for _ in 0..100 {
                let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
                let g = comp.grad(&x);
                let h = 1e-5;
                for i in 0..dim {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[i] += h;
                    xm[i] -= h;
                    let fd = (comp.value(&xp) - comp.value(&xm)) / (2.0 * h);
                    let denom = fd.abs().max(1.0);
                    assert!(
                        ((g[i] - fd) / denom).abs() < 1e-4,
                        "grad mismatch at index {i}: {} vs {}",
                        g[i],
                        fd
                    );
                }
            }
        }
    }

    proptest! {
        /// Equality pairs report |g(x)| as the residual.
        #[test]
        fn equality_pair_abs_residual(
            n0 in -3.0f64..3.0,
            n1 in -3.0f64..3.0,
            off in -2.0f64..2.0,
            x0 in -5.0f64..5.0,
            x1 in -5.0f64..5.0,
        ) {
            prop_assume!(n0.abs() + n1.abs() > 1e-6);
            let cs = ConstraintSet::from_specs(
                2,
                &[ConstraintSpec::AffineEquality { normal: vec![n0, n1], offset: off }],
            ).unwrap();
            let g = n0 * x0 + n1 * x1 - off;
            let rep = cs.residual(&[x0, x1]);
            prop_assert!((rep.residual - g.abs()).abs() < 1e-12);
        }
    }
}
