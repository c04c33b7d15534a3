//! Per-step constrained subproblem solvers.
//!
//! Every sampler step reduces to an instance of
//!
//! ```text
//! min_x  C(x) + (w/2) ||x - anchor||^2    s.t.  h(x) <= 0
//! ```
//!
//! Three methods are provided. The closed form handles zero or
//! quadratic-to-target costs with a single halfspace or box. Projected
//! gradient handles constraint sets with an exact Euclidean projection.
//! The augmented Lagrangian is the general method:
//!
//! ```text
//! L(x, lambda, rho) = C(x) + (w/2)||x - anchor||^2
//!                     + sum_i [ lambda_i max(0, h_i(x)) + (rho/2) max(0, h_i(x))^2 ]
//! ```
//!
//! with inner gradient descent and the multiplier update
//! `lambda_i <- max(0, lambda_i + rho h_i(x))` every few inner steps.

use serde::{Deserialize, Serialize};

use crate::constraints::{ConstraintSet, CostFn};
use crate::error::SolverError;
use crate::linalg;

const MULTIPLIER_CAP: f64 = 1e12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    ClosedForm,
    ProjectedGradient,
    AugmentedLagrangian,
}

impl std::str::FromStr for SolveMethod {
    type Err = SolverError;
    fn from_str(s: &str) -> Result<Self, SolverError> {
        match s {
            "closed-form" => Ok(SolveMethod::ClosedForm),
            "projected-gradient" => Ok(SolveMethod::ProjectedGradient),
            "augmented-lagrangian" => Ok(SolveMethod::AugmentedLagrangian),
            other => Err(SolverError::Config(format!("unknown solver method `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "rule")]
pub enum StepRule {
    /// Armijo backtracking from an adaptive initial step.
    Backtracking { init: f64 },
    /// Fixed step size (no line search).
    Fixed { step: f64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolverConfig {
    pub method: SolveMethod,
    /// Maximum multiplier-update rounds.
    pub max_outer: usize,
    /// Inner gradient steps per round.
    pub max_inner: usize,
    /// Multipliers update every this many inner steps.
    pub multiplier_period: usize,
    pub initial_penalty: f64,
    pub penalty_growth: f64,
    pub max_penalty: f64,
    pub feas_tol: f64,
    pub stat_tol: f64,
    pub step_rule: StepRule,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            method: SolveMethod::AugmentedLagrangian,
            max_outer: 400,
            max_inner: 8,
            multiplier_period: 8,
            initial_penalty: 10.0,
            penalty_growth: 10.0,
            max_penalty: 1e12,
            feas_tol: 1e-8,
            stat_tol: 1e-4,
            step_rule: StepRule::Backtracking { init: 1.0 },
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.feas_tol > 0.0 && self.stat_tol > 0.0) {
            return Err(SolverError::Config("tolerances must be positive".into()));
        }
        if self.penalty_growth <= 1.0 {
            return Err(SolverError::Config("penalty growth factor must exceed 1".into()));
        }
        if self.multiplier_period == 0 || self.max_inner == 0 {
            return Err(SolverError::Config("inner iteration counts must be positive".into()));
        }
        Ok(())
    }
}

/// One per-step subproblem.
#[derive(Clone, Debug)]
pub struct SubproblemInstance<'a> {
    pub anchor: &'a [f64],
    /// The quadratic weight `w > 0`.
    pub weight: f64,
    pub cost: &'a CostFn,
    pub constraints: &'a ConstraintSet,
    pub warm_start: Option<&'a [f64]>,
}

impl SubproblemInstance<'_> {
    fn validate(&self) -> Result<(), SolverError> {
        if !(self.weight > 0.0) {
            return Err(SolverError::Config(format!(
                "subproblem weight must be positive, got {}",
                self.weight
            )));
        }
        if !linalg::all_finite(self.anchor) {
            return Err(SolverError::Config("anchor must be finite".into()));
        }
        Ok(())
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        let mut q = 0.0;
        for (xi, ai) in x.iter().zip(self.anchor) {
            q += (xi - ai) * (xi - ai);
        }
        self.cost.value(x) + 0.5 * self.weight * q
    }

    fn start_point(&self) -> Vec<f64> {
        match self.warm_start {
            Some(w) if w.len() == self.anchor.len() => w.to_vec(),
            _ => self.anchor.to_vec(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolverResult {
    pub x: Vec<f64>,
    /// `C(x) + (w/2)||x - anchor||^2` at the returned point.
    pub objective: f64,
    /// `max_i h_i(x)` at the returned point.
    pub feasibility: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `||grad C + w (x - anchor) + sum_i mu_i grad h_i||` when available.
    pub kkt_stationarity: Option<f64>,
    /// Inequality multiplier estimates, aligned with the component order.
    pub multipliers: Option<Vec<f64>>,
}

/// Anything the augmented-Lagrangian core can minimize.
pub(crate) trait SmoothObjective {
    fn value(&self, x: &[f64]) -> f64;
    fn add_grad(&self, x: &[f64], out: &mut [f64]);
}

pub(crate) struct QuadAnchor<'a> {
    pub cost: &'a CostFn,
    pub anchor: &'a [f64],
    pub weight: f64,
}

impl SmoothObjective for QuadAnchor<'_> {
    fn value(&self, x: &[f64]) -> f64 {
        let mut q = 0.0;
        for (xi, ai) in x.iter().zip(self.anchor) {
            q += (xi - ai) * (xi - ai);
        }
        self.cost.value(x) + 0.5 * self.weight * q
    }
    fn add_grad(&self, x: &[f64], out: &mut [f64]) {
        self.cost.add_scaled_grad(x, 1.0, out);
        for i in 0..x.len() {
            out[i] += self.weight * (x[i] - self.anchor[i]);
        }
    }
}

/// Persistent augmented-Lagrangian state (multipliers survive across calls,
/// which the relaxed-projection baseline relies on).
#[derive(Clone, Debug)]
pub(crate) struct AlCursor {
    pub lambda: Vec<f64>,
    pub rho: f64,
    pub step: f64,
}

impl AlCursor {
    pub fn new(num_components: usize, cfg: &SolverConfig) -> Self {
        AlCursor {
            lambda: vec![0.0; num_components],
            rho: cfg.initial_penalty,
            step: match cfg.step_rule {
                StepRule::Backtracking { init } => init,
                StepRule::Fixed { step } => step,
            },
        }
    }
}

// Inner penalty: the C1 inequality augmented Lagrangian
// (Powell-Hestenes-Rockafellar), whose multiplier term is linear in the
// constraint wherever the shifted value lambda + rho h is positive. The
// one-sided form lambda * max(0, h) leaves overshooting multipliers stuck at
// the constraint kink; this form sheds them, and the multiplier update
// max(0, lambda + rho h) is unchanged.
fn al_value(
    obj: &dyn SmoothObjective,
    cons: &ConstraintSet,
    lambda: &[f64],
    rho: f64,
    x: &[f64],
    hbuf: &mut Vec<f64>,
) -> f64 {
    let mut v = obj.value(x);
    cons.values_into(x, hbuf);
    for (hi, li) in hbuf.iter().zip(lambda) {
        let s = li + rho * hi;
        if s > 0.0 {
            v += (s * s - li * li) / (2.0 * rho);
        } else {
            v -= li * li / (2.0 * rho);
        }
    }
    v
}

fn al_grad(
    obj: &dyn SmoothObjective,
    cons: &ConstraintSet,
    lambda: &[f64],
    rho: f64,
    x: &[f64],
    hbuf: &mut Vec<f64>,
    out: &mut [f64],
) {
    out.fill(0.0);
    obj.add_grad(x, out);
    cons.values_into(x, hbuf);
    for (i, (hi, li)) in hbuf.iter().zip(lambda).enumerate() {
        let s = li + rho * hi;
        if s > 0.0 {
            cons.components()[i].add_scaled_grad(x, s, out);
        }
    }
}

fn update_multipliers(lambda: &mut [f64], rho: f64, h: &[f64]) {
    for (li, hi) in lambda.iter_mut().zip(h) {
        *li = (*li + rho * hi).clamp(0.0, MULTIPLIER_CAP);
    }
}

/// Runs up to `steps` backtracking gradient steps on the augmented
/// Lagrangian, updating the multipliers every `period` steps. Returns the
/// number of accepted steps; `Ok(false)` means the line search stalled.
pub(crate) fn al_run_steps(
    obj: &dyn SmoothObjective,
    cons: &ConstraintSet,
    x: &mut [f64],
    cursor: &mut AlCursor,
    steps: usize,
    period: usize,
    step_rule: StepRule,
    iterations: &mut usize,
) -> Result<bool, SolverError> {
    let d = x.len();
    let mut hbuf = Vec::with_capacity(cons.len());
    let mut grad = vec![0.0; d];
    let mut cand = vec![0.0; d];
    let mut made_progress = false;

    for k in 0..steps {
        al_grad(obj, cons, &cursor.lambda, cursor.rho, x, &mut hbuf, &mut grad);
        let gnorm2 = linalg::dot(&grad, &grad);
        if !gnorm2.is_finite() {
            return Err(SolverError::NonFinite { step: *iterations });
        }
        if gnorm2 > 0.0 {
            match step_rule {
                StepRule::Fixed { step } => {
                    for i in 0..d {
                        x[i] -= step * grad[i];
                    }
                    *iterations += 1;
                    made_progress = true;
                }
                StepRule::Backtracking { init } => {
                    let l0 = al_value(obj, cons, &cursor.lambda, cursor.rho, x, &mut hbuf);
                    if !l0.is_finite() {
                        return Err(SolverError::NonFinite { step: *iterations });
                    }
                    let mut s = cursor.step;
                    let mut accepted = false;
                    while s > 1e-18 {
                        for i in 0..d {
                            cand[i] = x[i] - s * grad[i];
                        }
                        let l1 = al_value(obj, cons, &cursor.lambda, cursor.rho, &cand, &mut hbuf);
                        if l1.is_finite() && l1 <= l0 - 1e-4 * s * gnorm2 {
                            x.copy_from_slice(&cand);
                            cursor.step = (s * 2.0).min(init * 1e3);
                            accepted = true;
                            break;
                        }
                        s *= 0.5;
                    }
                    *iterations += 1;
                    if accepted {
                        made_progress = true;
                    } else {
                        cursor.step = init;
                        // Multiplier refresh below may unstick the kink.
                    }
                }
            }
        }
        if (k + 1) % period == 0 || k + 1 == steps {
            cons.values_into(x, &mut hbuf);
            update_multipliers(&mut cursor.lambda, cursor.rho, &hbuf);
        }
    }
    Ok(made_progress)
}

/// KKT stationarity using the post-update multiplier state as the estimate
/// (at an augmented-Lagrangian fixed point `lambda` converges to the true
/// multipliers).
pub(crate) fn kkt_residual(
    obj: &dyn SmoothObjective,
    cons: &ConstraintSet,
    lambda: &[f64],
    x: &[f64],
) -> (f64, Vec<f64>) {
    let mut grad = vec![0.0; x.len()];
    obj.add_grad(x, &mut grad);
    for (i, li) in lambda.iter().enumerate() {
        if *li != 0.0 {
            cons.components()[i].add_scaled_grad(x, *li, &mut grad);
        }
    }
    (linalg::norm(&grad), lambda.to_vec())
}

pub(crate) struct AlOutcome {
    pub x: Vec<f64>,
    pub feasibility: f64,
    pub stationarity: f64,
    pub multipliers: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// The general augmented-Lagrangian loop over a smooth objective. On budget
/// exhaustion the best iterate in lexicographic (feasibility, objective)
/// order is returned with `converged = false`.
pub(crate) fn minimize_al(
    obj: &dyn SmoothObjective,
    cons: &ConstraintSet,
    x0: &[f64],
    cfg: &SolverConfig,
) -> Result<AlOutcome, SolverError> {
    cfg.validate()?;
    let mut x = x0.to_vec();
    let mut cursor = AlCursor::new(cons.len(), cfg);
    let mut iterations = 0usize;

    let mut best_x = x.clone();
    let mut best_feas = cons.max_component(&x);
    let mut best_obj = obj.value(&x);
    let mut best_stat = f64::INFINITY;
    let mut best_mus = cursor.lambda.clone();
    let mut prev_violation = f64::INFINITY;
    let mut stalls = 0usize;

    for _outer in 0..cfg.max_outer {
        let progressed = al_run_steps(
            obj,
            cons,
            &mut x,
            &mut cursor,
            cfg.max_inner,
            cfg.multiplier_period,
            cfg.step_rule,
            &mut iterations,
        )?;
        let feas = cons.max_component(&x);
        let (stat, mus) = kkt_residual(obj, cons, &cursor.lambda, &x);
        let objv = obj.value(&x);

        let better = if feas.max(0.0) < best_feas.max(0.0) - 1e-15 {
            true
        } else {
            feas.max(0.0) <= best_feas.max(0.0) + 1e-15 && objv < best_obj
        };
        if better {
            best_x.copy_from_slice(&x);
            best_feas = feas;
            best_obj = objv;
            best_stat = stat;
            best_mus = mus;
        }

        if feas <= cfg.feas_tol && stat <= cfg.stat_tol {
            return Ok(AlOutcome {
                x,
                feasibility: feas,
                stationarity: stat,
                multipliers: best_mus,
                iterations,
                converged: true,
            });
        }

        let violation = feas.max(0.0);
        if violation > 0.25 * prev_violation.max(cfg.feas_tol) {
            cursor.rho = (cursor.rho * cfg.penalty_growth).min(cfg.max_penalty);
        }
        prev_violation = violation;

        if progressed {
            stalls = 0;
        } else {
            stalls += 1;
            if stalls >= 4 && cursor.rho >= cfg.max_penalty {
                break;
            }
        }
    }

    Ok(AlOutcome {
        x: best_x,
        feasibility: best_feas,
        stationarity: best_stat,
        multipliers: best_mus,
        iterations,
        converged: false,
    })
}

/// Augmented-Lagrangian solve of a subproblem instance.
pub fn solve_aug_lagrangian(
    inst: &SubproblemInstance,
    cfg: &SolverConfig,
) -> Result<SolverResult, SolverError> {
    inst.validate()?;
    let obj = QuadAnchor {
        cost: inst.cost,
        anchor: inst.anchor,
        weight: inst.weight,
    };
    let x0 = inst.start_point();
    let out = minimize_al(&obj, inst.constraints, &x0, cfg)?;
    Ok(SolverResult {
        objective: inst.objective(&out.x),
        feasibility: out.feasibility,
        iterations: out.iterations,
        converged: out.converged,
        kkt_stationarity: Some(out.stationarity),
        multipliers: Some(out.multipliers),
        x: out.x,
    })
}

/// Exact minimizer for instances with zero or quadratic-to-target cost and
/// a single halfspace, a box, or no constraints at all.
pub fn solve_closed_form(inst: &SubproblemInstance) -> Result<SolverResult, SolverError> {
    inst.validate()?;
    let d = inst.anchor.len();

    // Combined diagonal quadratic: f(x) = sum_k (d_k/2)(x_k - u_k)^2 + const.
    let mut diag = vec![inst.weight; d];
    let mut center: Vec<f64> = inst.anchor.to_vec();
    match inst.cost {
        CostFn::Zero => {}
        CostFn::QuadraticToTarget {
            target,
            coords,
            scale,
        } => {
            let idx: Vec<usize> = match coords {
                Some(c) => c.clone(),
                None => (0..d).collect(),
            };
            if idx.len() != target.len() {
                return Err(SolverError::StructureMismatch(
                    "quadratic cost target/coords length mismatch".into(),
                ));
            }
            for (&i, g) in idx.iter().zip(target) {
                let q = 2.0 * scale;
                center[i] = (inst.weight * inst.anchor[i] + q * g) / (inst.weight + q);
                diag[i] = inst.weight + q;
            }
        }
        _ => {
            return Err(SolverError::StructureMismatch(
                "closed form requires zero or quadratic-to-target cost".into(),
            ))
        }
    }

    let finish = |x: Vec<f64>, stationarity: f64, mus: Option<Vec<f64>>| {
        let feasibility = inst.constraints.max_component(&x);
        SolverResult {
            objective: inst.objective(&x),
            feasibility,
            iterations: 1,
            converged: true,
            kkt_stationarity: Some(stationarity),
            multipliers: mus,
            x,
        }
    };

    if inst.constraints.is_empty() {
        return Ok(finish(center, 0.0, Some(Vec::new())));
    }

    if let Some((a, b)) = inst.constraints.as_single_halfspace() {
        let slack = linalg::dot(&a, &center) - b;
        if slack <= 0.0 {
            return Ok(finish(center, 0.0, Some(vec![0.0])));
        }
        let denom: f64 = a.iter().zip(&diag).map(|(ak, dk)| ak * ak / dk).sum();
        if denom <= 0.0 {
            return Err(SolverError::StructureMismatch(
                "degenerate halfspace normal".into(),
            ));
        }
        let nu = slack / denom;
        let x: Vec<f64> = center
            .iter()
            .zip(&a)
            .zip(&diag)
            .map(|((u, ak), dk)| u - nu * ak / dk)
            .collect();
        return Ok(finish(x, 0.0, Some(vec![nu])));
    }

    if let Some((lo, hi)) = inst.constraints.as_box() {
        let x: Vec<f64> = center
            .iter()
            .zip(&lo)
            .zip(&hi)
            .map(|((u, l), h)| u.clamp(*l, *h))
            .collect();
        // Per-component multipliers: the residual d_k (x_k - u_k) is carried
        // by whichever bound the coordinate is clamped to.
        let mut mus = vec![0.0; inst.constraints.len()];
        for (ci, comp) in inst.constraints.components().iter().enumerate() {
            if let crate::constraints::Component::Affine { coeffs, rhs } = comp {
                let (i, c) = coeffs[0];
                let active = (c * x[i] - rhs).abs() <= 1e-12;
                if active {
                    let resid = diag[i] * (center[i] - x[i]); // = mu * c
                    let mu = resid / c;
                    if mu > 0.0 && mus[ci] == 0.0 {
                        mus[ci] = mu;
                    }
                }
            }
        }
        return Ok(finish(x, 0.0, Some(mus)));
    }

    Err(SolverError::StructureMismatch(
        "closed form requires a single halfspace or a box".into(),
    ))
}

enum Projector {
    Identity,
    Halfspace { a: Vec<f64>, b: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    BallOutside {
        coords: Vec<usize>,
        center: Vec<f64>,
        radius: f64,
    },
}

impl Projector {
    fn from_set(cons: &ConstraintSet) -> Result<Self, SolverError> {
        if cons.is_empty() {
            return Ok(Projector::Identity);
        }
        if let Some((a, b)) = cons.as_single_halfspace() {
            return Ok(Projector::Halfspace { a, b });
        }
        if let Some((lo, hi)) = cons.as_box() {
            return Ok(Projector::Box { lo, hi });
        }
        if let Some((coords, center, radius)) = cons.as_single_ball() {
            return Ok(Projector::BallOutside {
                coords,
                center,
                radius,
            });
        }
        Err(SolverError::UnsupportedProjection(
            "projected gradient needs a halfspace, a box, or a single keep-out ball".into(),
        ))
    }

    fn project(&self, x: &mut [f64]) {
        match self {
            Projector::Identity => {}
            Projector::Halfspace { a, b } => {
                let slack = linalg::dot(a, x) - b;
                if slack > 0.0 {
                    let n2 = linalg::dot(a, a);
                    linalg::axpy(-slack / n2, a, x);
                }
            }
            Projector::Box { lo, hi } => {
                for ((xi, l), h) in x.iter_mut().zip(lo).zip(hi) {
                    *xi = xi.clamp(*l, *h);
                }
            }
            Projector::BallOutside {
                coords,
                center,
                radius,
            } => {
                let mut diff: Vec<f64> = coords
                    .iter()
                    .zip(center)
                    .map(|(&i, c)| x[i] - c)
                    .collect();
                let mut nrm = linalg::norm(&diff);
                if nrm >= *radius {
                    return;
                }
                if nrm < 1e-9 {
                    diff[0] += 1e-9;
                    nrm = linalg::norm(&diff);
                }
                // Nearest boundary point: push radially onto the sphere.
                for (k, &i) in coords.iter().enumerate() {
                    x[i] = center[k] + diff[k] * radius / nrm;
                }
            }
        }
    }
}

/// Projected gradient descent: exact feasibility at every iterate and
/// monotone objective across accepted steps.
pub fn solve_projected_gradient(
    inst: &SubproblemInstance,
    cfg: &SolverConfig,
) -> Result<SolverResult, SolverError> {
    inst.validate()?;
    cfg.validate()?;
    let proj = Projector::from_set(inst.constraints)?;
    let d = inst.anchor.len();
    let obj = QuadAnchor {
        cost: inst.cost,
        anchor: inst.anchor,
        weight: inst.weight,
    };

    let mut x = inst.start_point();
    proj.project(&mut x);
    let mut fx = obj.value(&x);
    let mut step = match cfg.step_rule {
        StepRule::Backtracking { init } => init,
        StepRule::Fixed { step } => step,
    };
    let mut grad = vec![0.0; d];
    let mut cand = vec![0.0; d];
    let mut iterations = 0usize;
    let mut converged = false;

    let budget = cfg.max_outer * cfg.max_inner;
    while iterations < budget {
        grad.fill(0.0);
        obj.add_grad(&x, &mut grad);
        if !linalg::all_finite(&grad) {
            return Err(SolverError::NonFinite { step: iterations });
        }
        // Prox-style stationarity: distance moved by one projected step of a
        // fixed gauge.
        let gauge = 1.0 / (1.0 + inst.weight);
        cand.copy_from_slice(&x);
        linalg::axpy(-gauge, &grad, &mut cand);
        proj.project(&mut cand);
        let residual = linalg::dist(&x, &cand) / gauge;
        if residual <= cfg.stat_tol {
            converged = true;
            break;
        }

        let mut s = step;
        let mut accepted = false;
        while s > 1e-18 {
            cand.copy_from_slice(&x);
            linalg::axpy(-s, &grad, &mut cand);
            proj.project(&mut cand);
            let fc = obj.value(&cand);
            let moved2 = {
                let mut m = 0.0;
                for i in 0..d {
                    let dlt = cand[i] - x[i];
                    m += dlt * dlt;
                }
                m
            };
            if moved2 == 0.0 {
                break;
            }
            if fc.is_finite() && fc <= fx - 1e-4 / s * moved2 {
                x.copy_from_slice(&cand);
                fx = fc;
                step = (s * 2.0).min(1e6);
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        iterations += 1;
        if !accepted {
            // No descent direction within the set; the iterate is feasible
            // and locally optimal for this nonconvex projection geometry.
            converged = true;
            break;
        }
    }

    let feasibility = inst.constraints.max_component(&x);
    Ok(SolverResult {
        objective: inst.objective(&x),
        feasibility,
        iterations,
        converged,
        kkt_stationarity: None,
        multipliers: None,
        x,
    })
}

/// Dispatch on the configured method.
pub fn solve(inst: &SubproblemInstance, cfg: &SolverConfig) -> Result<SolverResult, SolverError> {
    match cfg.method {
        SolveMethod::ClosedForm => solve_closed_form(inst),
        SolveMethod::ProjectedGradient => solve_projected_gradient(inst, cfg),
        SolveMethod::AugmentedLagrangian => solve_aug_lagrangian(inst, cfg),
    }
}

/// Euclidean projection of `point` onto `{h <= 0}`: the zero-cost instance.
/// Exact closed forms and exact projections are used where the structure
/// admits them; otherwise the augmented Lagrangian takes over.
pub fn project(
    cons: &ConstraintSet,
    point: &[f64],
    cfg: &SolverConfig,
) -> Result<SolverResult, SolverError> {
    let zero = CostFn::Zero;
    let inst = SubproblemInstance {
        anchor: point,
        weight: 1.0,
        cost: &zero,
        constraints: cons,
        warm_start: None,
    };
    if cons.is_empty() || cons.as_single_halfspace().is_some() || cons.as_box().is_some() {
        return solve_closed_form(&inst);
    }
    if cons.as_single_ball().is_some() {
        return solve_projected_gradient(&inst, cfg);
    }
    solve_aug_lagrangian(&inst, cfg)
}
