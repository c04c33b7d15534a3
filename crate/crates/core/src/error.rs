//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SchedulerError {
    /// |Lambda(t)| fell below the degeneracy threshold.
    #[error("degenerate scheduler at t={t}: |Lambda| = {value:.3e} < {threshold:.1e}")]
    DegenerateLambda { t: f64, value: f64, threshold: f64 },
    #[error("scheduler `{name}` violates boundary conditions: {detail}")]
    Boundary { name: String, detail: String },
    #[error(
        "scheduler `{name}`: analytic derivative disagrees with finite differences at t={t} \
         (analytic {analytic:.6e}, numeric {numeric:.6e})"
    )]
    DerivativeMismatch {
        name: String,
        t: f64,
        analytic: f64,
        numeric: f64,
    },
    #[error("unknown scheduler `{0}`")]
    UnknownName(String),
    #[error("invalid time grid: {0}")]
    Grid(String),
}

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("velocity field does not expose input vector-Jacobian products")]
    VjpUnsupported,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dim { expected: usize, got: usize },
    #[error("non-finite training loss at step {step} (loss={loss}, lr={lr})")]
    NonFiniteLoss { step: usize, loss: f64, lr: f64 },
    #[error("invalid training config: {0}")]
    Config(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Error)]
pub enum ConstraintError {
    #[error("dimension mismatch: {0}")]
    Dim(String),
    #[error("grid too small: {0}")]
    GridTooSmall(String),
    #[error("invalid constraint parameters: {0}")]
    Param(String),
    #[error("constraint component {index} evaluated to a non-finite value at the probe point")]
    NonFinite { index: usize },
}

#[derive(Debug, Error)]
pub enum SolverError {
    /// The requested method does not apply to the instance's cost/constraint
    /// structure.
    #[error("solver structure mismatch: {0}")]
    StructureMismatch(String),
    #[error("no exact projection available for this constraint set: {0}")]
    UnsupportedProjection(String),
    #[error("non-finite iterate at inner step {step}")]
    NonFinite { step: usize },
    #[error("invalid solver config: {0}")]
    Config(String),
    #[error(transparent)]
    Constraint(#[from] ConstraintError),
}

#[derive(Debug, Error)]
pub enum SampleError {
    #[error("non-finite state at step {step}")]
    NonFiniteState { step: usize },
    /// The final-step subproblem did not converge; the sample would be
    /// infeasible by definition, so it is rejected outright.
    #[error(
        "final-step solver did not converge (feasibility residual {residual:.3e} after \
         {iterations} iterations)"
    )]
    FinalSolveFailed { residual: f64, iterations: usize },
    #[error("sampler config: {0}")]
    Config(String),
    #[error(transparent)]
    Scheduler(#[from] SchedulerError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("problem too large for the full-horizon oracle: d*N = {got} > {max}")]
    TooLarge { got: usize, max: usize },
    #[error("fixed-point iteration diverged: contraction estimate {ratio:.3} >= 1")]
    Diverged { ratio: f64 },
    #[error("unknown verification suite `{0}`")]
    UnknownSuite(String),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Scheduler(#[from] SchedulerError),
    #[error(transparent)]
    Field(#[from] FieldError),
}
