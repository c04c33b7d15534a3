//! Hard-constrained sampling for flow-matching models.
//!
//! A flow-matching model transports a prior distribution to a target
//! distribution by integrating `dx/dt = v_t(x)` over `t in [0, 1]`. This
//! crate steers that integration so the terminal sample satisfies hard
//! constraints `h(x) <= 0` exactly, by solving a small constrained
//! subproblem at each sampling step (the `hardflow` method). The usual
//! projection-style baselines, a full-horizon trajectory-optimization
//! oracle, and the measurements backing the method's approximation-error
//! guarantees live here as well.
//!
//! Modules
//! - [`scheduler`]: affine conditional-path schedulers and the
//!   posterior-mean / posterior-noise operators.
//! - [`velocity`]: velocity fields — an exact analytic Gaussian field and a
//!   small feedforward network trained by conditional flow matching.
//! - [`constraints`]: constraint sets `h(x) <= 0` and cost functions.
//! - [`solver`]: per-step subproblem solvers (closed form, projected
//!   gradient, augmented Lagrangian).
//! - [`sampler`]: the nominal Euler sampler, the hardflow sampler, and the
//!   baseline family.
//! - [`verify`]: full-horizon oracle, fixed-point inversion, bound checks,
//!   consistency-error measurement, and the energy-distance metric.
//! - [`task`] / [`bench`]: built-in benchmark tasks, batch running, and
//!   report emission backing the CLI.

pub mod bench;
pub mod constraints;
pub mod error;
pub(crate) mod linalg;
pub mod sampler;
pub mod scheduler;
pub mod schema;
pub mod solver;
pub mod task;
pub mod velocity;
pub mod verify;

pub use error::{ConstraintError, FieldError, SampleError, SchedulerError, SolverError};
pub use scheduler::{Scheduler, TimeGrid};
pub use velocity::VelocityField;
