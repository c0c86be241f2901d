//! Noise-tolerant trust-region SQP for equality-constrained optimization.
//!
//! The solver follows the composite-step (Byrd-Omojokun) scheme: each
//! iteration splits the trial step into a normal component that reduces
//! linearized infeasibility inside a shrunken ball and a tangential
//! component that reduces a quadratic Lagrangian model in the constraint
//! null space. Progress is measured with the nonsmooth merit function
//! `f(x) + nu ||c(x)||`.
//!
//! What sets this crate apart is tolerance to bounded evaluation noise:
//! when the function and constraint values carry errors of known magnitude,
//! the step acceptance ratio is relaxed by a term proportional to the noise
//! level, which prevents the trust region from collapsing on rejected steps
//! that merely look bad through the noise. The classic (unrelaxed) test is
//! available for comparison, and a benchmark harness reproduces the
//! contrast on seeded experiments.
//!
//! Entry points:
//!
//! * [`problem::builtin_problem`] - registry of test problems.
//! * [`noise::NoisyOracle`] - seeded bounded-noise wrapper.
//! * [`solver::run_solver`] - the iteration loop.
//! * [`harness`] - seeded experiments, trace serialization, scenarios.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod error;
pub mod fd;
pub mod harness;
pub mod noise;
pub mod problem;
pub mod rng;
pub mod solver;
pub mod subproblems;

pub use error::{Error, Result};
pub use noise::{NoiseDistribution, NoiseSpec, NoisyOracle, Oracle};
pub use problem::{builtin_problem, known_objective, quad_lin, quad_lin_kkt, NlpProblem};
pub use solver::{run_solver, solve_noiseless, Mode, SolverConfig, SolverRun, SolverStatus};
