//! Per-iteration trace types.

use nalgebra::DVector;

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SolverStatus {
    /// The noisy feasibility and optimality measures stayed below their
    /// tolerances for three consecutive iterations.
    Converged,
    /// The trust-region radius fell below the collapse floor.
    TrCollapse,
    /// Iteration cap reached.
    MaxIter,
    /// The penalty parameter exceeded its safety cap.
    PenaltyOverflow,
    /// A noisy evaluation returned a non-finite value.
    EvaluationFault,
}

impl SolverStatus {
    /// Statuses that terminate a run abnormally.
    pub fn is_abort(&self) -> bool {
        matches!(self, SolverStatus::PenaltyOverflow | SolverStatus::EvaluationFault)
    }
}

impl std::fmt::Display for SolverStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SolverStatus::Converged => "Converged",
            SolverStatus::TrCollapse => "TrCollapse",
            SolverStatus::MaxIter => "MaxIter",
            SolverStatus::PenaltyOverflow => "PenaltyOverflow",
            SolverStatus::EvaluationFault => "EvaluationFault",
        };
        f.write_str(s)
    }
}

/// One row of the solver trace.
///
/// The four `*_true` columns are diagnostics computed from the exact problem
/// at logged iterates; the solver never sees them and leaves them as NaN for
/// the harness to fill in afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    /// Noisy objective value at the incumbent.
    pub f_noisy: f64,
    pub f_true: f64,
    /// `||c(x_k)||` from the exact problem.
    pub feas_true: f64,
    /// `||A(x_k)' lambda_k - g(x_k)||` from the exact problem.
    pub opt_true: f64,
    /// `||A(x_k)' c(x_k)||` from the exact problem.
    pub feas_stat_true: f64,
    /// `||x_{k+1} - x_k||`; zero on rejected steps.
    pub step_norm: f64,
    /// Radius used this iteration.
    pub delta: f64,
    /// Penalty parameter after the update loop.
    pub nu: f64,
    /// Acceptance ratio; `-inf` marks a rejected step whose test never ran.
    pub rho: f64,
    pub accepted: bool,
    pub vpred: f64,
    pub hpred: f64,
    pub pred: f64,
    /// NaN on iterations rejected before the merit difference was sampled.
    pub ared: f64,
    pub cauchy_margin_normal: f64,
    pub cauchy_margin_tangential: f64,
}

/// The composite step of one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDecomposition {
    /// Normal component, in the Jacobian row space.
    pub v: DVector<f64>,
    /// Tangential component, in the Jacobian null space.
    pub h: DVector<f64>,
    /// Full trial step `v + h`.
    pub p: DVector<f64>,
    pub vpred: f64,
    pub hpred: f64,
    pub pred: f64,
    pub ared: f64,
    pub rho: f64,
    pub accepted: bool,
}

/// Everything the harness and the test suites need per iteration beyond the
/// serialized record.
#[derive(Debug, Clone)]
pub struct StepDetail {
    pub decomposition: StepDecomposition,
    /// Iterate at the start of the iteration.
    pub x: DVector<f64>,
    /// Least-squares multipliers of this iteration.
    pub lambda: DVector<f64>,
    /// Noisy gradient the iteration worked from.
    pub g_noisy: DVector<f64>,
    /// Noisy Lagrangian Hessian the iteration worked from.
    pub w_noisy: nalgebra::DMatrix<f64>,
    /// Radius handed to the tangential solve, `sqrt(delta^2 - ||v||^2)`.
    pub tangential_budget: f64,
    /// The penalty loop could not make the predicted reduction sufficiently
    /// positive (zero feasibility reduction); step rejected without a ratio
    /// test.
    pub penalty_stall: bool,
    /// Noisy feasibility stationarity `||A'c||` at the incumbent.
    pub noisy_feas_stat: f64,
    /// Noisy reduced gradient `||Z'g||` at the incumbent.
    pub noisy_reduced_grad: f64,
}

/// Full solver trace: serialized rows plus the per-iteration detail.
#[derive(Debug, Clone, Default)]
pub struct Trace {
    pub records: Vec<IterationRecord>,
    pub details: Vec<StepDetail>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub(crate) fn push(&mut self, record: IterationRecord, detail: StepDetail) {
        self.records.push(record);
        self.details.push(detail);
    }
}

/// Outcome of a full solver run.
#[derive(Debug, Clone)]
pub struct SolverRun {
    pub status: SolverStatus,
    pub trace: Trace,
    pub final_x: DVector<f64>,
    pub final_lambda: DVector<f64>,
    pub final_delta: f64,
    pub final_nu: f64,
    pub iterations: usize,
}
