//! Dense kernels behind the composite step: null-space bases, least-squares
//! multipliers, and the two trust-region subproblem solvers.

mod multipliers;
mod normal;
mod nullspace;
mod tangential;

pub use multipliers::least_squares_multipliers;
pub use normal::solve_normal_tr;
pub use nullspace::{null_space_basis, NullSpaceBasis};
pub use tangential::solve_tangential_tr;

use nalgebra::DVector;

/// How a trust-region subproblem solve ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrStatus {
    /// Converged strictly inside the region.
    Interior,
    /// Step lies on the trust-region boundary.
    Boundary,
    /// A negative-curvature direction was followed to the boundary.
    NegativeCurvature,
    /// Iteration limit reached; best iterate returned.
    MaxIter,
}

/// Solution of one trust-region subproblem together with its certified
/// fraction-of-Cauchy-decrease margin.
///
/// `cauchy_rhs` is the model-reduction lower bound the solve must meet and
/// `cauchy_margin = predicted_reduction - cauchy_rhs`; up to roundoff the
/// margin is non-negative by construction.
#[derive(Debug, Clone)]
pub struct TrSolution {
    pub step: DVector<f64>,
    pub predicted_reduction: f64,
    pub on_boundary: bool,
    pub iterations: usize,
    pub status: TrStatus,
    pub cauchy_rhs: f64,
    pub cauchy_margin: f64,
}

impl TrSolution {
    fn zero(n: usize, status: TrStatus) -> Self {
        TrSolution {
            step: DVector::zeros(n),
            predicted_reduction: 0.0,
            on_boundary: false,
            iterations: 0,
            status,
            cauchy_rhs: 0.0,
            cauchy_margin: 0.0,
        }
    }
}

/// Clamp roundoff-scale negatives in a model reduction that is non-negative
/// in exact arithmetic. Anything materially negative is a bug and trips the
/// debug assertion.
fn clamp_reduction(value: f64, scale: f64) -> f64 {
    debug_assert!(
        value > -1e-10 * (1.0 + scale.abs()),
        "model reduction {value} is negative beyond roundoff (scale {scale})"
    );
    value.max(0.0)
}
