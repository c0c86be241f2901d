//! Normal (feasibility) trust-region subproblem.
//!
//! Solves `min_v || A v + c ||` subject to `||v|| <= radius` by Powell's
//! dogleg between the Cauchy point along `-A'c` and the minimum-norm
//! Gauss-Newton point. Both anchor points lie in the row space of `A`, so
//! the step stays orthogonal to the null space used by the tangential
//! subproblem.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

use super::{clamp_reduction, TrSolution, TrStatus};

/// Power-iteration estimate of `||A'A||`, started from the supplied vector
/// so the Rayleigh quotient sequence is non-decreasing and the first
/// quotient is the one along the start direction. The estimate is a lower
/// bound on the true norm, which makes the Cauchy certificate it feeds
/// conservative.
fn gram_norm_estimate(a: &DMatrix<f64>, start: &DVector<f64>, steps: usize) -> f64 {
    let mut y = start.clone();
    let mut rq = 0.0;
    for _ in 0..steps {
        let norm = y.norm();
        if norm == 0.0 {
            break;
        }
        y /= norm;
        let z = a * &y;
        rq = z.norm_squared();
        y = a.transpose() * z;
    }
    rq
}

/// Solve the normal subproblem; the returned `predicted_reduction` is
/// `||c|| - ||A v + c||` and the certificate fields report the
/// fraction-of-Cauchy-decrease inequality.
pub fn solve_normal_tr(
    a: &DMatrix<f64>,
    c: &DVector<f64>,
    radius: f64,
    rank_tol: f64,
) -> Result<TrSolution> {
    let (m, n) = (a.nrows(), a.ncols());
    if c.len() != m {
        return Err(Error::Dimension {
            context: "solve_normal_tr",
            expected: m,
            actual: c.len(),
        });
    }
    if a.iter().any(|v| !v.is_finite()) || c.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("solve_normal_tr input"));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidInput {
            context: "solve_normal_tr",
            message: format!("radius must be positive and finite, got {radius}"),
        });
    }

    let c_norm = c.norm();
    if c_norm == 0.0 {
        return Ok(TrSolution::zero(n, TrStatus::Interior));
    }

    // Steepest-descent direction for q(v) = ||Av + c||^2 / 2.
    let grad = a.transpose() * c;
    let grad_norm = grad.norm();
    if grad_norm == 0.0 {
        // Stationary for the infeasibility measure; nothing to certify.
        return Ok(TrSolution::zero(n, TrStatus::Interior));
    }

    // Minimum-norm Gauss-Newton point.
    let svd = a.clone().svd(true, true);
    let sigma_max = svd.singular_values.max();
    let eps = rank_tol * sigma_max;
    let v_gn = svd.solve(&(-c), eps).map_err(|msg| Error::InvalidInput {
        context: "solve_normal_tr",
        message: msg.to_string(),
    })?;

    let (v, status) = if v_gn.norm() <= radius {
        (v_gn, TrStatus::Interior)
    } else {
        let ag = a * &grad;
        let alpha = grad_norm * grad_norm / ag.norm_squared();
        let v_c = -&grad * alpha;
        let vc_norm = v_c.norm();
        if vc_norm >= radius {
            ((-&grad) * (radius / grad_norm), TrStatus::Boundary)
        } else {
            // Boundary crossing of the segment from the Cauchy point to the
            // Gauss-Newton point.
            let b = &v_gn - &v_c;
            let bb = b.norm_squared();
            if bb == 0.0 {
                (v_c, TrStatus::Boundary)
            } else {
                let cdot = v_c.dot(&b);
                let gap = radius * radius - vc_norm * vc_norm;
                let disc = (cdot * cdot + bb * gap).sqrt();
                let beta = if cdot <= 0.0 {
                    (-cdot + disc) / bb
                } else {
                    gap / (cdot + disc)
                };
                (v_c + b * beta, TrStatus::Boundary)
            }
        }
    };

    let residual_norm = (a * &v + c).norm();
    let vpred = clamp_reduction(c_norm - residual_norm, c_norm);

    let gram_norm = gram_norm_estimate(a, &grad, 20);
    let min_term = if gram_norm > 0.0 {
        radius.min(grad_norm / gram_norm)
    } else {
        radius
    };
    let cauchy_rhs = grad_norm / (2.0 * c_norm) * min_term;

    Ok(TrSolution {
        predicted_reduction: vpred,
        on_boundary: status == TrStatus::Boundary,
        iterations: 1,
        status,
        cauchy_rhs,
        cauchy_margin: vpred - cauchy_rhs,
        step: v,
    })
}
