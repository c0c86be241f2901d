//! Tangential (optimality) trust-region subproblem.
//!
//! Works in reduced coordinates `h = Z d`: minimizes
//! `(Z'q)' d + d' (Z'WZ) d / 2` over `||d|| <= radius` with truncated
//! conjugate gradients, following negative-curvature directions to the
//! boundary. Because `Z` is orthonormal, `||Z d|| = ||d||` and the reduced
//! ball equals the full-space one.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

use super::{clamp_reduction, NullSpaceBasis, TrSolution, TrStatus};

/// Positive root of `||d + sigma p|| = radius`.
fn boundary_sigma(d: &DVector<f64>, p: &DVector<f64>, radius: f64) -> f64 {
    let pp = p.norm_squared();
    let dp = d.dot(p);
    let gap = radius * radius - d.norm_squared();
    let disc = (dp * dp + pp * gap.max(0.0)).sqrt();
    if dp <= 0.0 {
        (-dp + disc) / pp
    } else {
        gap.max(0.0) / (dp + disc)
    }
}

/// Solve the tangential subproblem for the step `h = Z d` and its predicted
/// model reduction `hpred = -q'h - h'Wh/2`.
///
/// The Cauchy certificate divides by the largest reduced-Hessian Rayleigh
/// quotient magnitude seen during the iteration. That quotient never
/// exceeds `||W||`, so a non-negative margin here implies the inequality
/// with the true norm as well.
pub fn solve_tangential_tr(
    q: &DVector<f64>,
    w: &DMatrix<f64>,
    z: &NullSpaceBasis,
    radius: f64,
    tol: f64,
    max_iter: usize,
) -> Result<TrSolution> {
    let n = q.len();
    if w.nrows() != n || w.ncols() != n {
        return Err(Error::Dimension {
            context: "solve_tangential_tr",
            expected: n,
            actual: w.nrows(),
        });
    }
    if z.z.nrows() != n {
        return Err(Error::Dimension {
            context: "solve_tangential_tr",
            expected: n,
            actual: z.z.nrows(),
        });
    }
    if q.iter().any(|v| !v.is_finite()) || w.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("solve_tangential_tr input"));
    }
    if !(radius.is_finite() && radius >= 0.0) {
        return Err(Error::InvalidInput {
            context: "solve_tangential_tr",
            message: format!("radius must be non-negative and finite, got {radius}"),
        });
    }

    let width = z.width();
    if width == 0 || radius == 0.0 {
        return Ok(TrSolution::zero(n, TrStatus::Interior));
    }

    let q_r = z.z.transpose() * q;
    let q_r_norm = q_r.norm();
    if q_r_norm == 0.0 {
        return Ok(TrSolution::zero(n, TrStatus::Interior));
    }

    let h_r = {
        let wz = w * &z.z;
        let h = z.z.transpose() * wz;
        (&h + h.transpose()) * 0.5
    };

    let stop_tol = tol * q_r_norm;
    let mut d = DVector::zeros(width);
    let mut resid = q_r.clone();
    let mut p = -&resid;
    let mut rr = resid.norm_squared();
    let mut rq_max: f64 = 0.0;
    let mut status = TrStatus::MaxIter;
    let mut iterations = 0;

    for _ in 0..max_iter.max(1) {
        iterations += 1;
        let hp = &h_r * &p;
        let kappa = p.dot(&hp);
        let pp = p.norm_squared();
        if pp > 0.0 {
            rq_max = rq_max.max(kappa.abs() / pp);
        }

        if kappa <= 0.0 {
            let sigma = boundary_sigma(&d, &p, radius);
            d += &p * sigma;
            status = TrStatus::NegativeCurvature;
            break;
        }

        let alpha = rr / kappa;
        if (&d + &p * alpha).norm() >= radius {
            let sigma = boundary_sigma(&d, &p, radius);
            d += &p * sigma;
            status = TrStatus::Boundary;
            break;
        }

        d += &p * alpha;
        resid += hp * alpha;
        let rr_new = resid.norm_squared();
        if rr_new.sqrt() <= stop_tol {
            status = TrStatus::Interior;
            break;
        }
        let beta = rr_new / rr;
        rr = rr_new;
        p = -&resid + p * beta;
    }

    let h = &z.z * &d;
    let hpred_raw = -q.dot(&h) - 0.5 * h.dot(&(w * &h));
    let hpred = clamp_reduction(hpred_raw, q_r_norm * radius);

    let min_term = if rq_max > 0.0 {
        radius.min(q_r_norm / rq_max)
    } else {
        radius
    };
    let cauchy_rhs = 0.5 * q_r_norm * min_term;

    let on_boundary = matches!(status, TrStatus::Boundary | TrStatus::NegativeCurvature);
    Ok(TrSolution {
        predicted_reduction: hpred,
        on_boundary,
        iterations,
        status,
        cauchy_rhs,
        cauchy_margin: hpred - cauchy_rhs,
        step: h,
    })
}
