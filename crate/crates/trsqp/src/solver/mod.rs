//! The trust-region SQP iteration.
//!
//! Each iteration works from the noisy oracle alone:
//!
//! 1. evaluate (or reuse) `f, c, g, A` at the incumbent;
//! 2. least-squares multipliers, then the Lagrangian Hessian `W`;
//! 3. normal step `v` inside `||v|| <= zeta * delta`;
//! 4. tangential step `h = Z d` inside the leftover budget
//!    `sqrt(delta^2 - ||v||^2)`;
//! 5. penalty update until `pred > pi1 * nu * vpred`;
//! 6. merit difference, acceptance ratio (relaxed or classic), radius
//!    update, and the move decision.
//!
//! Evaluations follow the once-per-point economy of practical codes: the
//! incumbent's noisy values are cached until the iterate moves, and the
//! trial point's objective/constraints are sampled fresh each test. Under
//! noise this means a rejected step keeps contesting the same incumbent
//! draw, which is exactly the regime where the classic ratio test starves
//! the radius and the relaxed one does not.

mod config;
mod merit;
mod record;

pub use config::{Mode, SolverConfig};
pub use merit::{compute_pred, pred_curvature_part, relaxed_ratio, tr_update, update_penalty};
pub use record::{
    IterationRecord, SolverRun, SolverStatus, StepDecomposition, StepDetail, Trace,
};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::noise::{NoiseSpec, NoisyOracle, Oracle};
use crate::problem::NlpProblem;
use crate::subproblems::{
    least_squares_multipliers, null_space_basis, solve_normal_tr, solve_tangential_tr,
};

/// Mutable state carried across iterations.
#[derive(Debug, Clone)]
pub struct SolverState {
    pub x: DVector<f64>,
    pub lambda: DVector<f64>,
    pub delta: f64,
    pub nu: f64,
    pub k: usize,
    cache: Option<PointCache>,
    /// Trial-point objective/constraint values adopted on acceptance, so the
    /// new incumbent is not re-sampled.
    carry_fc: Option<(f64, DVector<f64>)>,
}

#[derive(Debug, Clone)]
struct PointCache {
    f: f64,
    c: DVector<f64>,
    g: DVector<f64>,
    a: DMatrix<f64>,
}

impl SolverState {
    pub fn new(x0: DVector<f64>, m: usize, cfg: &SolverConfig) -> Self {
        SolverState {
            x: x0,
            lambda: DVector::zeros(m),
            delta: cfg.delta0,
            nu: cfg.nu_init,
            k: 0,
            cache: None,
            carry_fc: None,
        }
    }
}

/// What `solver_step` hands back to the driver loop.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)] // Abort is the rare variant
pub enum StepOutcome {
    /// Iteration completed (accepted or rejected step).
    Iterated {
        record: IterationRecord,
        detail: StepDetail,
    },
    /// The run must stop with the given status (mid-iteration abort).
    Abort(SolverStatus),
}

fn ensure_finite_scalar(v: f64, what: &'static str, k: usize) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::EvaluationFault { iteration: k, what })
    }
}

fn ensure_finite_vector(v: DVector<f64>, what: &'static str, k: usize) -> Result<DVector<f64>> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(v)
    } else {
        Err(Error::EvaluationFault { iteration: k, what })
    }
}

fn ensure_finite_matrix(v: DMatrix<f64>, what: &'static str, k: usize) -> Result<DMatrix<f64>> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(v)
    } else {
        Err(Error::EvaluationFault { iteration: k, what })
    }
}

/// Execute one full iteration, mutating `state`.
pub fn solver_step<O: Oracle>(
    state: &mut SolverState,
    oracle: &mut O,
    cfg: &SolverConfig,
) -> Result<StepOutcome> {
    let k = state.k;
    let n = oracle.n();
    let m = oracle.m();
    let delta = state.delta;
    let x_start = state.x.clone();

    // Refresh the incumbent cache if the iterate moved (or first iteration).
    if state.cache.is_none() {
        let (f, c) = match state.carry_fc.take() {
            Some(fc) => fc,
            None => {
                let f = ensure_finite_scalar(oracle.eval_f(&x_start)?, "f", k)?;
                let c = ensure_finite_vector(oracle.eval_c(&x_start)?, "c", k)?;
                (f, c)
            }
        };
        let g = ensure_finite_vector(oracle.eval_g(&x_start)?, "g", k)?;
        let a = ensure_finite_matrix(oracle.eval_jacobian(&x_start)?, "A", k)?;
        state.cache = Some(PointCache { f, c, g, a });
    }
    let cache = state.cache.as_ref().expect("cache populated above");
    let (f_noisy, c_noisy, g_noisy, a_noisy) =
        (cache.f, cache.c.clone(), cache.g.clone(), cache.a.clone());
    let c_norm = c_noisy.norm();

    // Multipliers and Lagrangian Hessian.
    let lambda = if m == 0 {
        DVector::zeros(0)
    } else {
        least_squares_multipliers(&g_noisy, &a_noisy, cfg.rank_tol)?
    };
    let w_noisy = ensure_finite_matrix(
        oracle.eval_lagrangian_hessian(&x_start, &lambda)?,
        "W",
        k,
    )?;
    state.lambda = lambda.clone();

    // Normal step in the shrunken ball.
    let normal = if m == 0 {
        None
    } else {
        Some(solve_normal_tr(
            &a_noisy,
            &c_noisy,
            cfg.zeta * delta,
            cfg.rank_tol,
        )?)
    };
    let cauchy_margin_normal = normal.as_ref().map_or(0.0, |s| s.cauchy_margin);
    let vpred_normal = normal.as_ref().map_or(0.0, |s| s.predicted_reduction);

    // Null-space basis and orthogonalized normal component.
    let basis = null_space_basis(&a_noisy, cfg.rank_tol)?;
    let mut v = normal.map_or_else(|| DVector::zeros(n), |s| s.step);
    if basis.width() > 0 && v.norm() > 0.0 {
        // Strip the (roundoff-scale) null-space content of v so the
        // decomposition is orthogonal to working precision.
        let zv = basis.z.transpose() * &v;
        v -= &basis.z * zv;
    }

    let budget = (delta * delta - v.norm_squared()).max(0.0).sqrt();
    let q = &g_noisy + &w_noisy * &v;
    let reduced_grad_norm = if basis.width() > 0 {
        (basis.z.transpose() * &g_noisy).norm()
    } else {
        0.0
    };

    let tangential = solve_tangential_tr(
        &q,
        &w_noisy,
        &basis,
        budget,
        cfg.cg_tol,
        2 * basis.width().max(1),
    )?;
    let h = tangential.step.clone();
    let hpred = tangential.predicted_reduction;
    let p = &v + &h;

    // Model quantities for the full step.
    let vpred = if m == 0 {
        0.0
    } else {
        c_norm - (&a_noisy * &p + &c_noisy).norm()
    };
    let pred_base = pred_curvature_part(&g_noisy, &w_noisy, &p);
    let penalty = update_penalty(pred_base, vpred, c_norm, state.nu, cfg);
    if penalty.overflow {
        log::warn!(
            "iteration {k}: penalty parameter overflow (nu = {:.3e})",
            penalty.nu
        );
        return Ok(StepOutcome::Abort(SolverStatus::PenaltyOverflow));
    }
    let nu = penalty.nu;
    let pred = penalty.pred;
    state.nu = nu;

    // Full-rank diagnostic: with well-conditioned constraints the normal
    // step length is controlled by the feasibility reduction.
    if m > 0 && vpred_normal > 0.0 {
        let sv = a_noisy.clone().svd(false, false).singular_values;
        let sigma_max = sv.max();
        let sigma_min = sv.min();
        if sigma_min > cfg.rank_tol * sigma_max && sigma_min > 0.0 {
            let kappa = sigma_max / sigma_min;
            let gamma1 = 2.0 / (sigma_min * (1.0f64).min(0.5 / (kappa * kappa)));
            if v.norm() > gamma1 * vpred_normal {
                log::warn!(
                    "iteration {k}: ||v|| = {:.3e} exceeds Gamma1 * vpred = {:.3e}",
                    v.norm(),
                    gamma1 * vpred_normal
                );
            }
        }
    }

    let noisy_feas_stat = (a_noisy.transpose() * &c_noisy).norm();

    let (ared, rho, accepted, step_norm, stalled) = if penalty.stalled {
        // No nu can certify progress; reject, shrink, stay put.
        state.delta = delta / cfg.tau;
        (f64::NAN, f64::NEG_INFINITY, false, 0.0, true)
    } else {
        // Merit difference with fresh draws at the trial point.
        let x_trial = &x_start + &p;
        let f_trial = ensure_finite_scalar(oracle.eval_f(&x_trial)?, "f", k)?;
        let c_trial = ensure_finite_vector(oracle.eval_c(&x_trial)?, "c", k)?;
        let (f_at_x, c_at_x_norm) = if cfg.merit_resample_at_x {
            let f = ensure_finite_scalar(oracle.eval_f(&x_start)?, "f", k)?;
            let c = ensure_finite_vector(oracle.eval_c(&x_start)?, "c", k)?;
            (f, c.norm())
        } else {
            (f_noisy, c_norm)
        };
        let ared = (f_at_x + nu * c_at_x_norm) - (f_trial + nu * c_trial.norm());
        let rho = relaxed_ratio(ared, pred, nu, cfg);
        let (accepted, delta_new) = tr_update(rho, delta, cfg);
        state.delta = delta_new;
        if accepted {
            state.x = x_trial;
            state.cache = None;
            state.carry_fc = Some((f_trial, c_trial));
        }
        let step_norm = if accepted { p.norm() } else { 0.0 };
        (ared, rho, accepted, step_norm, false)
    };

    let record = IterationRecord {
        k,
        f_noisy,
        f_true: f64::NAN,
        feas_true: f64::NAN,
        opt_true: f64::NAN,
        feas_stat_true: f64::NAN,
        step_norm,
        delta,
        nu,
        rho,
        accepted,
        vpred,
        hpred,
        pred,
        ared,
        cauchy_margin_normal,
        cauchy_margin_tangential: tangential.cauchy_margin,
    };
    let detail = StepDetail {
        decomposition: StepDecomposition {
            v,
            h,
            p,
            vpred,
            hpred,
            pred,
            ared,
            rho,
            accepted,
        },
        x: x_start,
        lambda,
        g_noisy,
        w_noisy,
        tangential_budget: budget,
        penalty_stall: stalled,
        noisy_feas_stat,
        noisy_reduced_grad: reduced_grad_norm,
    };

    state.k += 1;
    Ok(StepOutcome::Iterated { record, detail })
}

/// Drive [`solver_step`] until termination.
///
/// Termination statuses:
/// * `Converged` — noisy `||A'c|| <= tol_feas` and `||Z'g|| <= tol_opt` on
///   three consecutive iterations (consecutiveness damps noise flicker);
/// * `TrCollapse` — the radius fell below `delta_min`;
/// * `MaxIter` — iteration cap;
/// * `PenaltyOverflow` / `EvaluationFault` — aborted mid-iteration, trace
///   kept up to the abort.
pub fn run_solver<O: Oracle>(oracle: &mut O, cfg: &SolverConfig) -> Result<SolverRun> {
    cfg.validate()?;
    let mut state = SolverState::new(oracle.x0(), oracle.m(), cfg);
    let mut trace = Trace::default();
    let mut consecutive_small = 0usize;
    let mut status = SolverStatus::MaxIter;

    while state.k < cfg.max_iter {
        let outcome = match solver_step(&mut state, oracle, cfg) {
            Ok(o) => o,
            Err(Error::EvaluationFault { .. }) => {
                status = SolverStatus::EvaluationFault;
                break;
            }
            Err(e) => return Err(e),
        };
        match outcome {
            StepOutcome::Abort(s) => {
                status = s;
                break;
            }
            StepOutcome::Iterated { record, detail } => {
                let small = detail.noisy_feas_stat <= cfg.tol_feas
                    && detail.noisy_reduced_grad <= cfg.tol_opt;
                trace.push(record, detail);
                consecutive_small = if small { consecutive_small + 1 } else { 0 };
                if consecutive_small >= 3 {
                    status = SolverStatus::Converged;
                    break;
                }
                if state.delta < cfg.delta_min {
                    status = SolverStatus::TrCollapse;
                    break;
                }
            }
        }
    }

    Ok(SolverRun {
        status,
        final_x: state.x.clone(),
        final_lambda: state.lambda.clone(),
        final_delta: state.delta,
        final_nu: state.nu,
        iterations: trace.len(),
        trace,
    })
}

/// Convenience: run on the exact problem (a zero-noise oracle).
pub fn solve_noiseless(problem: &NlpProblem, cfg: &SolverConfig) -> Result<SolverRun> {
    let mut oracle = NoisyOracle::new(problem.clone(), NoiseSpec::zero(0))?;
    run_solver(&mut oracle, cfg)
}
