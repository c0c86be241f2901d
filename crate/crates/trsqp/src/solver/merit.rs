//! Merit-function bookkeeping: predicted reduction, the penalty update
//! loop, the (relaxed) acceptance ratio, and the radius update.

use nalgebra::{DMatrix, DVector};

use super::config::{Mode, SolverConfig};

/// Predicted merit reduction of the step `p`:
/// `-p'g - p'Wp/2 + nu * vpred`.
pub fn compute_pred(
    g: &DVector<f64>,
    w: &DMatrix<f64>,
    p: &DVector<f64>,
    nu: f64,
    vpred: f64,
) -> f64 {
    pred_curvature_part(g, w, p) + nu * vpred
}

/// The nu-independent part of `pred`, `-p'g - p'Wp/2`. `pred` is affine in
/// `nu` with slope `vpred`, which is what makes the penalty loop a finite
/// scalar recurrence.
pub fn pred_curvature_part(g: &DVector<f64>, w: &DMatrix<f64>, p: &DVector<f64>) -> f64 {
    -p.dot(g) - 0.5 * p.dot(&(w * p))
}

/// Result of the penalty parameter loop.
#[derive(Debug, Clone, Copy)]
pub struct PenaltyOutcome {
    pub nu: f64,
    pub pred: f64,
    /// Set when `vpred` is (numerically) zero and no value of `nu` can make
    /// the guard pass; the caller rejects the step instead of looping.
    pub stalled: bool,
    /// The penalty cap was exceeded.
    pub overflow: bool,
}

/// Raise `nu` by factors of `tau` until `pred > pi1 * nu * vpred`.
///
/// `pred_base` is the nu-independent part of the predicted reduction.
/// When `vpred <= 1e-16 ||c||` the guard is evaluated once at the incoming
/// `nu`: raising the penalty cannot help because `pred` no longer grows
/// with it.
pub fn update_penalty(
    pred_base: f64,
    vpred: f64,
    c_norm: f64,
    nu_prev: f64,
    cfg: &SolverConfig,
) -> PenaltyOutcome {
    let stall_threshold = 1e-16 * c_norm;
    let mut nu = nu_prev;
    let pred_at = |nu: f64| pred_base + nu * vpred;

    if vpred <= stall_threshold {
        let pred = pred_at(nu);
        let stalled = pred <= cfg.pi1 * nu * vpred;
        return PenaltyOutcome {
            nu,
            pred,
            stalled,
            overflow: false,
        };
    }

    let mut pred = pred_at(nu);
    while pred <= cfg.pi1 * nu * vpred {
        nu *= cfg.tau;
        if nu > cfg.nu_max {
            return PenaltyOutcome {
                nu,
                pred: pred_at(nu),
                stalled: false,
                overflow: true,
            };
        }
        pred = pred_at(nu);
    }
    PenaltyOutcome {
        nu,
        pred,
        stalled: false,
        overflow: false,
    }
}

/// Acceptance ratio. In relaxed mode both sides of `ared / pred` are
/// shifted by `xi (eps_f + nu eps_c)`; classic mode leaves them bare. A
/// non-positive denominator yields `-inf`, which rejects the step.
pub fn relaxed_ratio(ared: f64, pred: f64, nu: f64, cfg: &SolverConfig) -> f64 {
    let relax = match cfg.mode {
        Mode::Classic => 0.0,
        Mode::Relaxed => cfg.xi() * (cfg.eps_f + nu * cfg.eps_c),
    };
    // Avoid the additions entirely when the relaxation vanishes so classic
    // and relaxed traces agree bit for bit in the noiseless case.
    let (num, den) = if relax == 0.0 {
        (ared, pred)
    } else {
        (ared + relax, pred + relax)
    };
    if den <= 0.0 {
        return f64::NEG_INFINITY;
    }
    num / den
}

/// Accept iff `rho > pi0` (strict); grow the radius by `tau` on acceptance
/// (capped), shrink by `tau` on rejection.
pub fn tr_update(rho: f64, delta: f64, cfg: &SolverConfig) -> (bool, f64) {
    if rho > cfg.pi0 {
        (true, (cfg.tau * delta).min(cfg.delta_max))
    } else {
        (false, delta / cfg.tau)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn pred_of_zero_step_is_zero() {
        let g = DVector::from_vec(vec![1.0, -2.0]);
        let w = DMatrix::identity(2, 2);
        let p = DVector::zeros(2);
        assert_eq!(compute_pred(&g, &w, &p, 1.0, 0.0), 0.0);
    }

    #[test]
    fn pred_direct_arithmetic() {
        let g = DVector::from_vec(vec![1.0, 0.0]);
        let w = DMatrix::identity(2, 2);
        let p = DVector::from_vec(vec![-1.0, 0.0]);
        assert_relative_eq!(compute_pred(&g, &w, &p, 1.0, 0.0), 0.5, max_relative = 1e-15);
    }

    #[test]
    fn pred_matches_model_difference() {
        // Cross-check against m(0) - m(p) evaluated from the model
        // definition f + p'g + p'Wp/2 + nu ||Ap + c||.
        use crate::rng::{uniform_symmetric, ChaCha8Rng};
        use rand_core::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..100 {
            let n = 4;
            let m = 2;
            let g = DVector::from_fn(n, |_, _| uniform_symmetric(&mut rng));
            let r = DMatrix::from_fn(n, n, |_, _| uniform_symmetric(&mut rng));
            let w = (&r + r.transpose()) * 0.5;
            let a = DMatrix::from_fn(m, n, |_, _| uniform_symmetric(&mut rng));
            let c = DVector::from_fn(m, |_, _| uniform_symmetric(&mut rng));
            let p = DVector::from_fn(n, |_, _| uniform_symmetric(&mut rng));
            let nu = 1.7;
            let vpred = c.norm() - (&a * &p + &c).norm();
            let pred = compute_pred(&g, &w, &p, nu, vpred);
            let model_at = |p: &DVector<f64>| {
                p.dot(&g) + 0.5 * p.dot(&(&w * p)) + nu * (&a * p + &c).norm()
            };
            let diff = model_at(&DVector::zeros(n)) - model_at(&p);
            assert_relative_eq!(pred, diff, max_relative = 1e-12, epsilon = 1e-12);
        }
    }

    #[test]
    fn penalty_loop_leaves_satisfied_guard_alone() {
        // pred(nu) = nu - 0.5 with vpred = 1: at nu = 1, 0.5 > 0.3.
        let out = update_penalty(-0.5, 1.0, 1.0, 1.0, &cfg());
        assert_eq!(out.nu, 1.0);
        assert!(!out.stalled && !out.overflow);
        assert_relative_eq!(out.pred, 0.5, max_relative = 1e-15);
    }

    #[test]
    fn penalty_loop_hand_iterated_recurrence() {
        // Same instance started at nu = 0.5: pred = 0 <= 0.15 forces one
        // bump to nu = 1, where 0.5 > 0.3 exits.
        let out = update_penalty(-0.5, 1.0, 1.0, 0.5, &cfg());
        assert_eq!(out.nu, 1.0);
        assert_relative_eq!(out.pred, 0.5, max_relative = 1e-15);
    }

    #[test]
    fn zero_vpred_with_positive_pred_passes_once() {
        // Condition reads pred > 0 and is nu-independent.
        let out = update_penalty(0.3, 0.0, 1.0, 1.0, &cfg());
        assert!(!out.stalled);
        assert_eq!(out.nu, 1.0);
    }

    #[test]
    fn zero_vpred_with_nonpositive_pred_stalls() {
        let out = update_penalty(-0.1, 0.0, 1.0, 1.0, &cfg());
        assert!(out.stalled);
        assert_eq!(out.nu, 1.0);
    }

    #[test]
    fn penalty_overflow_is_reported() {
        let mut c = cfg();
        c.nu_max = 8.0;
        // pred(nu) = -10 + nu * 1e-30: guard needs nu beyond any cap.
        let out = update_penalty(-10.0, 1e-30, 1e-10, 1.0, &c);
        assert!(out.stalled, "tiny vpred relative to c is a stall");
        let out = update_penalty(-10.0, 0.5, 1e6, 1.0, &c);
        assert!(out.overflow);
    }

    #[test]
    fn ratio_without_noise_is_plain() {
        let c = cfg();
        assert_relative_eq!(relaxed_ratio(0.5, 1.0, 3.0, &c), 0.5);
        let mut classic = c;
        classic.mode = Mode::Classic;
        assert_relative_eq!(relaxed_ratio(0.5, 1.0, 3.0, &classic), 0.5);
    }

    #[test]
    fn equal_ared_pred_gives_one() {
        let mut c = cfg();
        c.eps_f = 0.3;
        c.eps_c = 0.7;
        assert_relative_eq!(relaxed_ratio(2.0, 2.0, 5.0, &c), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn relaxation_arithmetic_from_the_definition() {
        // pi0 -> 0 gives xi = 2; ared 0, pred 1, eps_f 0.1:
        // rho = 0.2 / 1.2 = 1/6.
        let mut c = cfg();
        c.pi0 = 1e-300; // xi -> 2 exactly at this precision
        c.eps_f = 0.1;
        c.eps_c = 0.0;
        let rho = relaxed_ratio(0.0, 1.0, 17.0, &c);
        assert_relative_eq!(rho, 1.0 / 6.0, max_relative = 1e-12);
    }

    #[test]
    fn zero_denominator_rejects() {
        let mut c = cfg();
        c.mode = Mode::Classic;
        assert_eq!(relaxed_ratio(1.0, 0.0, 1.0, &c), f64::NEG_INFINITY);
    }

    #[test]
    fn tr_update_branches() {
        let c = cfg();
        let (acc, d) = tr_update(1.0, 1.0, &c);
        assert!(acc);
        assert_eq!(d, 2.0);
        let (acc, d) = tr_update(0.1, 1.0, &c);
        assert!(!acc);
        assert_eq!(d, 0.5);
        // Exactly pi0 rejects: the test is strict.
        let (acc, _) = tr_update(c.pi0, 1.0, &c);
        assert!(!acc);
    }

    #[test]
    fn tr_update_caps_growth() {
        let mut c = cfg();
        c.delta_max = 1.5;
        let (_, d) = tr_update(1.0, 1.0, &c);
        assert_eq!(d, 1.5);
    }
}
