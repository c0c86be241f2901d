//! Shared test support: an implementation-independent brute-force ball
//! minimizer and the standard bundle of solver runs the acceptance criteria
//! inspect.

// Each integration-test binary compiles this module and uses a subset.
#![allow(dead_code)]

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use rand_core::SeedableRng;

use trsqp::harness::fill_true_columns;
use trsqp::noise::{NoiseSpec, NoisyOracle};
use trsqp::problem::{builtin_problem, NlpProblem};
use trsqp::rng::{uniform_symmetric, ChaCha8Rng};
use trsqp::solver::{run_solver, Mode, SolverConfig, SolverRun};

/// Global minimum of `obj` over the closed ball of the given radius by
/// dense grid search with iterative refinement. Points falling outside the
/// ball are radially projected onto it, so the boundary is sampled densely
/// as well. Written for dimensions 1 through 3 and smooth objectives.
pub fn brute_force_min_ball(
    obj: &dyn Fn(&DVector<f64>) -> f64,
    dim: usize,
    radius: f64,
) -> (DVector<f64>, f64) {
    assert!((1..=3).contains(&dim), "oracle written for dim 1..=3");
    if radius == 0.0 {
        let x = DVector::zeros(dim);
        let v = obj(&x);
        return (x, v);
    }
    let pts_per_axis = match dim {
        1 => 129,
        2 => 33,
        _ => 17,
    };
    let mut center = DVector::zeros(dim);
    let mut half_width = radius;
    let mut best_x = center.clone();
    let mut best_v = obj(&best_x);

    for _round in 0..16 {
        let mut idx = vec![0usize; dim];
        loop {
            let mut x = DVector::zeros(dim);
            for d in 0..dim {
                let t = idx[d] as f64 / (pts_per_axis - 1) as f64;
                x[d] = center[d] - half_width + 2.0 * half_width * t;
            }
            let norm = x.norm();
            if norm > radius {
                x *= radius / norm;
            }
            let v = obj(&x);
            if v < best_v {
                best_v = v;
                best_x = x;
            }
            // Advance the mixed-radix counter.
            let mut d = 0;
            loop {
                idx[d] += 1;
                if idx[d] < pts_per_axis {
                    break;
                }
                idx[d] = 0;
                d += 1;
                if d == dim {
                    break;
                }
            }
            if d == dim {
                break;
            }
        }
        center = best_x.clone();
        half_width *= 0.35;
    }
    (best_x, best_v)
}

/// A solver run plus everything needed to audit it.
pub struct RunBundle {
    pub label: String,
    pub cfg: SolverConfig,
    pub problem: NlpProblem,
    pub run: SolverRun,
}

fn noisy_bundle(name: &str, mode: Mode, eps: f64, seed: u64, delta0: f64) -> RunBundle {
    let problem = builtin_problem(name).unwrap();
    let mut cfg = SolverConfig::default();
    cfg.mode = mode;
    cfg.eps_f = eps;
    cfg.eps_c = eps;
    cfg.delta0 = delta0;
    cfg.max_iter = 500;
    let mut oracle = NoisyOracle::new(problem.clone(), NoiseSpec::uniform(eps, seed)).unwrap();
    let mut run = run_solver(&mut oracle, &cfg).unwrap();
    fill_true_columns(&mut run.trace, &problem);
    RunBundle {
        label: format!("{name}/{mode:?}/eps{eps}/seed{seed}/d0{delta0:.0e}"),
        cfg,
        problem,
        run,
    }
}

fn noiseless_bundle(name: &str, delta0: f64) -> RunBundle {
    let problem = builtin_problem(name).unwrap();
    let mut cfg = SolverConfig::default();
    cfg.delta0 = delta0;
    cfg.max_iter = 500;
    let mut oracle = NoisyOracle::new(problem.clone(), NoiseSpec::zero(0)).unwrap();
    let mut run = run_solver(&mut oracle, &cfg).unwrap();
    fill_true_columns(&mut run.trace, &problem);
    RunBundle {
        label: format!("{name}/noiseless/d0{delta0:.0e}"),
        cfg,
        problem,
        run,
    }
}

/// The standard set of runs audited iteration-by-iteration by the merit,
/// geometry, and certificate criteria: every built-in noiseless, plus noisy
/// classic and relaxed runs across the scenario settings.
pub fn audited_runs() -> &'static Vec<RunBundle> {
    static RUNS: OnceLock<Vec<RunBundle>> = OnceLock::new();
    RUNS.get_or_init(|| {
        let mut bundles = Vec::new();
        for name in ["HS7", "HS6", "HS27", "HS39", "BYRDSPHR", "RANK_DEFICIENT_TOY", "QUAD_LIN(3)"] {
            bundles.push(noiseless_bundle(name, 1.0));
        }
        // Small-radius noisy contrast (both modes, several seeds).
        for seed in 0..5 {
            bundles.push(noisy_bundle("HS7", Mode::Classic, 0.1, seed, 1e-7));
            bundles.push(noisy_bundle("HS7", Mode::Relaxed, 0.1, seed, 1e-7));
        }
        // Mid-run collapse setting on the rank-deficient problem.
        for seed in 0..3 {
            bundles.push(noisy_bundle("RANK_DEFICIENT_TOY", Mode::Classic, 0.1, seed, 1.0));
            bundles.push(noisy_bundle("RANK_DEFICIENT_TOY", Mode::Relaxed, 0.1, seed, 1.0));
        }
        // Benign setting.
        for seed in 0..3 {
            bundles.push(noisy_bundle("BYRDSPHR", Mode::Classic, 0.1, seed, 1e-7));
            bundles.push(noisy_bundle("BYRDSPHR", Mode::Relaxed, 0.1, seed, 1e-7));
        }
        // Moderate noise on the quadratic family.
        for seed in 0..3 {
            bundles.push(noisy_bundle("QUAD_LIN(3)", Mode::Relaxed, 0.01, seed, 1.0));
        }
        bundles
    })
}

/// The full small-radius scenario (10 repetitions, all three modes) with
/// the effective solver configuration of each run, shared by the criteria
/// that must audit every iteration of every acceptance-experiment run.
pub struct ScenarioAudit {
    pub runs: Vec<(trsqp::harness::RunMode, SolverConfig, trsqp::solver::Trace)>,
}

pub fn scenario_audit() -> &'static ScenarioAudit {
    static AUDIT: OnceLock<ScenarioAudit> = OnceLock::new();
    AUDIT.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        let mut spec = trsqp::harness::scenario(trsqp::harness::Scenario::SmallDelta0);
        spec.out_dir = dir.path().to_path_buf();
        let results = trsqp::harness::run_experiment(&spec).unwrap();
        let runs = results
            .into_iter()
            .map(|(summary, trace)| {
                // Reconstruct the per-run config the harness applied.
                let mut cfg = spec.config;
                match summary.mode {
                    trsqp::harness::RunMode::NoNoise => {
                        cfg.mode = Mode::Relaxed;
                        cfg.eps_f = 0.0;
                        cfg.eps_c = 0.0;
                    }
                    trsqp::harness::RunMode::ClassicNoisy => {
                        cfg.mode = Mode::Classic;
                        cfg.eps_f = spec.noise.eps_f;
                        cfg.eps_c = spec.noise.eps_c;
                    }
                    trsqp::harness::RunMode::RelaxedNoisy => {
                        cfg.mode = Mode::Relaxed;
                        cfg.eps_f = spec.noise.eps_f;
                        cfg.eps_c = spec.noise.eps_c;
                    }
                }
                (summary.mode, cfg, trace)
            })
            .collect();
        ScenarioAudit { runs }
    })
}

/// Deterministic uniform matrix for instance generators.
pub fn rand_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| scale * uniform_symmetric(rng))
}

pub fn rand_vector(rng: &mut ChaCha8Rng, len: usize, scale: f64) -> DVector<f64> {
    DVector::from_fn(len, |_, _| scale * uniform_symmetric(rng))
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
