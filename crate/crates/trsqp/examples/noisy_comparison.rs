//! The headline contrast: from a tiny initial trust region under bounded
//! noise, the classic ratio test collapses while the relaxed test recovers
//! and settles in a noise-level neighborhood of the optimum.
//!
//! ```sh
//! cargo run --example noisy_comparison
//! ```

use trsqp::noise::{NoiseSpec, NoisyOracle};
use trsqp::problem::{builtin_problem, known_objective};
use trsqp::solver::{run_solver, Mode, SolverConfig};

fn main() -> trsqp::Result<()> {
    let problem = builtin_problem("HS7")?;
    let f_star = known_objective("HS7").unwrap();
    let eps = 0.1;

    let mut cfg = SolverConfig::default();
    cfg.delta0 = 1e-7; // deliberately starved radius
    cfg.max_iter = 500;

    for (label, mode) in [("classic", Mode::Classic), ("relaxed", Mode::Relaxed)] {
        cfg.mode = mode;
        // The solver is told the noise level only in relaxed mode semantics;
        // classic ignores it inside the ratio.
        cfg.eps_f = eps;
        cfg.eps_c = eps;

        let mut oracle = NoisyOracle::new(problem.clone(), NoiseSpec::uniform(eps, 7))?;
        let run = run_solver(&mut oracle, &cfg)?;

        let feas = problem.c(&run.final_x).norm();
        let f_gap = (problem.f(&run.final_x) - f_star).abs();
        let min_delta = run
            .trace
            .records
            .iter()
            .map(|r| r.delta)
            .fold(f64::INFINITY, f64::min);
        let accepted = run.trace.records.iter().filter(|r| r.accepted).count();

        println!("mode {label}:");
        println!("  status        {:?}", run.status);
        println!("  iterations    {}", run.iterations);
        println!("  accepted      {accepted}");
        println!("  min delta     {min_delta:.3e}");
        println!("  final ||c||   {feas:.3e}");
        println!("  final |f-f*|  {f_gap:.3e}");
        println!();
    }

    println!("noise level was {eps}: the relaxed run ends inside the noise band,");
    println!("the classic run never escapes the starved radius.");
    Ok(())
}
