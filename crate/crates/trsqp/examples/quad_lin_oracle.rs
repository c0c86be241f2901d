//! Closed-form validation: the random convex quadratic family has an exact
//! KKT solution by a dense linear solve, so solver accuracy is measurable
//! to machine precision.
//!
//! ```sh
//! cargo run --example quad_lin_oracle
//! ```

use trsqp::problem::{quad_lin, quad_lin_kkt};
use trsqp::solver::{solve_noiseless, SolverConfig};

fn main() -> trsqp::Result<()> {
    let mut cfg = SolverConfig::default();
    cfg.delta0 = 10.0;

    println!("{:>5} {:>12} {:>12} {:>12} {:>6}", "seed", "x err", "lambda err", "f err", "iters");
    let mut worst: f64 = 0.0;
    for seed in 0..10 {
        let (n, m) = (5, 3);
        let problem = quad_lin(n, m, seed);
        let (x_star, lambda_star, f_star) = quad_lin_kkt(n, m, seed);

        let run = solve_noiseless(&problem, &cfg)?;
        let x_err = (&run.final_x - &x_star).norm();
        let l_err = (&run.final_lambda - &lambda_star).norm();
        let f_err = (problem.f(&run.final_x) - f_star).abs();
        worst = worst.max(x_err);
        println!("{seed:>5} {x_err:>12.3e} {l_err:>12.3e} {f_err:>12.3e} {:>6}", run.iterations);
    }
    println!("\nworst x error over 10 seeds: {worst:.3e}");
    Ok(())
}
