//! Solve a built-in problem with exact evaluations and print the iteration
//! history.
//!
//! ```sh
//! cargo run --example solve_noiseless
//! ```

use trsqp::problem::{builtin_problem, known_objective};
use trsqp::solver::{solve_noiseless, SolverConfig};

fn main() -> trsqp::Result<()> {
    let problem = builtin_problem("HS7")?;
    let cfg = SolverConfig::default();

    let run = solve_noiseless(&problem, &cfg)?;

    println!("{:>4} {:>14} {:>12} {:>12} {:>9} {:>8}", "iter", "f", "||c||", "pred", "rho", "delta");
    for (rec, det) in run.trace.records.iter().zip(run.trace.details.iter()) {
        let c_norm = problem.c(&det.x).norm();
        println!(
            "{:>4} {:>14.8} {:>12.3e} {:>12.3e} {:>9.3} {:>8.1e}{}",
            rec.k,
            problem.f(&det.x),
            c_norm,
            rec.pred,
            rec.rho,
            rec.delta,
            if rec.accepted { "" } else { "  (rejected)" },
        );
    }

    let f_final = problem.f(&run.final_x);
    println!("\nstatus: {:?} after {} iterations", run.status, run.iterations);
    println!("x = {:?}", run.final_x.as_slice());
    println!("f = {f_final:.12}");
    if let Some(f_star) = known_objective("HS7") {
        println!("known optimum {f_star:.12}, gap {:.3e}", (f_final - f_star).abs());
    }
    Ok(())
}
