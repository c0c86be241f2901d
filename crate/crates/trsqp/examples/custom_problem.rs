//! Define your own equality-constrained problem and solve it.
//!
//! Minimizes the distance to (3, 4) on the unit circle; the answer is the
//! point (3/5, 4/5).
//!
//! ```sh
//! cargo run --example custom_problem
//! ```

use nalgebra::{DMatrix, DVector};
use trsqp::problem::NlpProblem;
use trsqp::solver::{solve_noiseless, SolverConfig};

fn main() -> trsqp::Result<()> {
    let target = DVector::from_vec(vec![3.0, 4.0]);
    let t_f = target.clone();
    let t_g = target.clone();

    let problem = NlpProblem::new(
        "CIRCLE_PROJECTION",
        2,
        1,
        DVector::from_vec(vec![1.0, 0.0]),
        move |x| (x - &t_f).norm_squared(),
        |x| DVector::from_vec(vec![x.norm_squared() - 1.0]),
        move |x| 2.0 * (x - &t_g),
        |x| DMatrix::from_row_slice(1, 2, &[2.0 * x[0], 2.0 * x[1]]),
        // W = hessian(f) - lambda * hessian(c) = 2I - 2 lambda I
        |_, l| DMatrix::from_diagonal_element(2, 2, 2.0 - 2.0 * l[0]),
    );

    let run = solve_noiseless(&problem, &SolverConfig::default())?;

    println!("status {:?} after {} iterations", run.status, run.iterations);
    println!("x      = ({:.10}, {:.10})", run.final_x[0], run.final_x[1]);
    println!("expect = ({:.10}, {:.10})", 0.6, 0.8);
    println!("lambda = {:.10}", run.final_lambda[0]);
    println!("||c||  = {:.3e}", problem.c(&run.final_x).norm());
    Ok(())
}
