//! Verify hand-coded derivatives against central finite differences, and
//! show that an injected gradient bug is caught.
//!
//! ```sh
//! cargo run --example derivative_check
//! ```

use nalgebra::DVector;
use trsqp::fd::{check_derivatives, default_step};
use trsqp::problem::{builtin_problem, NlpProblem, BUILTIN_NAMES};

fn main() -> trsqp::Result<()> {
    for name in BUILTIN_NAMES {
        let p = builtin_problem(name)?;
        let x = p.x0().clone();
        let r = check_derivatives(&p, &x, default_step(&x));
        println!(
            "{:<20} max rel err  g {:.2e}  A {:.2e}  W {:.2e}  -> {}",
            name,
            r.max_rel_g,
            r.max_rel_a,
            r.max_rel_w,
            if r.is_clean() { "clean" } else { "FLAGGED" }
        );
    }

    // Sabotage one gradient entry and watch the checker flag it.
    let base = builtin_problem("HS6")?;
    let broken = NlpProblem::new(
        "HS6_BROKEN",
        2,
        1,
        base.x0().clone(),
        {
            let p = base.clone();
            move |x: &DVector<f64>| p.f(x)
        },
        {
            let p = base.clone();
            move |x: &DVector<f64>| p.c(x)
        },
        {
            let p = base.clone();
            move |x: &DVector<f64>| {
                let mut g = p.g(x);
                g[1] += 0.5; // wrong on purpose
                g
            }
        },
        {
            let p = base.clone();
            move |x: &DVector<f64>| p.jacobian(x)
        },
        {
            let p = base.clone();
            move |x: &DVector<f64>, l: &DVector<f64>| p.lagrangian_hessian(x, l)
        },
    );
    let x = broken.x0().clone();
    let r = check_derivatives(&broken, &x, default_step(&x));
    println!("\nsabotaged HS6 gradient:");
    for flag in &r.flags {
        println!(
            "  flagged {}[{},{}]: analytic {:.4}, finite-diff {:.4}, rel err {:.2e}",
            flag.block, flag.row, flag.col, flag.analytic, flag.finite_diff, flag.rel_error
        );
    }
    Ok(())
}
