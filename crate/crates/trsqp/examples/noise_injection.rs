//! What the noisy oracle guarantees: per-call fresh perturbations, hard
//! elementwise bounds, and bit-reproducible streams per seed.
//!
//! ```sh
//! cargo run --example noise_injection
//! ```

use trsqp::noise::{NoiseSpec, NoisyOracle, Oracle};
use trsqp::problem::builtin_problem;

fn main() -> trsqp::Result<()> {
    let problem = builtin_problem("HS7")?;
    let x = problem.x0().clone();
    let f_exact = problem.f(&x);
    let eps = 0.1;

    let mut oracle = NoisyOracle::new(problem.clone(), NoiseSpec::uniform(eps, 123))?;

    println!("exact f(x0) = {f_exact:.6}, eps_f = {eps}");
    println!("five draws at the same point (fresh noise each call):");
    for i in 0..5 {
        let f = oracle.eval_f(&x)?;
        println!("  call {i}: {f:.6}  (delta {:+.6})", f - f_exact);
    }

    // Hard bound over many draws.
    let mut worst: f64 = 0.0;
    for _ in 0..100_000 {
        let f = oracle.eval_f(&x)?;
        worst = worst.max((f - f_exact).abs());
    }
    println!("largest |delta| over 100000 draws: {worst:.6} (bound {eps})");

    // Same seed, same call sequence: identical bits.
    let mut a = NoisyOracle::new(problem.clone(), NoiseSpec::uniform(eps, 9))?;
    let mut b = NoisyOracle::new(problem.clone(), NoiseSpec::uniform(eps, 9))?;
    let identical = (0..1000).all(|_| {
        a.eval_f(&x).unwrap().to_bits() == b.eval_f(&x).unwrap().to_bits()
    });
    println!("two oracles with seed 9 agree bit-for-bit over 1000 calls: {identical}");

    // Zero noise is bit-transparent.
    let mut clean = NoisyOracle::new(problem.clone(), NoiseSpec::zero(77))?;
    println!(
        "zero-noise oracle returns exact values: {}",
        clean.eval_f(&x)?.to_bits() == f_exact.to_bits()
    );
    Ok(())
}
