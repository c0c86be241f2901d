//! Run one of the stock experiment scenarios end to end: seeded
//! repetitions across all three modes, trace files, and a summary index.
//!
//! ```sh
//! cargo run --example run_scenario [small-delta0|mid-run-collapse|benign]
//! ```

use trsqp::harness::{run_experiment, scenario, Scenario};

fn main() -> trsqp::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "small-delta0".to_string());
    let which: Scenario = name.parse()?;

    let mut spec = scenario(which);
    spec.repetitions = 3; // keep the example quick; the default is 10
    spec.out_dir = std::env::temp_dir().join("trsqp_scenario_example");

    println!(
        "problem {} | noise 0.1 uniform | delta0 {:.1e} | {} reps x {} modes",
        spec.problem,
        spec.config.delta0,
        spec.repetitions,
        spec.modes.len()
    );

    let results = run_experiment(&spec)?;
    for (s, trace) in &results {
        println!(
            "{:<8} rep {}: {:<12} iters {:<4} final ||c|| {:.3e}  final f {:.6}  rows {}",
            s.mode.to_string(),
            s.rep,
            s.status.to_string(),
            s.iterations,
            s.final_feas_true,
            s.final_f_true,
            trace.len()
        );
    }
    println!("\ntraces + summary.json in {}", spec.out_dir.display());
    Ok(())
}
