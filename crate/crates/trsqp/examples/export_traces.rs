//! Trace serialization: full-precision CSV, JSON with a provenance header,
//! lossless JSON round trip, and byte-identical reruns.
//!
//! ```sh
//! cargo run --example export_traces
//! ```

use trsqp::harness::{
    read_trace_bytes, read_trace_json, run_experiment, ExperimentSpec, OutputFormat, RunMode,
};
use trsqp::noise::NoiseSpec;

fn main() -> trsqp::Result<()> {
    let dir = std::env::temp_dir().join("trsqp_export_example");

    let mut spec = ExperimentSpec::new("HS6");
    spec.noise = NoiseSpec::uniform(0.05, 2024);
    spec.modes = vec![RunMode::RelaxedNoisy];
    spec.config.max_iter = 50;
    spec.format = OutputFormat::Json;
    spec.out_dir = dir.clone();

    let results = run_experiment(&spec)?;
    let (summary, trace) = &results[0];
    println!("ran {} ({} iterations, status {:?})", spec.problem, summary.iterations, summary.status);

    // Read the JSON back and compare bits.
    let path = dir.join("trace_HS6_relaxed_rep0.json");
    let (header, rows) = read_trace_json(&path)?;
    println!("json header present: {}", header.is_some());
    let lossless = trace
        .records
        .iter()
        .zip(rows.iter())
        .all(|(a, b)| a.rho.to_bits() == b.rho.to_bits() && a.pred.to_bits() == b.pred.to_bits());
    println!("round trip reproduced every float bit-for-bit: {lossless}");

    // Re-run the identical spec and byte-compare the trace file.
    let first = read_trace_bytes(&spec, RunMode::RelaxedNoisy, 0)?;
    run_experiment(&spec)?;
    let second = read_trace_bytes(&spec, RunMode::RelaxedNoisy, 0)?;
    println!("rerun produced identical bytes: {}", first == second);

    // CSV variant for plotting tools.
    spec.format = OutputFormat::Csv;
    run_experiment(&spec)?;
    let csv = String::from_utf8(read_trace_bytes(&spec, RunMode::RelaxedNoisy, 0)?).unwrap();
    println!("\nfirst two CSV lines:");
    for line in csv.lines().take(2) {
        println!("  {line}");
    }
    println!("\nfiles in {}", dir.display());
    Ok(())
}
