//! Thin command-line front end over the library: ad-hoc experiment runs,
//! the stock scenarios, and a self-check over the built-in problems.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use trsqp::error::Error;
use trsqp::fd::{check_derivatives, default_step};
use trsqp::harness::{
    any_aborted, run_experiment, scenario, ExperimentSpec, OutputFormat, RunMode, RunSummary,
    Scenario, DEFAULT_SEED,
};
use trsqp::noise::{NoiseDistribution, NoiseSpec, NoisyOracle};
use trsqp::problem::{builtin_problem, BUILTIN_NAMES};
use trsqp::rng::{uniform_symmetric, ChaCha8Rng};
use trsqp::solver::{run_solver, Mode, SolverConfig};

#[derive(Parser)]
#[command(
    name = "trsqp",
    about = "Noise-tolerant trust-region SQP runner",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by flags.
    Run(RunArgs),
    /// Run one of the stock scenarios (small-delta0, mid-run-collapse,
    /// benign).
    Scenario(ScenarioArgs),
    /// Verify derivatives and solver invariants on the built-in problems.
    Check,
}

#[derive(Args)]
struct RunArgs {
    /// Problem name, e.g. HS7 or QUAD_LIN(3) or QUAD_LIN(6,2,17).
    #[arg(long)]
    problem: String,
    /// Solver mode; repeat the flag to run several.
    #[arg(long = "mode", value_parser = parse_mode, default_values_t = vec![RunMode::RelaxedNoisy])]
    modes: Vec<RunMode>,
    #[arg(long, default_value_t = 0.0)]
    eps_f: f64,
    #[arg(long, default_value_t = 0.0)]
    eps_c: f64,
    #[arg(long, default_value_t = 0.0)]
    eps_g: f64,
    #[arg(long = "eps-a", default_value_t = 0.0)]
    eps_a: f64,
    #[arg(long = "eps-w", default_value_t = 0.0)]
    eps_w: f64,
    /// Noise distribution: uniform or gaussian.
    #[arg(long, default_value = "uniform", value_parser = parse_dist)]
    dist: NoiseDistribution,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    delta0: f64,
    #[arg(long, default_value_t = 0.25)]
    pi0: f64,
    #[arg(long, default_value_t = 0.3)]
    pi1: f64,
    #[arg(long, default_value_t = 0.8)]
    zeta: f64,
    #[arg(long, default_value_t = 2.0)]
    tau: f64,
    /// Initial penalty parameter.
    #[arg(long = "nu0", default_value_t = 1.0)]
    nu0: f64,
    #[arg(long = "max-iters", default_value_t = 500)]
    max_iters: usize,
    #[arg(long, default_value_t = 1)]
    reps: u32,
    /// Output directory for traces and the summary index.
    #[arg(long, default_value = "trsqp_out")]
    out: PathBuf,
    /// Trace format: csv or json.
    #[arg(long, default_value = "csv", value_parser = parse_format)]
    format: OutputFormat,
}

#[derive(Args)]
struct ScenarioArgs {
    /// small-delta0 | mid-run-collapse | benign
    name: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    reps: Option<u32>,
    #[arg(long, default_value = "trsqp_out")]
    out: PathBuf,
    #[arg(long, default_value = "csv", value_parser = parse_format)]
    format: OutputFormat,
}

fn parse_mode(s: &str) -> Result<RunMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_dist(s: &str) -> Result<NoiseDistribution, String> {
    match s.to_ascii_lowercase().as_str() {
        "uniform" => Ok(NoiseDistribution::Uniform),
        "gaussian" => Ok(NoiseDistribution::Gaussian),
        other => Err(format!("unknown distribution '{other}'")),
    }
}

fn print_summary(s: &RunSummary) {
    println!(
        "{:<22} {:<8} rep {:<2} {:<15} iters {:<4} f {:<12.6} ||c|| {:<10.3e} opt {:<10.3e} nu {:<8} wall {:?}",
        s.problem,
        s.mode,
        s.rep,
        s.status.to_string(),
        s.iterations,
        s.final_f_true,
        s.final_feas_true,
        s.final_opt_true,
        s.final_nu,
        s.wall_time
    );
}

fn execute_spec(spec: &ExperimentSpec) -> Result<ExitCode, Error> {
    let results = run_experiment(spec)?;
    for (summary, _) in &results {
        print_summary(summary);
    }
    println!(
        "wrote {} trace file(s) and summary.json to {}",
        results.len(),
        spec.out_dir.display()
    );
    if any_aborted(&results) {
        Ok(ExitCode::from(3))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn cmd_run(args: RunArgs) -> Result<ExitCode, Error> {
    let mut spec = ExperimentSpec::new(args.problem);
    spec.noise = NoiseSpec {
        eps_f: args.eps_f,
        eps_c: args.eps_c,
        eps_g: args.eps_g,
        eps_a: args.eps_a,
        eps_w: args.eps_w,
        distribution: args.dist,
        seed: args.seed,
    };
    spec.config = SolverConfig {
        delta0: args.delta0,
        pi0: args.pi0,
        pi1: args.pi1,
        zeta: args.zeta,
        tau: args.tau,
        nu_init: args.nu0,
        max_iter: args.max_iters,
        ..SolverConfig::default()
    };
    spec.modes = args.modes;
    spec.repetitions = args.reps;
    spec.out_dir = args.out;
    spec.format = args.format;
    execute_spec(&spec)
}

fn cmd_scenario(args: ScenarioArgs) -> Result<ExitCode, Error> {
    let which: Scenario = args.name.parse()?;
    let mut spec = scenario(which);
    if let Some(seed) = args.seed {
        spec.noise.seed = seed;
    }
    if let Some(reps) = args.reps {
        spec.repetitions = reps;
    }
    spec.out_dir = args.out;
    spec.format = args.format;
    execute_spec(&spec)
}

fn cmd_check() -> Result<ExitCode, Error> {
    use rand_core::SeedableRng;
    let mut failures = 0usize;

    // Derivative consistency at x0 and perturbed points.
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let mut check_problem = |p: &trsqp::NlpProblem| {
        let mut clean = true;
        let x0 = p.x0().clone();
        let report = check_derivatives(p, &x0, default_step(&x0));
        clean &= report.is_clean();
        for _ in 0..10 {
            let x = nalgebra::DVector::from_fn(p.n(), |i, _| {
                x0[i] + 0.5 * uniform_symmetric(&mut rng)
            });
            clean &= check_derivatives(p, &x, default_step(&x)).is_clean();
        }
        clean
    };
    for name in BUILTIN_NAMES {
        let p = builtin_problem(name)?;
        let ok = check_problem(&p);
        println!("check derivatives {:<20} {}", name, if ok { "PASS" } else { "FAIL" });
        failures += usize::from(!ok);
    }
    let p = builtin_problem("QUAD_LIN(3)")?;
    let ok = check_problem(&p);
    println!("check derivatives {:<20} {}", "QUAD_LIN(3)", if ok { "PASS" } else { "FAIL" });
    failures += usize::from(!ok);

    // Noiseless mode equivalence and certified margins on short runs.
    let mut ok = true;
    for name in BUILTIN_NAMES {
        let p = builtin_problem(name)?;
        let mut cfg = SolverConfig {
            max_iter: 50,
            ..SolverConfig::default()
        };
        cfg.mode = Mode::Relaxed;
        let mut o = NoisyOracle::new(p.clone(), NoiseSpec::zero(1))?;
        let r1 = run_solver(&mut o, &cfg)?;
        cfg.mode = Mode::Classic;
        let mut o = NoisyOracle::new(p.clone(), NoiseSpec::zero(1))?;
        let r2 = run_solver(&mut o, &cfg)?;
        ok &= r1.trace.len() == r2.trace.len() && r1.final_x == r2.final_x;
        for rec in r1.trace.records.iter().chain(r2.trace.records.iter()) {
            ok &= rec.cauchy_margin_normal >= -1e-8 && rec.cauchy_margin_tangential >= -1e-8;
        }
    }
    println!(
        "check noiseless-equivalence + margins  {}",
        if ok { "PASS" } else { "FAIL" }
    );
    failures += usize::from(!ok);

    if failures == 0 {
        println!("all checks passed");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("{failures} check(s) failed");
        Ok(ExitCode::from(3))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Scenario(args) => cmd_scenario(args),
        Command::Check => cmd_check(),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
