use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use constrained_sampling::harness::{
    self, default_lambdas, gaussian_ball_study, load_config, run_experiment, write_outputs, HarnessError, RunConfig,
};
use constrained_sampling::samplers::Algorithm;
use constrained_sampling::schedules::{select_parameters, Metric, ScheduleRequest};

#[derive(Parser)]
#[command(name = "constrained-sampling", version, about = "Langevin sampling on convex bodies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// TOML or JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run a single seed instead of the configured list.
    #[arg(long)]
    seed: Option<u64>,
    /// Also write scatter plots.
    #[arg(long)]
    svg: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration and write its outputs.
    Sample(RunArgs),
    /// Run several algorithms and print a per-algorithm summary.
    Compare(RunArgs),
    /// Tabulate W_q(ν, ν^λ) against λ on the Gaussian-on-ball family.
    ValidateRates {
        /// Ball radius.
        #[arg(long, default_value_t = 0.5)]
        radius: f64,
    },
    /// Print λ, h, n and γ for a target accuracy.
    Schedule {
        #[arg(long)]
        algo: Algorithm,
        #[arg(long, default_value = "W2")]
        metric: Metric,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 2)]
        p: usize,
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        #[arg(long = "big-m", default_value_t = 1.0)]
        big_m: f64,
        /// Smoothness constant of the penalty (2 for the Euclidean one).
        #[arg(long, default_value_t = 2.0)]
        m0: f64,
        #[arg(long, default_value_t = 1.0)]
        user_constant: f64,
    },
}

fn prepare(args: &RunArgs) -> Result<RunConfig, HarnessError> {
    let mut cfg = load_config(&args.config)?;
    if let Some(out) = &args.out {
        cfg.output_dir = out.clone();
    }
    if let Some(seed) = args.seed {
        cfg.seeds = vec![seed];
    }
    cfg.emit_svg |= args.svg;
    Ok(cfg)
}

fn run(args: &RunArgs, summary: bool) -> Result<(), HarnessError> {
    let cfg = prepare(args)?;
    let body = cfg.resolve()?.body;
    match run_experiment(&cfg) {
        Ok(report) => {
            let written = write_outputs(&report, &body, &cfg.output_dir)?;
            if summary {
                println!("{:<8} {:>12} {:>12} {:>12}", "algo", "median_w1", "median_w2", "median_ms");
                for (algo, m) in report.aggregates() {
                    println!(
                        "{:<8} {:>12.5} {:>12.5} {:>12.1}",
                        algo,
                        m.get("median_w1").copied().unwrap_or(f64::NAN),
                        m.get("median_w2").copied().unwrap_or(f64::NAN),
                        m.get("median_wall_ms").copied().unwrap_or(f64::NAN),
                    );
                }
            }
            println!("wrote {} files to {}", written.len(), cfg.output_dir.display());
            Ok(())
        }
        Err(failure) => {
            if let Err(e) = write_outputs(&failure.partial, &body, &cfg.output_dir) {
                log::error!("could not flush partial results: {e}");
            }
            Err(failure.error)
        }
    }
}

fn validate_rates(radius: f64) -> Result<(), HarnessError> {
    let lambdas = default_lambdas();
    for (p, q) in [(1, 1.0), (2, 2.0), (2, 3.0)] {
        let study = gaussian_ball_study(p, q, radius, &lambdas)?;
        println!("p={p} q={q} slope={:.4} (1/p+1/q={:.4})", study.slope, 1.0 / p as f64 + 1.0 / q);
        for (l, w) in &study.pairs {
            println!("  lambda={l:<12} W={w:.6e} W/lambda={:.4}", w / l);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sample(args) => run(&args, false),
        Command::Compare(args) => run(&args, true),
        Command::ValidateRates { radius } => validate_rates(radius),
        Command::Schedule {
            algo,
            metric,
            epsilon,
            p,
            m,
            big_m,
            m0,
            user_constant,
        } => {
            let req = ScheduleRequest {
                algo,
                metric,
                epsilon,
                p,
                m,
                big_m,
                m0,
                user_constant,
            };
            select_parameters(&req)
                .map(|plan| print!("{plan}"))
                .map_err(|e| match e {
                    constrained_sampling::Error::InvalidArgument(msg) => HarnessError::Validation(vec![msg]),
                    other => harness::HarnessError::Run(other),
                })
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
