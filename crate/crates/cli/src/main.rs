//! `burg`: run experiments, the verification suite, and ad-hoc exponent fits.

mod fit;

use std::path::PathBuf;
use std::process::ExitCode;

use burgers_core::harness::{
    parse_config, run_experiment, verify_suite, Check, VerifyLevel, VerifyOptions,
};
use burgers_core::Error;
use clap::{Parser, Subcommand};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Threads(String),
    #[error("{0} check(s) failed")]
    Verification(usize),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numerical() => 2,
            CliError::Verification(_) => 3,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "burg", version, about = "Stochastic Burgers turbulence simulator")]
struct Cli {
    /// Overrides the noise seed of the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the output directory.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads; BURG_THREADS takes precedence.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the experiment described by a configuration file.
    Simulate { config: PathBuf },
    /// Run the self-verification suite.
    Verify {
        /// Also run the viscosity-sweep scaling experiments.
        #[arg(long)]
        full: bool,
        /// Ensemble size of the full-level experiments.
        #[arg(long, default_value_t = 8)]
        ensemble: usize,
    },
    /// Fit a power law y ≈ C x^a to two columns of a CSV file.
    Fit {
        csv: PathBuf,
        #[arg(long, value_parser = fit::parse_range)]
        range: (f64, f64),
        /// Abscissa column, by header or zero-based index.
        #[arg(long, default_value = "0")]
        x: String,
        /// Ordinate column, by header or zero-based index.
        #[arg(long, default_value = "1")]
        y: String,
    },
    /// Print the version.
    Version,
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    match std::env::var("BURG_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| CliError::Threads(format!("BURG_THREADS=`{v}` is not a positive integer"))),
        Err(_) => match flag {
            Some(0) => Err(CliError::Threads("--threads must be positive".into())),
            other => Ok(other),
        },
    }
}

fn print_checks(checks: &[Check]) {
    for c in checks {
        println!(
            "{} {:<32} {:>14.6e}  [{}, {}]  {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.band.0,
            c.band.1,
            c.detail
        );
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = thread_count(cli.threads)? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Threads(e.to_string()))?;
    }
    match cli.command {
        Command::Simulate { config } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| CliError::Input(format!("{}: {e}", config.display())))?;
            let mut cfg = parse_config(&text)?;
            if let Some(seed) = cli.seed {
                cfg.noise.seed = seed;
            }
            if let Some(dir) = cli.out_dir {
                cfg.output.dir = dir;
            }
            let report = run_experiment(&cfg)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            print_checks(&report.checks);
            println!(
                "{} steps in {:.1} s; results in {}",
                report.total_steps,
                report.wall_clock_seconds,
                cfg.output.dir.display()
            );
            Ok(())
        }
        Command::Verify { full, ensemble } => {
            let mut options = VerifyOptions {
                ensemble_size: ensemble,
                ..VerifyOptions::default()
            };
            if let Some(seed) = cli.seed {
                options.seed = seed;
            }
            if let Some(dir) = cli.out_dir {
                options.out_dir = dir;
            }
            let level = if full { VerifyLevel::Full } else { VerifyLevel::Quick };
            let report = verify_suite(level, &options);
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            print_checks(&report.checks);
            let failed = report.checks.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                return Err(CliError::Verification(failed));
            }
            Ok(())
        }
        Command::Fit { csv, range, x, y } => {
            let f = fit::run(&csv, range, &x, &y)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&f).expect("fit serializes")
            );
            Ok(())
        }
        Command::Version => {
            println!("burg {}", env!("CARGO_PKG_VERSION"));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
