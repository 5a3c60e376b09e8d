use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nslab_cli::{commands, CliError, EXIT_USAGE};

#[derive(Parser)]
#[command(name = "nslab", version, about = "Spectral Navier-Stokes runs and estimate verification on the 3-torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one configuration and write the trajectory artifacts.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run inequality checks on a trajectory CSV.
    Verify {
        trajectory: PathBuf,
        /// Comma-separated subset of energy,ds,ddn,agmon,weak, or `all`.
        #[arg(long, default_value = "all")]
        checks: String,
        /// Agmon constant; calibrated numerically when omitted.
        #[arg(long)]
        c: Option<f64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the regularity-epoch report of a trajectory.
    Epochs {
        trajectory: PathBuf,
        /// Per-time convergence flags CSV from `converge`.
        #[arg(long)]
        flags: Option<PathBuf>,
        #[arg(long)]
        eta: f64,
        /// Agmon constant; calibrated numerically when omitted.
        #[arg(long)]
        c: Option<f64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a configuration at several levels and compare consecutive pairs.
    Converge {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated, strictly increasing cutoffs or mollification indices.
        #[arg(long)]
        levels: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate the Agmon-type interpolation constant from random fields.
    EstimateConstant {
        #[arg(long = "resolution", default_value_t = 16)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn limit_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("NS_LAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Usage(format!("NS_LAB_THREADS must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn dispatch(cli: Cli) -> Result<u8, CliError> {
    limit_threads()?;
    match cli.command {
        Command::Simulate { config, out } => commands::simulate(&config, out.as_deref()),
        Command::Verify {
            trajectory,
            checks,
            c,
            seed,
            out,
        } => commands::verify(&trajectory, &checks, c, seed, out.as_deref()),
        Command::Epochs {
            trajectory,
            flags,
            eta,
            c,
            seed,
            out,
        } => commands::epochs(&trajectory, flags.as_deref(), eta, c, seed, out.as_deref()),
        Command::Converge { config, levels, out } => commands::converge(&config, &levels, out.as_deref()),
        Command::EstimateConstant { n, trials, seed, out } => commands::estimate_constant(n, trials, seed, out.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
