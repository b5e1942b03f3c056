use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use edgemig::commands::{self, RunContext};
use edgemig::config::{self, SolveMethod};
use edgemig::output::OutputFormat;
use edgemig::AppError;

/// Service migration policies for mobile edge clouds.
///
/// Logging goes to stderr; set EDGEMIG_LOG (e.g. `debug`, `warn`) to change
/// the level.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    /// TOML run configuration.
    #[arg(long, short, global = true, default_value = "edgemig.toml")]
    config: PathBuf,
    /// Overrides the config's `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides the config's `out`.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    /// Format of tabular outputs.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal policy of the distance MDP.
    #[command(name = "solve-1d")]
    Solve1d,
    /// Exact and/or approximate policy of the hexagon MDP.
    #[command(name = "solve-2d")]
    Solve2d {
        /// Overrides `solve_2d.method`.
        #[arg(long, value_enum)]
        method: Option<SolveMethod>,
    },
    /// Average cost of every policy over a parameter grid.
    Sweep,
    /// Constant-plus-exponential fit of a tabulated cost.
    Fit,
    /// Trace-driven or synthetic simulation of all policies.
    Simulate,
}

fn run(cli: &Cli) -> Result<PathBuf, AppError> {
    let cfg = config::load(&cli.config)?;
    let ctx = RunContext::resolve(&cfg, cli.out.clone(), cli.seed, cli.format);
    match cli.command {
        Command::Solve1d => commands::solve_1d(&cfg, &ctx),
        Command::Solve2d { method } => commands::solve_2d(&cfg, &ctx, method),
        Command::Sweep => commands::sweep(&cfg, &ctx),
        Command::Fit => commands::fit(&cfg, &ctx),
        Command::Simulate => commands::simulate(&cfg, &ctx),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("EDGEMIG_LOG", "info")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(manifest) => {
            log::info!("wrote {}", manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
