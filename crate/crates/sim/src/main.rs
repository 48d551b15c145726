use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sim::config::{self, Study};
use sim::error::SimError;
use sim::{run_scenario, validate_config, RunOptions};

#[derive(Parser)]
#[command(name = "sim", version, about = "Run collapse-model scenarios and write CSV/JSON artifacts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; defaults to the config's `output.directory`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = "SIM_THREADS")]
    threads: Option<usize>,
    /// Record the generation time in artifact headers.
    #[arg(long)]
    timestamp: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Clump-basis density matrix against time.
    Decoherence(RunArgs),
    /// Particle and energy production per mode.
    Production(RunArgs),
    /// Single-mode position kernel on a lattice at multiples of the period.
    Kernel(RunArgs),
    /// Field-basis density-matrix exponents for the clump fields.
    FieldExponent(RunArgs),
    /// Oracle integration against the closed forms; writes a JSON report.
    OracleCheck(RunArgs),
    /// Check a config without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn run(study: Study, args: RunArgs) -> Result<(), SimError> {
    let cfg = config::load(&args.config)?;
    let threads = args.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let opts = RunOptions { out_dir: args.out, threads, timestamp: args.timestamp };
    for path in run_scenario(study, &cfg, &opts)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Decoherence(a) => run(Study::Decoherence, a),
        Command::Production(a) => run(Study::Production, a),
        Command::Kernel(a) => run(Study::Kernel, a),
        Command::FieldExponent(a) => run(Study::FieldExponent, a),
        Command::OracleCheck(a) => run(Study::OracleCheck, a),
        Command::Validate { config } => match validate_config(&config) {
            Ok(report) => {
                println!("{}", report.to_json());
                return if report.is_valid() { ExitCode::SUCCESS } else { ExitCode::from(2) };
            }
            Err(e) => Err(e),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
