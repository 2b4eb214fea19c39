use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use readease_cli::commands::{self, AnnotateArgs, EvalArgs, Globals, InputArgs, PlotArgs, SelectArgs};
use readease_cli::{exit_code, Format};
use tracing_subscriber::EnvFilter;

/// Readability scoring evaluated against eye-tracking reading ease.
#[derive(Parser)]
#[command(name = "readease", version)]
struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every resampling stream.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Descriptive statistics of the original and simplified levels.
    Stats(InputArgs),
    /// Per-unit readability scores.
    Score {
        #[command(flatten)]
        inputs: InputArgs,
        #[command(flatten)]
        select: SelectArgs,
    },
    /// Participant-averaged reading-ease measures per unit.
    Eye {
        #[command(flatten)]
        inputs: InputArgs,
        #[command(flatten)]
        select: SelectArgs,
    },
    /// Correlate score deltas with reading-ease deltas.
    Eval(EvalArgs),
    /// SVG figures from an eval results file.
    Plot(PlotArgs),
    /// Collect readability ratings from a chat model.
    Annotate(AnnotateArgs),
    /// Validate input files against the corpus.
    Ingest(InputArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("warn")))
        .with_writer(std::io::stderr)
        .init();
    let g = Globals {
        config: cli.config,
        seed: cli.seed,
        out: cli.out,
        format: cli.format,
    };
    let result = match &cli.command {
        Command::Stats(inputs) => commands::stats(&g, inputs),
        Command::Score { inputs, select } => commands::score(&g, inputs, select),
        Command::Eye { inputs, select } => commands::eye(&g, inputs, select),
        Command::Eval(args) => commands::eval(&g, args),
        Command::Plot(args) => commands::plot(&g, args),
        Command::Annotate(args) => commands::annotate(&g, args),
        Command::Ingest(inputs) => commands::ingest(&g, inputs),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
