mod commands;
mod config;
mod error;
mod manifest;

use clap::{Parser, Subcommand};

use commands::{CheckArgs, ExamplesArgs, FixpointArgs, Global, MetrizeArgs, TransferArgs};

/// Metrization of cone metric spaces.
#[derive(Parser, Debug)]
#[command(name = "conemetric", version)]
struct Cli {
    /// Seed for every randomized step
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Cone membership tolerance (overrides the space file)
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Suppress reports on stdout
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the metrized distance matrix as CSV
    Metrize(MetrizeArgs),
    /// Validate the cone, the cone metric axioms and the metric axioms of d
    Check(CheckArgs),
    /// Check that a contractive condition transfers from D to d
    Transfer(TransferArgs),
    /// Run Picard iteration with metrized stopping
    Fixpoint(FixpointArgs),
    /// Materialize a built-in example and compare closed form with solver
    Examples(ExamplesArgs),
}

fn main() {
    let cli = Cli::parse();
    let g = Global {
        seed: cli.seed,
        tolerance: cli.tolerance,
        quiet: cli.quiet,
    };
    let result = match &cli.command {
        Command::Metrize(a) => commands::metrize(a, &g),
        Command::Check(a) => commands::check(a, &g),
        Command::Transfer(a) => commands::transfer(a, &g),
        Command::Fixpoint(a) => commands::fixpoint(a, &g),
        Command::Examples(a) => commands::examples(a, &g),
    };
    let code = result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        commands::EXIT_INVALID
    });
    std::process::exit(code);
}
