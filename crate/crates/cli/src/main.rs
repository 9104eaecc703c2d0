//! `gaptile`: construct, search, verify and draw interval tilings.

mod catalog;
mod commands;
mod render;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Failure;

#[derive(Parser)]
#[command(
    name = "gaptile",
    version,
    about = "Tilings of integer intervals by gap-permuted tiles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a tiling with the staged construction.
    Construct(commands::ConstructArgs),
    /// Search for a tiling of one interval length.
    Solve(commands::SolveArgs),
    /// Find the shortest tileable interval.
    Minlen(commands::MinlenArgs),
    /// Check a tiling file.
    Verify(commands::VerifyArgs),
    /// Draw a tiling as SVG or text.
    Render(render::RenderArgs),
    /// Run the oracle over every small gap set, resumably.
    Catalog(catalog::CatalogArgs),
    /// Minimal rectangle heights for unit-step paths.
    Fvalue(commands::FvalueArgs),
    /// Write one of the explicit rectangle tilings.
    Pattern(commands::PatternArgs),
    /// Evaluate known sufficient conditions for a gap set.
    Conditions(commands::ConditionsArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // help and version requests are not errors
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Construct(a) => commands::construct(a),
        Command::Solve(a) => commands::solve(a),
        Command::Minlen(a) => commands::minlen(a),
        Command::Verify(a) => commands::verify(a),
        Command::Render(a) => render::run(a),
        Command::Catalog(a) => catalog::run(a),
        Command::Fvalue(a) => commands::fvalue(a),
        Command::Pattern(a) => commands::pattern(a),
        Command::Conditions(a) => commands::conditions(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
