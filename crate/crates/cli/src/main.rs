//! `elastica`: classify, close and measure constrained elastic curves and
//! their Willmore tori from the command line.

mod commands;
mod config;

use clap::{Parser, Subcommand};
use config::{JobArgs, JobConfig, UsageError};
use std::io::Write;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "elastica", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Discriminant, roots of P₄, solution class and existence verdict.
    Classify(JobArgs),
    /// Solve the closing condition for (m, n).
    Solve(JobArgs),
    /// Sample the closed curve as CSV.
    Curve(JobArgs),
    /// Export the torus mesh as Wavefront OBJ.
    Torus(JobArgs),
    /// Willmore energy, conformal class, area and CMC type.
    Report(JobArgs),
    /// Run the invariant-check suite.
    Check(JobArgs),
}

fn run(cmd: &Command) -> anyhow::Result<(Option<std::path::PathBuf>, commands::Output)> {
    let (args, f): (&JobArgs, fn(&JobConfig) -> anyhow::Result<commands::Output>) = match cmd {
        Command::Classify(a) => (a, commands::classify),
        Command::Solve(a) => (a, commands::solve),
        Command::Curve(a) => (a, commands::curve),
        Command::Torus(a) => (a, commands::torus),
        Command::Report(a) => (a, commands::report),
        Command::Check(a) => (a, commands::check),
    };
    let cfg = JobConfig::resolve(args)?;
    let out = f(&cfg)?;
    Ok((cfg.out, out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli.command).and_then(|(path, out)| {
        match path {
            Some(p) => std::fs::write(&p, &out.body)
                .map_err(|e| anyhow::anyhow!("writing {}: {e}", p.display()))?,
            None => std::io::stdout().write_all(&out.body)?,
        }
        Ok(out.code)
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
