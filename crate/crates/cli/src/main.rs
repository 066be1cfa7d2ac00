use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dopt_core::cli::commands::{cmd_certify, cmd_ellipsoid, cmd_eval_cd, cmd_solve, CommandOutput};
use dopt_core::cli::{CliError, EXIT_INPUT};

#[derive(Debug, Parser)]
#[command(name = "dopt", version, about = "D-optimal designs on semi-algebraic sets")]
struct Cli {
    /// Suppress the summary on stdout.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute an optimal design, its certificate and a validation audit.
    Solve {
        /// Problem configuration (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Grid nodes per axis for the audit.
        #[arg(long)]
        validation_resolution: Option<usize>,
    },
    /// Re-check the certificate stored in a report on a fresh grid.
    Certify {
        /// Report written by `solve`.
        #[arg(long)]
        report: PathBuf,
        /// Grid nodes per axis for the audit.
        #[arg(long)]
        validation_resolution: Option<usize>,
    },
    /// Tabulate the Christoffel-Darboux polynomial of a report on a grid.
    EvalCd {
        /// Problem configuration (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Report written by `solve`.
        #[arg(long)]
        report: PathBuf,
        /// Grid nodes per axis for the audit.
        #[arg(long)]
        validation_resolution: Option<usize>,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extract the minimum-volume enclosing ellipsoid from a degree-1 report.
    Ellipsoid {
        /// Report written by `solve`.
        #[arg(long)]
        report: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cmd: &Command) -> Result<CommandOutput, CliError> {
    match cmd {
        Command::Solve {
            config,
            out,
            validation_resolution,
        } => cmd_solve(config, out.as_deref(), *validation_resolution),
        Command::Certify {
            report,
            validation_resolution,
        } => cmd_certify(report, *validation_resolution),
        Command::EvalCd {
            config,
            report,
            validation_resolution,
            out,
        } => cmd_eval_cd(config, report, *validation_resolution, out.as_deref()),
        Command::Ellipsoid { report, out } => cmd_ellipsoid(report, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            return ExitCode::from(code as u8);
        }
    };
    match run(&cli.command) {
        Ok(out) => {
            if !cli.quiet {
                print!("{}", out.summary);
            }
            ExitCode::from(out.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
