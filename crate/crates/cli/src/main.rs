//! Batch front-end: spectra, identity verification, canonical solvers, and
//! weighted moment tables, with machine-readable reports.
//!
//! Exit status: 0 = all checks pass, 1 = verification failure, 2 = usage or
//! parse error.

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

mod moments;
mod report;
mod solve;
mod spectrum;
mod verify;

use report::OutputFormat;

#[derive(Parser)]
#[command(
    name = "fock-complex",
    version,
    about = "Operator calculus on the Fock space: spectra, estimates, canonical solvers"
)]
pub struct Cli {
    /// Output format for reports.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,

    /// Relative tolerance override for float-path checks.
    #[arg(long, global = true)]
    tolerance: Option<f64>,

    /// Seed for the randomized suites (recorded in the output).
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    /// Write the report to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic spectrum of the complex Laplacian, with optional numeric
    /// cross-check of the finite section.
    Spectrum {
        /// Ambient dimension n >= 1.
        #[arg(long)]
        n: usize,
        /// Form degree 0 <= p <= n.
        #[arg(long)]
        p: usize,
        /// Largest homogeneous degree m in the table.
        #[arg(long, default_value_t = 6)]
        mmax: u32,
        /// Diagonalize the assembled finite section and cross-check.
        #[arg(long)]
        verify: bool,
    },
    /// Run a seeded verification suite; exit 0 iff every residual is within
    /// tolerance.
    Verify {
        /// Which invariant suite to run.
        #[arg(value_enum)]
        suite: verify::Suite,
        /// Ambient dimension n >= 1.
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Form degree (suites on forms).
        #[arg(long, default_value_t = 1)]
        p: usize,
        /// Maximal polynomial degree of the sampled inputs.
        #[arg(long, default_value_t = 4)]
        degree: u32,
        /// Number of seeded random cases.
        #[arg(long, default_value_t = 50)]
        cases: usize,
        /// Weight specification, e.g. "1|z|^4" or "1|z1|^2 + 2|z2|^4".
        #[arg(long)]
        weight: Option<String>,
        /// Comma-separated component operators, e.g. "d1^2,d2^2".
        #[arg(long)]
        ops: Option<String>,
    },
    /// Canonical solutions of the inhomogeneous equations.
    Solve {
        /// Which equation to solve.
        #[arg(value_enum)]
        solver: solve::Solver,
        /// Input form file (PForm JSON schema).
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated component operators for the `d`/`dstar` solvers.
        #[arg(long)]
        ops: Option<String>,
        /// Galerkin degree window.
        #[arg(long, default_value_t = 8)]
        truncation: u32,
    },
    /// Radial moment table for a weight, with the adaptive-quadrature
    /// cross-check.
    Moments {
        /// Weight specification, e.g. "1|z|^4".
        #[arg(long)]
        weight: String,
        /// Largest moment index k in the table.
        #[arg(long, default_value_t = 16)]
        kmax: u32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Spectrum { n, p, mmax, verify } => spectrum::run(&cli, *n, *p, *mmax, *verify),
        Command::Verify {
            suite,
            n,
            p,
            degree,
            cases,
            weight,
            ops,
        } => verify::run(
            &cli,
            *suite,
            verify::Config {
                n: *n,
                p: *p,
                degree: *degree,
                cases: *cases,
                weight: weight.clone(),
                ops: ops.clone(),
            },
        ),
        Command::Solve {
            solver,
            input,
            ops,
            truncation,
        } => solve::run(&cli, *solver, input, ops.as_deref(), *truncation),
        Command::Moments { weight, kmax } => moments::run(&cli, weight, *kmax),
    };
    match outcome {
        Ok(passed) => {
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(report::CliError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(report::CliError::Failed(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}
