//! Report emission: deterministic JSON/CSV output and exit-status plumbing.

use clap::ValueEnum;
use std::io::Write;

use crate::Cli;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

/// CLI failure modes mapped onto the exit-status contract.
#[derive(Debug)]
pub enum CliError {
    /// Exit 2: invalid configuration, unreadable input, parse errors.
    Usage(String),
    /// Exit 1: the computation ran but a check failed (non-closed input,
    /// non-convergence, residual above tolerance).
    Failed(String),
}

pub type CliResult<T> = Result<T, CliError>;

pub fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

/// Floats in CSV output carry 17 significant digits so that identical runs
/// are byte-identical and values round-trip exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Emit a finished report to stdout or the `--out` path.
pub fn emit(cli: &Cli, content: &str) -> CliResult<()> {
    let mut text = content.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &cli.out {
        None => {
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Usage(format!("cannot write to stdout: {e}")))?;
        }
        Some(path) => {
            std::fs::write(path, text)
                .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
        }
    }
    Ok(())
}

pub fn emit_json(cli: &Cli, value: &serde_json::Value) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Usage(format!("serialization failed: {e}")))?;
    emit(cli, &text)
}

impl Cli {
    pub fn format(&self) -> OutputFormat {
        self.format
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn tolerance_or(&self, default: f64) -> f64 {
        self.tolerance.unwrap_or(default)
    }
}
