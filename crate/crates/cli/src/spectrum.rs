//! `spectrum`: the analytic eigenvalue table and its numeric cross-check.

use serde_json::json;

use fock_complex::dbar::{box_eigenvalues, spectrum_table};

use crate::report::{emit, emit_json, fmt_f64, usage, CliResult, OutputFormat};
use crate::Cli;

pub fn run(cli: &Cli, n: usize, p: usize, mmax: u32, verify: bool) -> CliResult<bool> {
    if n == 0 {
        return Err(usage("dimension n must be at least 1"));
    }
    if p > n {
        return Err(usage(format!(
            "form degree p = {p} exceeds the dimension n = {n}"
        )));
    }
    let table = spectrum_table(n, p, mmax);
    let warning = (p == 0)
        .then_some("0 is in the spectrum at p = 0; the Laplacian has no bounded inverse there");
    if let Some(w) = warning {
        eprintln!("warning: {w}");
    }

    let numeric = if verify {
        let tolerance = cli.tolerance_or(1e-9);
        let values = box_eigenvalues(n, p, mmax);
        let analytic = table.eigenvalue_list();
        let max_error = values
            .iter()
            .zip(&analytic)
            .map(|(v, w)| (v - *w as f64).abs())
            .fold(0.0f64, f64::max);
        Some((
            max_error,
            max_error < tolerance && values.len() == analytic.len(),
        ))
    } else {
        None
    };
    let passed = numeric.is_none_or(|(_, ok)| ok);

    match cli.format() {
        OutputFormat::Csv => {
            let mut lines = vec!["eigenvalue,multiplicity".to_string()];
            for row in &table.rows {
                lines.push(format!("{},{}", row.eigenvalue, row.multiplicity));
            }
            if let Some((max_error, ok)) = numeric {
                lines.push(format!(
                    "# numeric cross-check: max_error={}, ok={}",
                    fmt_f64(max_error),
                    ok
                ));
            }
            emit(cli, &lines.join("\n"))?;
        }
        OutputFormat::Json => {
            let mut value = json!({
                "command": "spectrum",
                "n": n,
                "p": p,
                "mmax": mmax,
                "rows": table.rows,
            });
            if let Some(w) = warning {
                value["warning"] = json!(w);
            }
            if let Some((max_error, ok)) = numeric {
                value["numeric_check"] = json!({
                    "max_eigenvalue_error": max_error,
                    "ok": ok,
                });
            }
            emit_json(cli, &value)?;
        }
    }
    Ok(passed)
}
