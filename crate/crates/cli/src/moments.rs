//! `moments`: the closed-form radial moment table against the
//! adaptive-quadrature oracle.

use serde_json::json;

use fock_complex::weighted::{moment_quadrature, MomentTable, RadialPolyWeight};

use crate::report::{emit, emit_json, fmt_f64, usage, CliResult, OutputFormat};
use crate::Cli;

pub fn run(cli: &Cli, weight_spec: &str, kmax: u32) -> CliResult<bool> {
    let weight = RadialPolyWeight::parse(weight_spec).map_err(|e| usage(e.to_string()))?;
    let tolerance = cli.tolerance_or(1e-9);
    let table = MomentTable::new(&weight, kmax);
    let mut rows = Vec::new();
    let mut passed = true;
    for (j, var) in weight.vars.iter().enumerate() {
        for k in 0..=kmax {
            let closed = table.moment(j, k);
            let quadrature = moment_quadrature(var.c, var.s, k);
            let rel_error = (closed - quadrature).abs() / closed.abs();
            passed &= rel_error <= tolerance;
            rows.push((j + 1, k, closed, quadrature, rel_error));
        }
    }
    match cli.format() {
        OutputFormat::Csv => {
            let mut lines = vec!["variable,k,closed_form,quadrature,rel_error".to_string()];
            for (j, k, closed, quad, rel) in &rows {
                lines.push(format!(
                    "{j},{k},{},{},{}",
                    fmt_f64(*closed),
                    fmt_f64(*quad),
                    fmt_f64(*rel)
                ));
            }
            emit(cli, &lines.join("\n"))?;
        }
        OutputFormat::Json => {
            let value = json!({
                "command": "moments",
                "weight": weight,
                "tolerance": tolerance,
                "rows": rows
                    .iter()
                    .map(|(j, k, closed, quad, rel)| json!({
                        "variable": j,
                        "k": k,
                        "closed_form": closed,
                        "quadrature": quad,
                        "rel_error": rel,
                    }))
                    .collect::<Vec<_>>(),
                "passed": passed,
            });
            emit_json(cli, &value)?;
        }
    }
    Ok(passed)
}
