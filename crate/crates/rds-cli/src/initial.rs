//! Initial-datum construction: every spec yields a nonnegative field bounded
//! by some finite M, the standing hypothesis on starting data.

use std::f64::consts::PI;
use std::path::Path;

use rds_core::{Grid, ScalarField};

use crate::config::InitialSpec;
use crate::error::CliError;

/// Realizes one species' initial field on the grid.
pub fn build_initial(spec: &InitialSpec, g: &Grid) -> Result<ScalarField, CliError> {
    match spec {
        InitialSpec::Constant(value) => {
            require_nonneg("constant", *value)?;
            Ok(ScalarField::constant(g, *value))
        }
        InitialSpec::CosineBump {
            base,
            amplitude,
            mode,
        } => {
            if !(base.is_finite() && amplitude.is_finite()) {
                return Err(CliError::invalid("cosine_bump values must be finite"));
            }
            if amplitude.abs() > *base {
                return Err(CliError::invalid(format!(
                    "cosine_bump needs |amplitude| <= base for nonnegativity, got \
                     amplitude = {amplitude}, base = {base}"
                )));
            }
            if *mode == 0 {
                return Err(CliError::invalid("cosine_bump mode must be >= 1"));
            }
            let k = *mode as f64 * PI / g.length();
            let (base, amplitude) = (*base, *amplitude);
            Ok(ScalarField::from_axis_fn(g, |x| {
                base + amplitude * x.iter().map(|&xi| (k * xi).cos()).product::<f64>()
            }))
        }
        InitialSpec::Checkerboard { low, high } => {
            require_nonneg("checkerboard low", *low)?;
            require_nonneg("checkerboard high", *high)?;
            let n = g.cells_per_axis();
            let values = (0..g.cell_count())
                .map(|idx| {
                    let (i, j) = (idx % n, idx / n);
                    if (i + j) % 2 == 0 {
                        *low
                    } else {
                        *high
                    }
                })
                .collect();
            Ok(ScalarField::from_values(g, values)?)
        }
        InitialSpec::File(path) => read_field_csv(path, g),
    }
}

fn require_nonneg(what: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(CliError::invalid(format!(
            "{what} must be finite and nonnegative, got {v}"
        )))
    }
}

/// Parses a field CSV: `#` comment lines ignored, remaining lines hold one or
/// more comma-separated values, row-major, one cell each.
pub fn read_field_csv(path: &Path, g: &Grid) -> Result<ScalarField, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::invalid(format!("cannot read field file {}: {e}", path.display()))
    })?;
    let mut values = Vec::with_capacity(g.cell_count());
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        for token in line.split(',') {
            let token = token.trim();
            if token.is_empty() {
                continue;
            }
            let v: f64 = token.parse().map_err(|_| {
                CliError::invalid(format!(
                    "bad number {token:?} at {}:{}",
                    path.display(),
                    lineno + 1
                ))
            })?;
            require_nonneg("field file value", v)?;
            values.push(v);
        }
    }
    if values.len() != g.cell_count() {
        return Err(CliError::invalid(format!(
            "field file {} has {} values but the grid has {} cells",
            path.display(),
            values.len(),
            g.cell_count()
        )));
    }
    Ok(ScalarField::from_values(g, values)?)
}
