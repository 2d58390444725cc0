//! The `fit` verb: a power-law fit over two columns of a CSV table.

use std::path::Path;

use burgers_core::stats::{fit_power_law, ScalingFit};

use crate::CliError;

/// Parses `lo:hi`.
pub fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected lo:hi, got `{s}`"))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<f64>()
            .map_err(|e| format!("`{v}` is not a number: {e}"))
    };
    Ok((parse(lo)?, parse(hi)?))
}

/// A column given by header name or zero-based index.
fn column_index(headers: &csv::StringRecord, name: &str) -> Result<usize, CliError> {
    if let Some(i) = headers.iter().position(|h| h.trim() == name) {
        return Ok(i);
    }
    match name.parse::<usize>() {
        Ok(i) if i < headers.len() => Ok(i),
        _ => Err(CliError::Input(format!(
            "no column `{name}` among [{}]",
            headers.iter().collect::<Vec<_>>().join(", ")
        ))),
    }
}

pub fn read_points(path: &Path, x: &str, y: &str) -> Result<Vec<(f64, f64)>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
        .clone();
    let (xi, yi) = (column_index(&headers, x)?, column_index(&headers, y)?);
    let mut points = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let value = |i: usize| -> Result<f64, CliError> {
            let field = record.get(i).unwrap_or("");
            field.parse::<f64>().map_err(|_| {
                CliError::Input(format!("row {}: `{field}` is not a number", row + 2))
            })
        };
        points.push((value(xi)?, value(yi)?));
    }
    Ok(points)
}

pub fn run(path: &Path, range: (f64, f64), x: &str, y: &str) -> Result<ScalingFit, CliError> {
    let points = read_points(path, x, y)?;
    Ok(fit_power_law(&points, range)?)
}
