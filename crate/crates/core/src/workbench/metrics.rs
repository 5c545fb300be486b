//! Error metrics over a potential energy surface and reaction barriers.

use std::path::Path;

use crate::error::{Error, Result};

pub const HARTREE_TO_KCAL: f64 = 627.509_474_063_1;

fn check(errors: &[f64]) -> Result<()> {
    if errors.is_empty() {
        return Err(Error::Metrics("empty error list".into()));
    }
    if errors.iter().any(|e| !e.is_finite()) {
        return Err(Error::Metrics("non-finite error value".into()));
    }
    Ok(())
}

/// Non-parallelity error: `max(errors) - min(errors)`.
pub fn npe(errors: &[f64]) -> Result<f64> {
    check(errors)?;
    let max = errors.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = errors.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(max - min)
}

/// Largest absolute error.
pub fn max_error(errors: &[f64]) -> Result<f64> {
    check(errors)?;
    Ok(errors.iter().fold(0.0, |m: f64, e| m.max(e.abs())))
}

/// `E_transition - E_equilibrium` in hartree.
pub fn barrier(e_transition: f64, e_equilibrium: f64) -> f64 {
    e_transition - e_equilibrium
}

/// Pointwise `model - reference`, matching coordinates to within `1e-9`.
pub fn errors_against(model: &[(f64, f64)], reference: &[(f64, f64)]) -> Result<Vec<f64>> {
    model
        .iter()
        .map(|(x, e)| {
            reference
                .iter()
                .find(|(r, _)| (r - x).abs() < 1e-9)
                .map(|(_, re)| e - re)
                .ok_or_else(|| Error::Metrics(format!("no reference energy at coordinate {x}")))
        })
        .collect()
}

/// Reads `(coordinate, energy)` pairs from the named columns of a CSV file
/// with a header row.
pub fn read_energy_csv(path: impl AsRef<Path>, x_column: &str, e_column: &str) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::Reader::from_path(path.as_ref())?;
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Metrics(format!("column '{name}' not found in {}", path.as_ref().display())))
    };
    let (xi, ei) = (col(x_column)?, col(e_column)?);
    let mut out = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let parse = |i: usize| -> Result<f64> {
            rec.get(i).unwrap_or("").trim().parse().map_err(|_| Error::Parse {
                line: k + 2,
                msg: format!("bad number '{}'", rec.get(i).unwrap_or("")),
            })
        };
        out.push((parse(xi)?, parse(ei)?));
    }
    Ok(out)
}
