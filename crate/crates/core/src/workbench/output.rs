//! Result files: one JSON document per run plus flat CSV.

use std::fs;
use std::path::{Path, PathBuf};

use super::pipeline::{CurveResult, CurveRun, PointArtifacts};
use crate::error::Result;

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

/// `coordinate,e_vqe,e_fci,e_reference,error_fci,error_reference`, one row per point.
pub fn curve_csv(curve: &CurveResult) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["coordinate", "e_vqe", "e_fci", "e_reference", "error_fci", "error_reference"])?;
    for p in &curve.points {
        w.write_record([
            opt(p.coordinate),
            format!("{:?}", p.e_vqe),
            format!("{:?}", p.e_fci),
            opt(p.e_reference),
            format!("{:?}", p.e_vqe - p.e_fci),
            opt(p.e_reference.map(|r| p.e_vqe - r)),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv output is UTF-8"))
}

pub fn curve_json(curve: &CurveResult) -> Result<String> {
    Ok(serde_json::to_string_pretty(curve)? + "\n")
}

/// Writes `point.json`, `final.fcidump`, `hamiltonian.txt`, `resources.json`
/// and `trajectory.csv` into `dir`.
pub fn write_point(dir: &Path, a: &PointArtifacts) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: &str, body: &[u8]| -> Result<()> {
        let p = dir.join(name);
        fs::write(&p, body)?;
        written.push(p);
        Ok(())
    };
    put("point.json", (serde_json::to_string_pretty(&a.record)? + "\n").as_bytes())?;
    put("final.fcidump", a.fcidump.as_bytes())?;
    put("hamiltonian.txt", a.hamiltonian.as_bytes())?;
    put("resources.json", (serde_json::to_string_pretty(&a.resources)? + "\n").as_bytes())?;
    let mut traj = Vec::new();
    a.optimization.write_trajectory_csv(&mut traj)?;
    put("trajectory.csv", &traj)?;
    Ok(written)
}

/// Writes `curve.json`, `curve.csv` and a `point_NNN` directory per
/// successful point.
pub fn write_curve(dir: &Path, run: &CurveRun) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let json = dir.join("curve.json");
    fs::write(&json, curve_json(&run.result)?)?;
    let csv = dir.join("curve.csv");
    fs::write(&csv, curve_csv(&run.result)?)?;
    let mut written = vec![json, csv];
    for (k, a) in run.artifacts.iter().enumerate() {
        if let Some(a) = a {
            written.extend(write_point(&dir.join(format!("point_{k:03}")), a)?);
        }
    }
    Ok(written)
}
