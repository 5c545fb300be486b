//! Single-point and curve pipelines: integrals, SCF, PNO compression, qubit
//! Hamiltonian, ansatz, VQE and the FCI oracle.

use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{substitute, IntegralSource, RunConfig};
use super::metrics::{errors_against, max_error, npe, read_energy_csv};
use crate::ansatz::{build_pno_ansatz_from_origins, build_upccgsd, count_resources, Ansatz, AnsatzKind, ResourceReport};
use crate::error::{Error, Result};
use crate::fermion::qubit_hamiltonian;
use crate::molint::{basis_for, compute_ao_integrals, format_fcidump, read_fcidump, IntegralSet};
use crate::optimizer::{run_vqe, OptimizationResult};
use crate::oracle::{exact_ground_energy, fci_energy, SectorBasis};
use crate::pno::{
    build_final_integrals, freeze_core, mp2_amplitudes, orthonormalize, pair_densities, select_pnos, SelectOptions,
};
use crate::scf::{mo_integrals, run_rhf};

/// Allowed amount by which a VQE energy may undercut the FCI energy.
pub const VARIATIONAL_SLACK: f64 = 1e-9;

/// Integral set ready for encoding, with the bookkeeping of how it was made.
#[derive(Debug, Clone)]
pub struct PreparedSystem {
    pub coordinate: Option<f64>,
    /// Canonical set after freezing, before PNO compression.
    pub parent: IntegralSet,
    pub final_set: IntegralSet,
    pub e_scf: Option<f64>,
    pub scf_iterations: Option<usize>,
    pub mp2_correlation: Option<f64>,
    pub selection_signature: Option<Vec<(usize, usize)>>,
    pub retained_occupations: Option<Vec<f64>>,
}

fn stage<T>(r: Result<T>, name: &'static str) -> Result<T> {
    r.map_err(|e| e.at_stage(name))
}

pub fn prepare_system(cfg: &RunConfig, r: Option<f64>) -> Result<PreparedSystem> {
    let (mo, e_scf, scf_iterations) = match stage(cfg.integral_source(), "config")? {
        IntegralSource::Builtin(basis) => {
            let mol = stage(cfg.molecule_at(r), "geometry")?;
            let ao = stage(basis_for(&mol, basis).and_then(|s| compute_ao_integrals(&mol, &s)), "integrals")?;
            let scf = stage(run_rhf(&ao, mol.n_electrons(), &cfg.scf), "scf")?;
            if !scf.converged {
                return Err(Error::Convergence(format!("SCF after {} iterations", scf.iterations)).at_stage("scf"));
            }
            let mo = stage(mo_integrals(&ao, &scf), "scf")?;
            (mo, Some(scf.total_energy), Some(scf.iterations))
        }
        IntegralSource::Fcidump(path) => (stage(read_fcidump(substitute(&path, r)), "integrals")?, None, None),
    };
    let parent = stage(freeze_core(&mo, &cfg.pno.freeze), "freeze")?;
    let Some(budget) = cfg.pno.qubits else {
        return Ok(PreparedSystem {
            coordinate: r,
            final_set: parent.clone(),
            parent,
            e_scf,
            scf_iterations,
            mp2_correlation: None,
            selection_signature: None,
            retained_occupations: None,
        });
    };
    let amps = stage(mp2_amplitudes(&parent), "mp2")?;
    let dens = pair_densities(&amps);
    let opts = SelectOptions { diagonal_only: cfg.pno.diagonal_only, occupation_threshold: cfg.pno.occupation_threshold };
    let pnos = stage(select_pnos(&dens, budget, &opts), "pno")?;
    let space = stage(orthonormalize(&pnos, cfg.pno.orthonormalization), "pno")?;
    let final_set = stage(build_final_integrals(&parent, &space), "pno")?;
    Ok(PreparedSystem {
        coordinate: r,
        parent,
        final_set,
        e_scf,
        scf_iterations,
        mp2_correlation: Some(amps.mp2_total),
        selection_signature: Some(pnos.signature()),
        retained_occupations: Some(pnos.selection.iter().map(|s| s.occupation).collect()),
    })
}

/// Ansatz of the configured kind over the orbitals of `set`.
pub fn build_ansatz(set: &IntegralSet, kind: AnsatzKind, layers: usize) -> Result<Ansatz> {
    match kind {
        AnsatzKind::Upccgsd => build_upccgsd(set.n_orb(), set.n_electrons, layers),
        _ => build_pno_ansatz_from_origins(set.pair_origin.as_deref(), set.n_occ(), kind),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub coordinate: Option<f64>,
    pub n_electrons: usize,
    pub n_orbitals: usize,
    pub n_qubits: usize,
    pub ansatz: String,
    pub n_parameters: usize,
    pub n_cnots: usize,
    pub selection_signature: Option<Vec<(usize, usize)>>,
    pub retained_occupations: Option<Vec<f64>>,
    pub e_scf: Option<f64>,
    /// Energy of the reference determinant in the final orbital space.
    pub e_hf: f64,
    pub e_mp2_correlation: Option<f64>,
    pub e_vqe: f64,
    pub e_fci: f64,
    pub e_reference: Option<f64>,
    pub vqe_iterations: usize,
    pub vqe_converged: bool,
    pub vqe_grad_norm: f64,
}

/// Everything a single point produces.
#[derive(Debug, Clone)]
pub struct PointArtifacts {
    pub record: PointRecord,
    pub fcidump: String,
    pub hamiltonian: String,
    pub resources: ResourceReport,
    pub optimization: OptimizationResult,
}

fn reference_energy(cfg: &RunConfig, r: Option<f64>) -> Result<Option<f64>> {
    let Some(spec) = &cfg.reference else { return Ok(None) };
    if let Some(path) = &spec.fcidump {
        return Ok(Some(fci_energy(&read_fcidump(substitute(path, r))?)?));
    }
    let file = spec.file.as_ref().expect("validated reference spec");
    let rows = read_energy_csv(file, "coordinate", "energy")?;
    match r {
        Some(x) => Ok(Some(
            rows.iter()
                .find(|(c, _)| (c - x).abs() < 1e-9)
                .map(|(_, e)| *e)
                .ok_or_else(|| Error::Metrics(format!("no reference energy at coordinate {x}")))?,
        )),
        None => Ok(rows.first().map(|(_, e)| *e)),
    }
}

pub fn run_point(cfg: &RunConfig, r: Option<f64>) -> Result<PointArtifacts> {
    let sys = prepare_system(cfg, r)?;
    let set = &sys.final_set;
    let h = stage(qubit_hamiltonian(set), "hamiltonian")?;
    let ansatz = stage(build_ansatz(set, cfg.ansatz.kind, cfg.ansatz.layers), "ansatz")?;
    let resources = count_resources(&ansatz);
    let opt = stage(run_vqe(&h, &ansatz, &cfg.optimizer), "vqe")?;
    let basis = stage(SectorBasis::new(2 * set.n_orb(), set.n_electrons, Some(0)), "fci")?;
    let e_fci = stage(exact_ground_energy(&h, &basis), "fci")?.energy;
    if opt.energy < e_fci - VARIATIONAL_SLACK {
        return Err(Error::Oracle(format!("VQE energy {} below FCI energy {e_fci}", opt.energy)).at_stage("vqe"));
    }
    let e_reference = stage(reference_energy(cfg, r), "reference")?;
    let record = PointRecord {
        coordinate: r,
        n_electrons: set.n_electrons,
        n_orbitals: set.n_orb(),
        n_qubits: 2 * set.n_orb(),
        ansatz: ansatz.name.clone(),
        n_parameters: resources.n_parameters,
        n_cnots: resources.n_cnots,
        selection_signature: sys.selection_signature.clone(),
        retained_occupations: sys.retained_occupations.clone(),
        e_scf: sys.e_scf,
        e_hf: set.reference_energy(),
        e_mp2_correlation: sys.mp2_correlation,
        e_vqe: opt.energy,
        e_fci,
        e_reference,
        vqe_iterations: opt.iterations,
        vqe_converged: opt.converged,
        vqe_grad_norm: opt.grad_norm,
    };
    Ok(PointArtifacts { record, fcidump: format_fcidump(set), hamiltonian: h.to_text(), resources, optimization: opt })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointFailure {
    pub coordinate: Option<f64>,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timestamps {
    pub started_unix: u64,
    pub finished_unix: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveMetadata {
    pub name: String,
    pub config_hash: String,
    pub ansatz: String,
    pub qubit_budget: Option<usize>,
    pub integrals: String,
    /// Optimizer tolerances are choices of this tool, not inherited values.
    pub optimizer_grad_tol: f64,
    pub optimizer_max_iter: usize,
    pub timestamps: Option<Timestamps>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveMetrics {
    pub npe_vs_fci: f64,
    pub max_error_vs_fci: f64,
    pub npe_vs_reference: Option<f64>,
    pub max_error_vs_reference: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveResult {
    pub config: RunConfig,
    pub metadata: CurveMetadata,
    /// Successful points in scan order.
    pub points: Vec<PointRecord>,
    pub failures: Vec<PointFailure>,
    pub metrics: Option<CurveMetrics>,
}

impl CurveResult {
    pub fn is_complete(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn errors_vs_fci(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.e_vqe - p.e_fci).collect()
    }

    /// `e_vqe - e_reference` wherever a reference energy exists.
    pub fn errors_vs_reference(&self) -> Option<Vec<f64>> {
        self.points.iter().map(|p| p.e_reference.map(|r| p.e_vqe - r)).collect()
    }
}

/// Curve run with per-point artifacts (in scan order, `None` for failures).
#[derive(Debug, Clone)]
pub struct CurveRun {
    pub result: CurveResult,
    pub artifacts: Vec<Option<PointArtifacts>>,
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Runs every scan value with `cfg.workers` threads; results are assembled in
/// scan order and failed points are recorded rather than aborting the curve.
pub fn run_curve(cfg: &RunConfig) -> Result<CurveRun> {
    cfg.validate()?;
    let started = unix_now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let values = cfg.scan_values();
    let outcomes: Vec<Result<PointArtifacts>> = pool.install(|| values.par_iter().map(|r| run_point(cfg, *r)).collect());

    let mut points = Vec::new();
    let mut failures = Vec::new();
    let mut artifacts = Vec::new();
    for (r, out) in values.iter().zip(outcomes) {
        match out {
            Ok(a) => {
                points.push(a.record.clone());
                artifacts.push(Some(a));
            }
            Err(e) => {
                failures.push(PointFailure { coordinate: *r, error: e.to_string() });
                artifacts.push(None);
            }
        }
    }
    let integrals = match cfg.integral_source()? {
        IntegralSource::Builtin(b) => format!("builtin:{b}"),
        IntegralSource::Fcidump(p) => format!("fcidump:{p}"),
    };
    let mut result = CurveResult {
        config: cfg.clone(),
        metadata: CurveMetadata {
            name: cfg.name.clone(),
            config_hash: cfg.hash(),
            ansatz: cfg.ansatz.kind.to_string(),
            qubit_budget: cfg.pno.qubits,
            integrals,
            optimizer_grad_tol: cfg.optimizer.grad_tol,
            optimizer_max_iter: cfg.optimizer.max_iter,
            timestamps: cfg.record_timestamps.then(|| Timestamps { started_unix: started, finished_unix: unix_now() }),
        },
        points,
        failures,
        metrics: None,
    };
    if !result.points.is_empty() {
        let fci = result.errors_vs_fci();
        let reference = result.errors_vs_reference();
        result.metrics = Some(CurveMetrics {
            npe_vs_fci: npe(&fci)?,
            max_error_vs_fci: max_error(&fci)?,
            npe_vs_reference: reference.as_deref().map(npe).transpose()?,
            max_error_vs_reference: reference.as_deref().map(max_error).transpose()?,
        });
    }
    Ok(CurveRun { result, artifacts })
}

/// Errors of the curve's VQE energies against external `(coordinate, energy)` rows.
pub fn curve_errors(curve: &CurveResult, reference: &[(f64, f64)]) -> Result<Vec<f64>> {
    let model: Vec<(f64, f64)> = curve.points.iter().filter_map(|p| p.coordinate.map(|c| (c, p.e_vqe))).collect();
    errors_against(&model, reference)
}
