mod common;

use common::*;
use pnovqe::ansatz::{count_resources, AnsatzKind};
use pnovqe::molint::{write_fcidump, BasisName};
use pnovqe::workbench::{run_curve, run_point, write_curve, RunConfig};
use pnovqe::Error;

const H2_TEMPLATE: &str = r#"
name = "h2"

[molecule]
xyz = """
2
hydrogen molecule
H 0 0 0
H 0 0 {r}
"""

[integrals]
basis = "sto-3g"

[pno]
qubits = 4

[ansatz]
kind = "upccgsd"
"#;

fn h2_config(scan: &[f64]) -> RunConfig {
    let values: Vec<String> = scan.iter().map(|v| format!("{v}")).collect();
    RunConfig::from_toml(&format!("{H2_TEMPLATE}\n[scan]\nvalues = [{}]\n", values.join(", "))).unwrap()
}

#[test]
fn single_point_matches_fci() {
    let cfg = h2_config(&[0.74]);
    let a = run_point(&cfg, Some(0.74)).unwrap();
    assert!((a.record.e_vqe - a.record.e_fci).abs() < 1e-8);
    assert_eq!(a.record.n_qubits, 4);
    assert_eq!(a.record.n_parameters, 3);
    assert!(a.fcidump.contains("&FCI"));
    assert!(a.hamiltonian.starts_with("# qubits 4"));
    let curve = run_curve(&cfg).unwrap();
    assert_eq!(curve.result.points.len(), 1);
    assert_eq!(curve.result.points[0], a.record);
}

#[test]
fn minimal_budget_gives_hartree_fock() {
    let mut cfg = h2_config(&[0.74]);
    cfg.ansatz.kind = AnsatzKind::PnoUpccd;
    cfg.pno.qubits = Some(2);
    let a = run_point(&cfg, Some(0.74)).unwrap();
    assert_eq!(a.record.n_parameters, 0);
    assert!((a.record.e_vqe - a.record.e_hf).abs() < 1e-12);
    assert!((a.record.e_scf.unwrap() - a.record.e_hf).abs() < 1e-10);
}

#[test]
fn pno_ansatz_without_budget_is_a_stage_error() {
    let mut cfg = h2_config(&[0.74]);
    cfg.pno.qubits = None;
    cfg.ansatz.kind = AnsatzKind::PnoUpccd;
    match run_point(&cfg, Some(0.74)) {
        Err(Error::Stage { stage, source }) => {
            assert_eq!(stage, "ansatz");
            assert!(matches!(*source, Error::MissingPnoMetadata));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn resources_match_count_resources() {
    let cfg = h2_config(&[0.74]);
    let a = run_point(&cfg, Some(0.74)).unwrap();
    let sys = pnovqe::workbench::prepare_system(&cfg, Some(0.74)).unwrap();
    let ansatz = pnovqe::workbench::build_ansatz(&sys.final_set, cfg.ansatz.kind, 1).unwrap();
    assert_eq!(a.resources, count_resources(&ansatz));
    assert_eq!(a.record.n_cnots, a.resources.n_cnots);
}

#[test]
fn fcidump_source_with_frozen_core() {
    let dir = tempfile::tempdir().unwrap();
    let (mo, _) = mo_set(&h_chain(4, 0.9), BasisName::Pople631g);
    write_fcidump(&mo, dir.path().join("h4.fcidump")).unwrap();
    let text = r#"
[integrals]
fcidump = "h4.fcidump"

[pno]
qubits = 8
freeze = [0]

[ansatz]
kind = "pno-upccsd"
"#;
    let cfg_path = dir.path().join("run.toml");
    std::fs::write(&cfg_path, text).unwrap();
    let cfg = RunConfig::load(&cfg_path).unwrap();
    let a = run_point(&cfg, None).unwrap();
    assert_eq!(a.record.n_electrons, 2);
    assert_eq!(a.record.n_orbitals, 4);
    assert!(a.record.e_vqe >= a.record.e_fci - 1e-9);
    assert!(a.record.e_scf.is_none());
}

#[test]
fn h2_curve_shape_and_exactness() {
    let scan = [0.5, 0.6, 0.7, 0.74, 0.8, 1.0, 1.3, 1.7, 2.1, 2.5];
    let cfg = h2_config(&scan);
    let run = run_curve(&cfg).unwrap();
    let pts = &run.result.points;
    assert_eq!(pts.len(), 10);
    assert!(run.result.is_complete());
    let coords: Vec<f64> = pts.iter().map(|p| p.coordinate.unwrap()).collect();
    assert_eq!(coords, scan);
    let e: Vec<f64> = pts.iter().map(|p| p.e_vqe).collect();
    let kmin = (0..e.len()).min_by(|&a, &b| e[a].total_cmp(&e[b])).unwrap();
    assert_eq!(scan[kmin], 0.74);
    assert!(e[..=kmin].windows(2).all(|w| w[1] < w[0]));
    assert!(e[kmin..].windows(2).all(|w| w[1] > w[0]));
    for p in pts {
        assert!((p.e_vqe - p.e_fci).abs() <= 1e-7);
    }
    assert!(run.result.metrics.as_ref().unwrap().npe_vs_fci <= 1e-7);
}

#[test]
fn failed_points_are_recorded() {
    // 0.0 puts both nuclei on top of each other
    let cfg = h2_config(&[0.0, 0.74]);
    let run = run_curve(&cfg).unwrap();
    assert_eq!(run.result.points.len(), 1);
    assert_eq!(run.result.failures.len(), 1);
    assert_eq!(run.result.failures[0].coordinate, Some(0.0));
    assert!(run.result.failures[0].error.contains("integrals"));
    assert!(!run.result.is_complete());
}

#[test]
fn outputs_are_byte_identical_and_parallel_order_is_stable() {
    let scan = [0.6, 0.9, 1.4];
    let cfg = h2_config(&scan);
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let f1 = write_curve(d1.path(), &run_curve(&cfg).unwrap()).unwrap();
    let f2 = write_curve(d2.path(), &run_curve(&cfg).unwrap()).unwrap();
    assert_eq!(f1.len(), f2.len());
    for (a, b) in f1.iter().zip(&f2) {
        assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap(), "{}", a.display());
    }
    let mut par = cfg.clone();
    par.workers = 3;
    let serial = run_curve(&cfg).unwrap().result;
    let parallel = run_curve(&par).unwrap().result;
    assert_eq!(serial.points, parallel.points);
}

#[test]
fn reference_energies_from_fcidump() {
    let dir = tempfile::tempdir().unwrap();
    for r in [0.7, 1.0] {
        let (mo, _) = mo_set(&h2_molecule(r), BasisName::Pople631g);
        write_fcidump(&mo, dir.path().join(format!("h2_{r}.fcidump"))).unwrap();
    }
    let mut cfg = h2_config(&[0.7, 1.0]);
    cfg.reference = Some(pnovqe::workbench::config::ReferenceSpec {
        file: None,
        fcidump: Some(dir.path().join("h2_{r}.fcidump").to_string_lossy().into_owned()),
    });
    let run = run_curve(&cfg).unwrap();
    let m = run.result.metrics.unwrap();
    // the larger basis lies lower, so every error is positive
    assert!(run.result.points.iter().all(|p| p.e_vqe > p.e_reference.unwrap()));
    assert!(m.npe_vs_reference.unwrap() >= 0.0);
    assert!(m.max_error_vs_reference.unwrap() > 0.0);
}
