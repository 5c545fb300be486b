//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::*;
use pnovqe::ansatz::{build_pno_ansatz, build_pno_ansatz_from_origins, build_upccgsd, count_resources, paired_ansatz, AnsatzKind};
use pnovqe::fermion::{number_operator, qubit_hamiltonian, sz_operator, QubitOperator};
use pnovqe::molint::{read_fcidump, write_fcidump, BasisName, IntegralSet};
use pnovqe::optimizer::{run_vqe, VqeOptions};
use pnovqe::oracle::{build_paired_hamiltonian, fci_energy, spectrum, SectorBasis};
use pnovqe::pno::*;
use pnovqe::simulator::{ansatz_state, energy, expectation, gradient};
use pnovqe::workbench::{barrier, max_error, npe, run_curve, write_curve, RunConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

/// Pair structures of the compressed spaces behind the resource table rows.
fn table_spaces() -> Vec<(&'static str, OrbitalSpace)> {
    let mut bh22 = vec![(2, 2), (2, 2), (2, 2), (2, 2), (1, 1), (1, 1), (0, 0)];
    bh22.push((1, 2));
    vec![
        ("LiH(4,12)", OrbitalSpace::with_assignment(2, &[(1, 1); 4]).unwrap()),
        ("BH(6,12)", OrbitalSpace::with_assignment(3, &[(2, 2); 3]).unwrap()),
        ("BeH2(4,12)", OrbitalSpace::with_assignment(2, &[(1, 1), (1, 1), (1, 1), (0, 0)]).unwrap()),
        (
            "LiH(4,22)",
            OrbitalSpace::with_assignment(2, &[(1, 1), (1, 1), (1, 1), (1, 1), (1, 1), (0, 0), (0, 0), (0, 0), (0, 0)])
                .unwrap(),
        ),
        ("BH(6,22)", OrbitalSpace::with_assignment(3, &bh22).unwrap()),
    ]
}

fn criterion_1() -> Check {
    for (n, want) in [(6, 45), (11, 165)] {
        let got = build_upccgsd(n, 4, 1).map_err(|e| e.to_string())?.n_parameters();
        ensure!(got == want, "UpCCGSD N={n}: {got} parameters, expected {want}");
    }
    let expected = [("LiH(4,12)", 4, 12), ("BH(6,12)", 3, 9), ("BeH2(4,12)", 4, 12), ("LiH(4,22)", 9, 27), ("BH(6,22)", 7, 21)];
    for ((label, space), (_, d, sd)) in table_spaces().iter().zip(expected) {
        let pd = build_pno_ansatz(space, AnsatzKind::PnoUpccd).unwrap().n_parameters();
        let psd = build_pno_ansatz(space, AnsatzKind::PnoUpccsd).unwrap().n_parameters();
        ensure!(pd == d && psd == sd, "{label}: {pd}/{psd}, expected {d}/{sd}");
    }
    Ok(())
}

fn criterion_2() -> Check {
    for (n, want) in [(6, 1280), (11, 6160)] {
        let got = count_resources(&build_upccgsd(n, 4, 1).unwrap()).n_cnots;
        ensure!(got == want, "UpCCGSD N={n}: {got} CNOTs, expected {want}");
    }
    let expected = [("LiH(4,12)", 192, 352), ("BH(6,12)", 144, 240), ("BeH2(4,12)", 192, 368), ("LiH(4,22)", 432, 1216), ("BH(6,22)", 336, 848)];
    for ((label, space), (_, d, sd)) in table_spaces().iter().zip(expected) {
        let a = build_pno_ansatz(space, AnsatzKind::PnoUpccd).unwrap();
        ensure!(a.generators.iter().all(|g| g.cnot_count() == 48), "{label}: pair double not 48 CNOTs");
        let cd = count_resources(&a).n_cnots;
        let csd = count_resources(&build_pno_ansatz(space, AnsatzKind::PnoUpccsd).unwrap()).n_cnots;
        ensure!(cd == d && csd == sd, "{label}: {cd}/{csd} CNOTs, expected {d}/{sd}");
    }
    Ok(())
}

fn criterion_3() -> Check {
    for seed in 0..25u64 {
        let n = 1 + (seed as usize % 3);
        let mo = random_integral_set(n, 2, 1000 + seed);
        let h = qubit_hamiltonian(&mo).map_err(|e| e.to_string())?;
        let jw = spectrum(&h, &SectorBasis::full(2 * n).unwrap()).unwrap();
        let ci = ci_fock_spectrum(&mo);
        ensure!(jw.len() == ci.len(), "seed {seed}: dimension mismatch");
        let worst = jw.iter().zip(&ci).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        ensure!(worst < 1e-10, "seed {seed}: spectra differ by {worst:e}");
    }
    Ok(())
}

const H2_CURVE: &str = r#"
name = "h2-sto3g"

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

[scan]
values = [0.5, 0.6, 0.7, 0.74, 0.8, 1.0, 1.3, 1.7, 2.1, 2.5]
"#;

fn criterion_4() -> Check {
    let cfg = RunConfig::from_toml(H2_CURVE).map_err(|e| e.to_string())?;
    let run = run_curve(&cfg).map_err(|e| e.to_string())?;
    ensure!(run.result.points.len() == 10 && run.result.is_complete(), "curve incomplete: {:?}", run.result.failures);
    let errors = run.result.errors_vs_fci();
    let worst = max_error(&errors).unwrap();
    ensure!(worst <= 1e-7, "max |E_vqe - E_fci| = {worst:e}");
    let n = npe(&errors).unwrap();
    ensure!(n <= 1e-7, "NPE = {n:e}");
    Ok(())
}

fn h4_compressed(nq: usize, diagonal_only: bool) -> IntegralSet {
    let (mo, _) = mo_set(&h_chain(4, 0.9), BasisName::Pople631g);
    let d = pair_densities(&mp2_amplitudes(&mo).unwrap());
    let pnos = select_pnos(&d, nq, &SelectOptions { diagonal_only, ..Default::default() }).unwrap();
    build_final_integrals(&mo, &orthonormalize(&pnos, Orthonormalization::Cholesky).unwrap()).unwrap()
}

fn check_gradients(h: &QubitOperator, a: &pnovqe::ansatz::Ansatz, seed: u64, label: &str) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let step = 1e-5;
    for case in 0..20 {
        let theta: Vec<f64> = (0..a.n_parameters()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let g = gradient(h, a, &theta).map_err(|e| e.to_string())?;
        for k in 0..theta.len() {
            let mut tp = theta.clone();
            tp[k] += step;
            let mut tm = theta.clone();
            tm[k] -= step;
            let fd = (energy(h, a, &tp).unwrap() - energy(h, a, &tm).unwrap()) / (2.0 * step);
            ensure!((g[k] - fd).abs() < 1e-6, "{label} case {case} component {k}: {} vs {fd}", g[k]);
        }
    }
    Ok(())
}

fn criterion_5() -> Check {
    let (mo, _) = mo_set(&h2_molecule(0.74), BasisName::Sto3g);
    let a = build_upccgsd(2, 2, 1).unwrap();
    ensure!(a.n_parameters() == 3, "H2 ansatz has {} parameters", a.n_parameters());
    check_gradients(&qubit_hamiltonian(&mo).unwrap(), &a, 1, "H2")?;
    let set = h4_compressed(12, false);
    let a = build_pno_ansatz_from_origins(set.pair_origin.as_deref(), set.n_occ(), AnsatzKind::PnoUpccsd).unwrap();
    ensure!(a.n_qubits == 12, "instance has {} qubits", a.n_qubits);
    check_gradients(&qubit_hamiltonian(&set).unwrap(), &a, 2, "PNO-UpCCSD")
}

fn criterion_6() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (big, _) = mo_set(&h2_molecule(0.74), "even-tempered:6:0.05:3.0".parse().unwrap());
    let path = dir.path().join("h2_large.fcidump");
    write_fcidump(&big, &path).map_err(|e| e.to_string())?;
    let ingested = read_fcidump(&path).map_err(|e| e.to_string())?;
    ensure!(ingested.n_orb() >= 10, "only {} orbitals", ingested.n_orb());
    let (sto, _) = mo_set(&h2_molecule(0.74), BasisName::Sto3g);
    let e_sto = fci_energy(&sto).unwrap();
    let d = pair_densities(&mp2_amplitudes(&ingested).map_err(|e| e.to_string())?);
    let mut energies = Vec::new();
    for nq in [4, 6, 8, 10] {
        let pnos = select_pnos(&d, nq, &SelectOptions::default()).map_err(|e| e.to_string())?;
        let space = orthonormalize(&pnos, Orthonormalization::Cholesky).unwrap();
        energies.push(fci_energy(&build_final_integrals(&ingested, &space).unwrap()).unwrap());
    }
    ensure!(energies[0] < e_sto - 1e-9, "N_q=4 PNO FCI {} not below STO-3G FCI {e_sto}", energies[0]);
    for w in energies.windows(2) {
        ensure!(w[1] < w[0] - 1e-9, "FCI not decreasing: {energies:?}");
    }
    Ok(())
}

fn criterion_7() -> Check {
    for seed in 0..10u64 {
        let n = 1 + (seed as usize % 3);
        let mo = random_integral_set(n, 2, 2000 + seed);
        let full = qubit_hamiltonian(&mo).unwrap();
        let proj = spectrum(&full, &SectorBasis::seniority_zero(n, None).unwrap()).unwrap();
        let paired = spectrum(&build_paired_hamiltonian(&mo).unwrap(), &SectorBasis::full(n).unwrap()).unwrap();
        ensure!(proj.len() == paired.len(), "seed {seed}: dimension mismatch");
        let worst = proj.iter().zip(&paired).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        ensure!(worst < 1e-10, "seed {seed}: spectra differ by {worst:e}");
    }
    let set = h4_compressed(12, true);
    let a = build_pno_ansatz_from_origins(set.pair_origin.as_deref(), set.n_occ(), AnsatzKind::PnoUpccd).unwrap();
    let full = run_vqe(&qubit_hamiltonian(&set).unwrap(), &a, &VqeOptions::default()).map_err(|e| e.to_string())?;
    let pa = paired_ansatz(&a).map_err(|e| e.to_string())?;
    ensure!(pa.n_qubits * 2 == a.n_qubits, "paired register not halved");
    let paired = run_vqe(&build_paired_hamiltonian(&set).unwrap(), &pa, &VqeOptions::default()).map_err(|e| e.to_string())?;
    ensure!((full.energy - paired.energy).abs() < 1e-8, "PNO-UpCCD {} vs paired {}", full.energy, paired.energy);
    Ok(())
}

fn criterion_8() -> Check {
    let mut hams: Vec<(String, QubitOperator)> = Vec::new();
    for r in [0.5, 0.74, 2.5] {
        let (mo, _) = mo_set(&h2_molecule(r), BasisName::Sto3g);
        hams.push((format!("H2 {r}"), qubit_hamiltonian(&mo).unwrap()));
    }
    for nq in [8, 12] {
        hams.push((format!("H4 PNO {nq}"), qubit_hamiltonian(&h4_compressed(nq, false)).unwrap()));
    }
    for seed in 0..5 {
        hams.push((format!("random {seed}"), qubit_hamiltonian(&random_integral_set(3, 2, 3000 + seed)).unwrap()));
    }
    for (label, h) in &hams {
        let n = h.n_qubits();
        let cn = h.commutator(&number_operator(n)).unwrap().max_abs_coefficient();
        let cs = h.commutator(&sz_operator(n)).unwrap().max_abs_coefficient();
        ensure!(cn < 1e-12 && cs < 1e-12, "{label}: [H,N] {cn:e}, [H,Sz] {cs:e}");
    }
    let set = h4_compressed(12, false);
    let n_op = number_operator(12);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for kind in AnsatzKind::all() {
        let a = build_pno_ansatz_from_origins(set.pair_origin.as_deref(), set.n_occ(), kind).unwrap();
        for _ in 0..3 {
            let theta: Vec<f64> = (0..a.n_parameters()).map(|_| rng.random_range(-3.0..3.0)).collect();
            let s = ansatz_state(&a, &theta).unwrap();
            ensure!((s.norm_sqr() - 1.0).abs() < 1e-10, "{kind}: norm {}", s.norm_sqr());
            let n = expectation(&s, &n_op).unwrap();
            ensure!((n - 4.0).abs() < 1e-10, "{kind}: particle number {n}");
        }
    }
    Ok(())
}

fn criterion_9() -> Check {
    ensure!(npe(&[0.1, 0.1, 0.1]).unwrap() == 0.0, "constant errors");
    ensure!(npe(&[1.0, 3.0, 2.0]).unwrap() == 2.0, "npe of [1,3,2]");
    ensure!(max_error(&[1.0, 3.0, 2.0]).unwrap() == 3.0, "max of [1,3,2]");
    ensure!(max_error(&[-5.0, 3.0]).unwrap() == 5.0, "max uses magnitudes");
    ensure!(npe(&[]).is_err() && max_error(&[]).is_err(), "empty lists must fail");
    let base = [0.25, -1.5, 3.0, 0.125];
    for c in [-7.0, 0.5, 1024.0] {
        let shifted: Vec<f64> = base.iter().map(|e| e + c).collect();
        ensure!(npe(&shifted).unwrap() == npe(&base).unwrap(), "npe not translation invariant for {c}");
    }
    ensure!(barrier(-56.0, -56.0) == 0.0, "equal energies");
    ensure!((barrier(-56.0, -56.01) - 0.01).abs() < 1e-12, "barrier arithmetic");
    Ok(())
}

fn criterion_10() -> Check {
    let mut cfg = RunConfig::from_toml(H2_CURVE).map_err(|e| e.to_string())?;
    cfg.workers = 1;
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let f1 = write_curve(d1.path(), &run_curve(&cfg).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let f2 = write_curve(d2.path(), &run_curve(&cfg).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ensure!(f1.len() == f2.len(), "different file sets");
    for (a, b) in f1.iter().zip(&f2) {
        ensure!(a.file_name() == b.file_name(), "file order differs");
        ensure!(std::fs::read(a).unwrap() == std::fs::read(b).unwrap(), "{} differs between runs", a.display());
    }
    Ok(())
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("resource table parameter counts", criterion_1),
        ("resource table CNOT counts", criterion_2),
        ("JW spectrum equals determinant CI", criterion_3),
        ("H2 STO-3G curve VQE exactness", criterion_4),
        ("shift-rule gradient vs finite differences", criterion_5),
        ("PNO compactness ordering", criterion_6),
        ("seniority-zero equivalence", criterion_7),
        ("number and spin symmetry", criterion_8),
        ("error metrics", criterion_9),
        ("byte-identical outputs", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("criterion {:>2}: PASS  {name} ({secs:.2}s)", k + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {name} ({secs:.2}s): {msg}", k + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
