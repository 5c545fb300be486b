//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use pnovqe::molint::{basis_for, compute_ao_integrals, BasisName, IntegralSet, Molecule, ANGSTROM_TO_BOHR};
use pnovqe::scf::{mo_integrals, run_rhf, ScfOptions};
use pnovqe::tensor::Tensor4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `a_m` on a determinant bitstring; `None` when the mode is empty.
fn annihilate(det: u64, m: usize) -> Option<(u64, f64)> {
    if det >> m & 1 == 0 {
        return None;
    }
    let sign = if (det & ((1u64 << m) - 1)).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
    Some((det & !(1 << m), sign))
}

fn create(det: u64, m: usize) -> Option<(u64, f64)> {
    if det >> m & 1 == 1 {
        return None;
    }
    let sign = if (det & ((1u64 << m) - 1)).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
    Some((det | 1 << m, sign))
}

/// Applies `ops` right to left (last element acts first).
fn apply(det: u64, ops: &[(usize, bool)]) -> Option<(u64, f64)> {
    let mut d = det;
    let mut s = 1.0;
    for &(m, dag) in ops.iter().rev() {
        let (nd, ns) = if dag { create(d, m)? } else { annihilate(d, m)? };
        d = nd;
        s *= ns;
    }
    Some((d, s))
}

/// Determinants with `n_el` electrons over `2 n` interleaved spin orbitals.
pub fn determinants(n: usize, n_el: usize) -> Vec<u64> {
    (0u64..1 << (2 * n)).filter(|d| d.count_ones() as usize == n_el).collect()
}

/// Second-quantized Hamiltonian matrix in a determinant basis, built by
/// applying every ladder string directly to bitstrings.
pub fn ci_matrix(mo: &IntegralSet, dets: &[u64]) -> DMatrix<f64> {
    let n = mo.n_orb();
    let index = |d: u64| dets.binary_search(&d).ok();
    let dim = dets.len();
    let mut m = DMatrix::<f64>::identity(dim, dim) * mo.core_energy;
    for (col, &det) in dets.iter().enumerate() {
        for p in 0..n {
            for q in 0..n {
                for s in 0..2 {
                    let v = mo.h[(p, q)];
                    if v == 0.0 {
                        continue;
                    }
                    if let Some((d, sign)) = apply(det, &[(2 * p + s, true), (2 * q + s, false)]) {
                        if let Some(row) = index(d) {
                            m[(row, col)] += v * sign;
                        }
                    }
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let v = mo.g.get(p, q, r, s);
                        if v == 0.0 {
                            continue;
                        }
                        for a in 0..2 {
                            for b in 0..2 {
                                let ops = [(2 * p + a, true), (2 * q + b, true), (2 * s + b, false), (2 * r + a, false)];
                                if let Some((d, sign)) = apply(det, &ops) {
                                    if let Some(row) = index(d) {
                                        m[(row, col)] += 0.5 * v * sign;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    m
}

pub fn sorted_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut e: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

/// Spectrum over every particle-number sector of the Fock space.
pub fn ci_fock_spectrum(mo: &IntegralSet) -> Vec<f64> {
    let n = mo.n_orb();
    let mut all = Vec::new();
    for k in 0..=2 * n {
        all.extend(sorted_eigenvalues(ci_matrix(mo, &determinants(n, k))));
    }
    all.sort_by(f64::total_cmp);
    all
}

/// Ground energy in the `n_el` sector.
pub fn ci_ground(mo: &IntegralSet) -> f64 {
    sorted_eigenvalues(ci_matrix(mo, &determinants(mo.n_orb(), mo.n_electrons)))[0]
}

/// Random real integral set with the full 8-fold symmetry.
pub fn random_integral_set(n: usize, n_el: usize, seed: u64) -> IntegralSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = DMatrix::zeros(n, n);
    for p in 0..n {
        for q in 0..=p {
            let v = rng.random_range(-1.0..1.0);
            h[(p, q)] = v;
            h[(q, p)] = v;
        }
    }
    let mut chem = Tensor4::zeros(n);
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    chem.set_chemist_8fold(p, q, r, s, rng.random_range(-0.5..0.5));
                }
            }
        }
    }
    IntegralSet::new(h, chem.swap_inner(), rng.random_range(-1.0..1.0), n_el).unwrap()
}

pub fn h2_molecule(r_angstrom: f64) -> Molecule {
    Molecule::from_symbols(&[("H", [0.0, 0.0, 0.0]), ("H", [0.0, 0.0, r_angstrom * ANGSTROM_TO_BOHR])]).unwrap()
}

pub fn h_chain(n: usize, spacing_angstrom: f64) -> Molecule {
    let atoms: Vec<(&str, [f64; 3])> = (0..n).map(|k| ("H", [0.0, 0.0, k as f64 * spacing_angstrom * ANGSTROM_TO_BOHR])).collect();
    Molecule::from_symbols(&atoms).unwrap()
}

/// Canonical MO integrals and SCF energy.
pub fn mo_set(mol: &Molecule, basis: BasisName) -> (IntegralSet, f64) {
    let ao = compute_ao_integrals(mol, &basis_for(mol, basis).unwrap()).unwrap();
    let scf = run_rhf(&ao, mol.n_electrons(), &ScfOptions::default()).unwrap();
    assert!(scf.converged);
    (mo_integrals(&ao, &scf).unwrap(), scf.total_energy)
}
