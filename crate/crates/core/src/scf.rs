//! Restricted closed-shell Hartree-Fock (Roothaan) with optional DIIS.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::molint::{AOIntegralSet, IntegralSet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScfOptions {
    pub max_iter: usize,
    pub energy_tol: f64,
    pub density_tol: f64,
    pub diis: bool,
    pub diis_size: usize,
}

impl Default for ScfOptions {
    fn default() -> Self {
        Self { max_iter: 200, energy_tol: 1e-11, density_tol: 1e-9, diis: true, diis_size: 8 }
    }
}

#[derive(Debug, Clone)]
pub struct ScfResult {
    /// `n_ao x n_orb`, columns are canonical MOs in ascending energy.
    pub mo_coefficients: DMatrix<f64>,
    pub orbital_energies: Vec<f64>,
    pub total_energy: f64,
    pub converged: bool,
    pub iterations: usize,
    /// `D = 2 C_occ C_occ^T`
    pub density_matrix: DMatrix<f64>,
    /// Energy of each new density, one entry per iteration.
    pub energy_history: Vec<f64>,
    pub n_electrons: usize,
}

impl ScfResult {
    pub fn n_occ(&self) -> usize {
        self.n_electrons / 2
    }
}

fn fock_matrix(ao: &AOIntegralSet, d: &DMatrix<f64>) -> DMatrix<f64> {
    let n = ao.n_ao;
    let mut f = ao.core_hamiltonian.clone();
    for p in 0..n {
        for q in 0..=p {
            let mut g = 0.0;
            for r in 0..n {
                for s in 0..n {
                    let drs = d[(r, s)];
                    if drs == 0.0 {
                        continue;
                    }
                    g += drs * (ao.eri.get(p, q, r, s) - 0.5 * ao.eri.get(p, r, q, s));
                }
            }
            f[(p, q)] += g;
            if p != q {
                f[(q, p)] += g;
            }
        }
    }
    f
}

fn energy(ao: &AOIntegralSet, d: &DMatrix<f64>, f: &DMatrix<f64>) -> f64 {
    0.5 * d.component_mul(&(&ao.core_hamiltonian + f)).sum() + ao.nuclear_repulsion
}

/// Diagonalizes `F` in the orthogonalized basis; returns ascending energies and
/// AO coefficients.
fn solve_roothaan(f: &DMatrix<f64>, x: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let fp = x.transpose() * f * x;
    let eig = fp.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let n = order.len();
    let mut c = DMatrix::zeros(x.nrows(), n);
    let mut eps = Vec::with_capacity(n);
    for (k, &col) in order.iter().enumerate() {
        let mut v = x * eig.eigenvectors.column(col);
        // fix the sign so the largest-magnitude component is positive
        let imax = v.iamax();
        if v[imax] < 0.0 {
            v = -v;
        }
        c.set_column(k, &v);
        eps.push(eig.eigenvalues[col]);
    }
    (eps, c)
}

fn density(c: &DMatrix<f64>, n_occ: usize) -> DMatrix<f64> {
    let occ = c.columns(0, n_occ);
    2.0 * &occ * occ.transpose()
}

/// Symmetric orthogonalizer `S^{-1/2}`; errors on near-singular overlap.
pub fn symmetric_orthogonalizer(s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = s.clone().symmetric_eigen();
    let smallest = eig.eigenvalues.min();
    if smallest < 1e-10 {
        return Err(Error::LinearDependence(smallest));
    }
    let inv_sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| 1.0 / v.sqrt()));
    Ok(&eig.eigenvectors * inv_sqrt * eig.eigenvectors.transpose())
}

struct Diis {
    size: usize,
    focks: VecDeque<DMatrix<f64>>,
    errors: VecDeque<DMatrix<f64>>,
}

impl Diis {
    fn push(&mut self, f: DMatrix<f64>, e: DMatrix<f64>) {
        if self.focks.len() == self.size {
            self.focks.pop_front();
            self.errors.pop_front();
        }
        self.focks.push_back(f);
        self.errors.push_back(e);
    }

    fn extrapolate(&self) -> Option<DMatrix<f64>> {
        let m = self.focks.len();
        if m < 2 {
            return None;
        }
        let mut b = DMatrix::zeros(m + 1, m + 1);
        for i in 0..m {
            for j in 0..m {
                b[(i, j)] = self.errors[i].dot(&self.errors[j]);
            }
            b[(i, m)] = -1.0;
            b[(m, i)] = -1.0;
        }
        let mut rhs = DVector::zeros(m + 1);
        rhs[m] = -1.0;
        let coef = b.lu().solve(&rhs)?;
        if coef.iter().any(|c| !c.is_finite()) {
            return None;
        }
        let mut f = DMatrix::zeros(self.focks[0].nrows(), self.focks[0].ncols());
        for (i, fi) in self.focks.iter().enumerate() {
            f += coef[i] * fi;
        }
        Some(f)
    }
}

/// Runs closed-shell RHF from the core-Hamiltonian guess. Non-convergence is
/// reported through `converged = false`, not as an error.
pub fn run_rhf(ao: &AOIntegralSet, n_electrons: usize, opts: &ScfOptions) -> Result<ScfResult> {
    if n_electrons % 2 != 0 {
        return Err(Error::Molecule(format!("odd electron count {n_electrons}")));
    }
    if n_electrons > 2 * ao.n_ao {
        return Err(Error::Molecule(format!("{n_electrons} electrons exceed {} basis functions", ao.n_ao)));
    }
    let n_occ = n_electrons / 2;
    let x = symmetric_orthogonalizer(&ao.overlap)?;
    let (_, c0) = solve_roothaan(&ao.core_hamiltonian, &x);
    let mut d = density(&c0, n_occ);
    let mut f = fock_matrix(ao, &d);
    let mut e = energy(ao, &d, &f);
    let mut diis = Diis { size: opts.diis_size.max(2), focks: VecDeque::new(), errors: VecDeque::new() };
    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    for it in 1..=opts.max_iter {
        iterations = it;
        let f_used = if opts.diis {
            let err = &f * &d * &ao.overlap - &ao.overlap * &d * &f;
            diis.push(f.clone(), x.transpose() * err * &x);
            diis.extrapolate().unwrap_or_else(|| f.clone())
        } else {
            f.clone()
        };
        let (_, c) = solve_roothaan(&f_used, &x);
        let d_new = density(&c, n_occ);
        let f_new = fock_matrix(ao, &d_new);
        let e_new = energy(ao, &d_new, &f_new);
        history.push(e_new);
        let d_change = (&d_new - &d).abs().max();
        let e_change = (e_new - e).abs();
        d = d_new;
        f = f_new;
        e = e_new;
        if d_change < opts.density_tol && e_change < opts.energy_tol {
            converged = true;
            break;
        }
    }

    let (eps, c) = solve_roothaan(&f, &x);
    let d_final = density(&c, n_occ);
    let f_final = fock_matrix(ao, &d_final);
    Ok(ScfResult {
        total_energy: energy(ao, &d_final, &f_final),
        mo_coefficients: c,
        orbital_energies: eps,
        converged,
        iterations,
        density_matrix: d_final,
        energy_history: history,
        n_electrons,
    })
}

/// Transforms AO integrals into the MO basis given by the columns of `c`.
pub fn transform_to_mo(
    ao: &AOIntegralSet,
    c: &DMatrix<f64>,
    n_electrons: usize,
    orbital_energies: Option<&[f64]>,
) -> Result<IntegralSet> {
    if c.nrows() != ao.n_ao {
        return Err(Error::Dimension(format!("coefficients have {} rows for {} AOs", c.nrows(), ao.n_ao)));
    }
    let m = c.ncols();
    let ortho = c.transpose() * &ao.overlap * c;
    let dev = (&ortho - DMatrix::<f64>::identity(m, m)).abs().max();
    if dev > 1e-8 {
        return Err(Error::Dimension(format!("coefficients not orthonormal (C^T S C deviates by {dev:e})")));
    }
    let h = c.transpose() * &ao.core_hamiltonian * c;
    let h = 0.5 * (&h + h.transpose());
    // (pr|qs) in MO basis, then reorder to <pq|rs>
    let g = ao.eri.transform(c).swap_inner();
    let mut set = IntegralSet {
        h,
        g,
        core_energy: ao.nuclear_repulsion,
        orbital_energies: None,
        n_electrons,
        pair_origin: None,
    };
    if let Some(eps) = orbital_energies {
        set = set.with_orbital_energies(eps.to_vec())?;
    }
    set.validate()?;
    Ok(set)
}

/// `transform_to_mo` using an SCF solution.
pub fn mo_integrals(ao: &AOIntegralSet, scf: &ScfResult) -> Result<IntegralSet> {
    transform_to_mo(ao, &scf.mo_coefficients, scf.n_electrons, Some(&scf.orbital_energies))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molint::{basis_for, compute_ao_integrals, BasisName, BasisShell, Molecule};

    fn h2_ao(r: f64) -> AOIntegralSet {
        let m = Molecule::from_symbols(&[("H", [0.0; 3]), ("H", [0.0, 0.0, r])]).unwrap();
        compute_ao_integrals(&m, &basis_for(&m, BasisName::Sto3g).unwrap()).unwrap()
    }

    // energy from a density by explicit contraction over the integral tensor
    fn oracle_energy(ao: &AOIntegralSet, d: &DMatrix<f64>) -> f64 {
        let n = ao.n_ao;
        let mut e = ao.nuclear_repulsion;
        for p in 0..n {
            for q in 0..n {
                e += d[(p, q)] * ao.core_hamiltonian[(p, q)];
                for r in 0..n {
                    for s in 0..n {
                        e += 0.5 * d[(p, q)] * d[(r, s)] * (ao.eri.get(p, q, r, s) - 0.5 * ao.eri.get(p, r, q, s));
                    }
                }
            }
        }
        e
    }

    #[test]
    fn single_function_closed_form() {
        let m = Molecule::from_symbols(&[("He", [0.0; 3])]).unwrap();
        let ao = compute_ao_integrals(&m, &[BasisShell::primitive([0.0; 3], 0.8).unwrap()]).unwrap();
        let r = run_rhf(&ao, 2, &ScfOptions::default()).unwrap();
        let want = 2.0 * ao.core_hamiltonian[(0, 0)] + ao.eri.get(0, 0, 0, 0) + ao.nuclear_repulsion;
        assert!((r.total_energy - want).abs() < 1e-14);
        assert!(r.converged);
        assert_eq!(r.iterations, 1);
    }

    #[test]
    fn h2_sto3g() {
        let ao = h2_ao(1.4);
        let r = run_rhf(&ao, 2, &ScfOptions::default()).unwrap();
        assert!(r.converged);
        assert!((r.total_energy - oracle_energy(&ao, &r.density_matrix)).abs() < 1e-12);
        // regression pin
        assert!((r.total_energy - (-1.116_714_3)).abs() < 2e-6, "E_HF = {}", r.total_energy);
        // occupied MO is the symmetric combination
        let s12 = ao.overlap[(0, 1)];
        let expect = 1.0 / (2.0 * (1.0 + s12)).sqrt();
        let c = r.mo_coefficients.column(0);
        assert!((c[0].abs() - expect).abs() < 1e-10 && (c[1].abs() - expect).abs() < 1e-10);
        assert!(c[0] * c[1] > 0.0);
    }

    #[test]
    fn invariants_and_monotone_without_diis() {
        let m = Molecule::from_symbols(&[("H", [0.0; 3]), ("H", [0.0, 0.0, 1.5]), ("He", [0.0, 0.0, 3.3])]).unwrap();
        let ao = compute_ao_integrals(&m, &basis_for(&m, BasisName::Pople631g).unwrap()).unwrap();
        let opts = ScfOptions { diis: false, max_iter: 500, ..Default::default() };
        let r = run_rhf(&ao, 4, &opts).unwrap();
        assert!(r.converged);
        for w in r.energy_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "energy rose: {} -> {}", w[0], w[1]);
        }
        let n = r.mo_coefficients.ncols();
        let ctsc = r.mo_coefficients.transpose() * &ao.overlap * &r.mo_coefficients;
        assert!((ctsc - DMatrix::<f64>::identity(n, n)).abs().max() < 1e-8);
        let dsd = &r.density_matrix * &ao.overlap * &r.density_matrix;
        assert!((dsd - 2.0 * &r.density_matrix).abs().max() < 1e-6);
        assert!(r.orbital_energies.windows(2).all(|w| w[0] <= w[1]));
        // canonical: MO Fock diagonal
        let fmo = r.mo_coefficients.transpose() * fock_matrix(&ao, &r.density_matrix) * &r.mo_coefficients;
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    assert!(fmo[(p, q)].abs() < 1e-6);
                }
            }
        }
        let with_diis = run_rhf(&ao, 4, &ScfOptions::default()).unwrap();
        assert!((with_diis.total_energy - r.total_energy).abs() < 1e-9);
    }

    #[test]
    fn linear_dependence_rejected() {
        let m = Molecule::from_symbols(&[("He", [0.0; 3])]).unwrap();
        let shells = vec![BasisShell::primitive([0.0; 3], 1.0).unwrap(), BasisShell::primitive([0.0; 3], 1.0).unwrap()];
        let ao = compute_ao_integrals(&m, &shells).unwrap();
        assert!(matches!(run_rhf(&ao, 2, &ScfOptions::default()), Err(Error::LinearDependence(_))));
    }

    #[test]
    fn mo_transform() {
        let ao = h2_ao(1.4);
        let r = run_rhf(&ao, 2, &ScfOptions::default()).unwrap();
        let mo = mo_integrals(&ao, &r).unwrap();
        let e = 2.0 * mo.h[(0, 0)] + mo.g.get(0, 0, 0, 0) + mo.core_energy;
        assert!((e - r.total_energy).abs() < 1e-8);
        assert!((mo.reference_energy() - r.total_energy).abs() < 1e-8);

        // identity transform on an orthonormal AO set reproduces the input
        let m = Molecule::from_symbols(&[("He", [0.0; 3])]).unwrap();
        let single = compute_ao_integrals(&m, &[BasisShell::primitive([0.0; 3], 0.8).unwrap()]).unwrap();
        let same = transform_to_mo(&single, &DMatrix::identity(1, 1), 2, None).unwrap();
        assert!((same.h[(0, 0)] - single.core_hamiltonian[(0, 0)]).abs() < 1e-15);
        assert!((same.g.get(0, 0, 0, 0) - single.eri.get(0, 0, 0, 0)).abs() < 1e-15);

        // trace invariance under an orthogonal change of orthonormal basis
        let x = symmetric_orthogonalizer(&ao.overlap).unwrap();
        let a = transform_to_mo(&ao, &x, 2, None).unwrap();
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let rot = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        let b = transform_to_mo(&ao, &(&x * rot), 2, None).unwrap();
        assert!((a.h.trace() - b.h.trace()).abs() < 1e-10);

        assert!(matches!(transform_to_mo(&ao, &DMatrix::identity(3, 3), 2, None), Err(Error::Dimension(_))));
    }
}
