//! Exact diagonalization in particle-number sectors, and the seniority-zero
//! (paired) Hamiltonian on one qubit per spatial orbital.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fermion::{qubit_hamiltonian, PauliString, QubitOperator};
use crate::molint::IntegralSet;

/// Sectors up to this dimension are diagonalized densely.
pub const DENSE_LIMIT: usize = 600;
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Sorted computational basis states with fixed popcount and, optionally,
/// fixed `n_up - n_down` (up spins on even qubits).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorBasis {
    pub n_qubits: usize,
    pub n_particles: Option<usize>,
    pub sz2: Option<i32>,
    pub states: Vec<u64>,
}

const EVEN_BITS: u64 = 0x5555_5555_5555_5555;

impl SectorBasis {
    pub fn new(n_qubits: usize, n_particles: usize, sz2: Option<i32>) -> Result<Self> {
        if n_qubits > 30 {
            return Err(Error::Oracle(format!("{n_qubits} qubits too many for sector enumeration")));
        }
        let states: Vec<u64> = (0u64..1 << n_qubits)
            .filter(|b| b.count_ones() as usize == n_particles)
            .filter(|b| match sz2 {
                Some(s) => (b & EVEN_BITS).count_ones() as i32 - (b & !EVEN_BITS).count_ones() as i32 == s,
                None => true,
            })
            .collect();
        if states.is_empty() {
            return Err(Error::Oracle(format!(
                "empty sector: {n_particles} particles, 2Sz = {sz2:?} on {n_qubits} qubits"
            )));
        }
        Ok(Self { n_qubits, n_particles: Some(n_particles), sz2, states })
    }

    pub fn full(n_qubits: usize) -> Result<Self> {
        if n_qubits > 26 {
            return Err(Error::Oracle(format!("{n_qubits} qubits too many for the full space")));
        }
        Ok(Self { n_qubits, n_particles: None, sz2: None, states: (0u64..1 << n_qubits).collect() })
    }

    /// Seniority-zero states: qubits `2p` and `2p + 1` agree for every `p`.
    pub fn seniority_zero(n_spatial: usize, n_pairs: Option<usize>) -> Result<Self> {
        let states: Vec<u64> = (0u64..1 << n_spatial)
            .filter(|m| n_pairs.is_none_or(|k| m.count_ones() as usize == k))
            .map(|m| (0..n_spatial).filter(|p| m >> p & 1 == 1).fold(0u64, |acc, p| acc | 3 << (2 * p)))
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        if states.is_empty() {
            return Err(Error::Oracle("empty seniority-zero sector".into()));
        }
        Ok(Self { n_qubits: 2 * n_spatial, n_particles: n_pairs.map(|k| 2 * k), sz2: n_pairs.map(|_| 0), states })
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn index_of(&self, b: u64) -> Option<usize> {
        self.states.binary_search(&b).ok()
    }
}

/// Sparse Hermitian matrix of an operator projected onto a basis, stored by
/// columns.
struct SectorMatrix {
    cols: Vec<Vec<(usize, Complex64)>>,
}

impl SectorMatrix {
    fn build(h: &QubitOperator, basis: &SectorBasis) -> Self {
        let mut groups: std::collections::BTreeMap<u64, Vec<(PauliString, Complex64)>> = Default::default();
        for (p, c) in h.terms() {
            groups.entry(p.x_mask()).or_default().push((*p, *c));
        }
        let groups: Vec<(u64, Vec<(PauliString, Complex64)>)> = groups.into_iter().collect();
        let cols = basis
            .states
            .par_iter()
            .map(|&b| {
                let mut col = Vec::new();
                for (x, terms) in &groups {
                    let Some(r) = basis.index_of(b ^ x) else { continue };
                    let v: Complex64 = terms.iter().map(|(p, c)| c * p.apply_phase(b)).sum();
                    if v.norm() > 0.0 {
                        col.push((r, v));
                    }
                }
                col
            })
            .collect();
        Self { cols }
    }

    fn dim(&self) -> usize {
        self.cols.len()
    }

    /// `H v` using `H[r, c] = conj(H[c, r])`, one row per task.
    fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.cols.par_iter().map(|col| col.iter().map(|(c, m)| m.conj() * v[*c]).sum()).collect()
    }

    fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for (c, col) in self.cols.iter().enumerate() {
            for (r, v) in col {
                m[(*r, c)] += v;
            }
        }
        m
    }
}

/// Matrix of `h` in the given basis (rows and columns ordered as `basis.states`).
pub fn operator_matrix(h: &QubitOperator, basis: &SectorBasis) -> Result<DMatrix<Complex64>> {
    check(h, basis)?;
    Ok(SectorMatrix::build(h, basis).to_dense())
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut e: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

/// Full ascending spectrum of `h` within `basis` (dense).
pub fn spectrum(h: &QubitOperator, basis: &SectorBasis) -> Result<Vec<f64>> {
    Ok(hermitian_eigenvalues(&operator_matrix(h, basis)?))
}

fn check(h: &QubitOperator, basis: &SectorBasis) -> Result<()> {
    if h.n_qubits() != basis.n_qubits {
        return Err(Error::Dimension(format!("operator on {} qubits, basis on {}", h.n_qubits(), basis.n_qubits)));
    }
    let im = h.max_imaginary();
    if im >= 1e-8 {
        return Err(Error::NonHermitian(im));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    /// Coefficients over `basis.states`.
    pub vector: Vec<Complex64>,
    pub basis: SectorBasis,
    pub residual: f64,
}

impl GroundState {
    /// The ground vector embedded in the full `2^n` register.
    pub fn full_amplitudes(&self) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); 1 << self.basis.n_qubits];
        for (b, v) in self.basis.states.iter().zip(&self.vector) {
            out[*b as usize] = *v;
        }
        out
    }
}

/// Lowest eigenpair of `h` restricted to `basis`: dense solve for small
/// sectors, restarted Lanczos with full reorthogonalization otherwise.
pub fn exact_ground_energy(h: &QubitOperator, basis: &SectorBasis) -> Result<GroundState> {
    check(h, basis)?;
    let m = SectorMatrix::build(h, basis);
    let (energy, vector) = if m.dim() <= DENSE_LIMIT {
        let eig = m.to_dense().symmetric_eigen();
        let k = (0..eig.eigenvalues.len()).min_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b])).unwrap();
        (eig.eigenvalues[k], eig.eigenvectors.column(k).iter().copied().collect::<Vec<_>>())
    } else {
        lanczos(&m)?
    };
    let hv = m.apply(&vector);
    let residual = hv.iter().zip(&vector).map(|(a, v)| (a - energy * v).norm_sqr()).sum::<f64>().sqrt();
    if residual >= RESIDUAL_TOL {
        return Err(Error::Oracle(format!("ground state residual {residual:e} above {RESIDUAL_TOL:e}")));
    }
    Ok(GroundState { energy, vector, basis: basis.clone(), residual })
}

fn normalize(v: &mut [Complex64]) -> f64 {
    let n = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|a| *a /= n);
    n
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn lanczos(m: &SectorMatrix) -> Result<(f64, Vec<Complex64>)> {
    const KRYLOV: usize = 60;
    const RESTARTS: usize = 60;
    let dim = m.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut start: Vec<Complex64> = (0..dim).map(|_| Complex64::new(rng.random_range(-1.0..1.0), 0.0)).collect();
    normalize(&mut start);
    let mut best = (f64::INFINITY, start.clone());
    for _ in 0..RESTARTS {
        let mut q: Vec<Vec<Complex64>> = vec![start.clone()];
        let mut alpha = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        for j in 0..KRYLOV.min(dim) {
            let mut w = m.apply(&q[j]);
            alpha.push(dot(&q[j], &w).re);
            // full reorthogonalization, twice for stability
            for _ in 0..2 {
                for qi in &q {
                    let c = dot(qi, &w);
                    w.iter_mut().zip(qi).for_each(|(a, b)| *a -= c * b);
                }
            }
            let b = w.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            if b < 1e-12 || j + 1 == KRYLOV.min(dim) {
                break;
            }
            beta.push(b);
            w.iter_mut().for_each(|a| *a /= b);
            q.push(w);
        }
        let k = alpha.len();
        let mut t = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = t.symmetric_eigen();
        let idx = (0..k).min_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b])).unwrap();
        let y: DVector<f64> = eig.eigenvectors.column(idx).into_owned();
        let mut ritz = vec![Complex64::default(); dim];
        for (i, qi) in q.iter().take(k).enumerate() {
            ritz.iter_mut().zip(qi).for_each(|(r, a)| *r += y[i] * a);
        }
        normalize(&mut ritz);
        let e = eig.eigenvalues[idx];
        let hv = m.apply(&ritz);
        let res = hv.iter().zip(&ritz).map(|(a, v)| (a - e * v).norm_sqr()).sum::<f64>().sqrt();
        best = (e, ritz.clone());
        if res < 1e-10 {
            break;
        }
        start = ritz;
    }
    Ok(best)
}

/// FCI energy of a closed-shell integral set (singlet-compatible `S_z = 0` sector).
pub fn fci_energy(mo: &IntegralSet) -> Result<f64> {
    let h = qubit_hamiltonian(mo)?;
    let basis = SectorBasis::new(2 * mo.n_orb(), mo.n_electrons, Some(0))?;
    Ok(exact_ground_energy(&h, &basis)?.energy)
}

/// Seniority-zero Hamiltonian on `n_orb` qubits (qubit `p` set means spatial
/// orbital `p` doubly occupied):
/// `core + sum_p (2h_pp + <pp|pp>) n_p + sum_{p<q} (4<pq|pq> - 2<pq|qp>) n_p n_q
///  + sum_{p!=q} <pp|qq> P+_p P_q`, with `P+ = (X - iY)/2`.
pub fn build_paired_hamiltonian(mo: &IntegralSet) -> Result<QubitOperator> {
    let n = mo.n_orb();
    let one = Complex64::new(1.0, 0.0);
    let z = |q: usize| QubitOperator::from_term(PauliString::from_letters(n, &[(q, 'Z')]).unwrap(), one);
    let num = |q: usize| -> Result<QubitOperator> { QubitOperator::identity(n, 0.5).sub(&z(q).scale(Complex64::new(0.5, 0.0))) };
    let raise = |q: usize| -> Result<QubitOperator> {
        let mut op = QubitOperator::zero(n);
        op.add_term(PauliString::from_letters(n, &[(q, 'X')])?, Complex64::new(0.5, 0.0));
        op.add_term(PauliString::from_letters(n, &[(q, 'Y')])?, Complex64::new(0.0, -0.5));
        Ok(op)
    };
    let mut h = QubitOperator::identity(n, mo.core_energy);
    for p in 0..n {
        let c = 2.0 * mo.h[(p, p)] + mo.g.get(p, p, p, p);
        h = h.add(&num(p)?.scale(Complex64::new(c, 0.0)))?;
    }
    for p in 0..n {
        for q in p + 1..n {
            let c = 4.0 * mo.g.get(p, q, p, q) - 2.0 * mo.g.get(p, q, q, p);
            if c != 0.0 {
                h = h.add(&num(p)?.mul(&num(q)?)?.scale(Complex64::new(c, 0.0)))?;
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            let c = mo.g.get(p, p, q, q);
            if p != q && c != 0.0 {
                h = h.add(&raise(p)?.mul(&raise(q)?.adjoint())?.scale(Complex64::new(c, 0.0)))?;
            }
        }
    }
    h.simplify();
    Ok(h)
}
