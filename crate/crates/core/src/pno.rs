//! MP2 pair-natural orbitals: amplitudes, pair densities, budgeted global
//! selection, orthonormalization, and construction of the compressed
//! integral set.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::molint::{IntegralSet, OrbitalOrigin};

const DEGENERATE_GAP: f64 = 1e-8;
const CANONICAL_TOL: f64 = 1e-6;
const MAX_GRAM_CONDITION: f64 = 1e10;

/// First-order doubles amplitudes for every occupied pair `i <= j`.
#[derive(Debug, Clone)]
pub struct PairAmplitudes {
    pub n_occ: usize,
    pub n_virt: usize,
    pub pairs: Vec<(usize, usize)>,
    /// `t[k][(a, b)] = t^{ij}_{ab}` for `pairs[k] = (i, j)`; virtual indices are local.
    pub t: Vec<DMatrix<f64>>,
    /// Contribution of each pair; off-diagonal pairs include both orderings.
    pub pair_energies: Vec<f64>,
    pub mp2_total: f64,
}

impl PairAmplitudes {
    fn pair_index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.pairs.iter().position(|&p| p == (i, j)).expect("pair index out of range")
    }

    /// `t^{ij}_{ab}` for any ordering of `i, j`, using `t^{ji}_{ba} = t^{ij}_{ab}`.
    pub fn amplitude(&self, i: usize, j: usize, a: usize, b: usize) -> f64 {
        let t = &self.t[self.pair_index(i, j)];
        if i <= j {
            t[(a, b)]
        } else {
            t[(b, a)]
        }
    }
}

fn canonical_energies(mo: &IntegralSet) -> Result<Vec<f64>> {
    if let Some(eps) = &mo.orbital_energies {
        return Ok(eps.clone());
    }
    let f = mo.fock();
    let n = mo.n_orb();
    let mut worst: f64 = 0.0;
    for p in 0..n {
        for q in 0..n {
            if p != q {
                worst = worst.max(f[(p, q)].abs());
            }
        }
    }
    if worst > CANONICAL_TOL {
        return Err(Error::NonCanonical(worst));
    }
    Ok((0..n).map(|p| f[(p, p)]).collect())
}

/// Closed-shell MP2 amplitudes `t^{ij}_{ab} = <ij|ab> / (e_i + e_j - e_a - e_b)`.
pub fn mp2_amplitudes(mo: &IntegralSet) -> Result<PairAmplitudes> {
    let eps = canonical_energies(mo)?;
    let n_occ = mo.n_occ();
    let n_virt = mo.n_orb() - n_occ;
    let mut pairs = Vec::new();
    let mut t = Vec::new();
    let mut pair_energies = Vec::new();
    for i in 0..n_occ {
        for j in i..n_occ {
            let mut tij = DMatrix::zeros(n_virt, n_virt);
            for a in 0..n_virt {
                for b in 0..n_virt {
                    let (ga, gb) = (a + n_occ, b + n_occ);
                    let denom = eps[i] + eps[j] - eps[ga] - eps[gb];
                    if denom.abs() < DEGENERATE_GAP {
                        return Err(Error::DegenerateGap { i, j, a: ga, b: gb });
                    }
                    tij[(a, b)] = mo.g.get(i, j, ga, gb) / denom;
                }
            }
            let mut e = 0.0;
            for a in 0..n_virt {
                for b in 0..n_virt {
                    let (ga, gb) = (a + n_occ, b + n_occ);
                    e += tij[(a, b)] * (2.0 * mo.g.get(i, j, ga, gb) - mo.g.get(i, j, gb, ga));
                }
            }
            if i != j {
                e *= 2.0;
            }
            pairs.push((i, j));
            t.push(tij);
            pair_energies.push(e);
        }
    }
    let mp2_total = pair_energies.iter().sum();
    Ok(PairAmplitudes { n_occ, n_virt, pairs, t, pair_energies, mp2_total })
}

#[derive(Debug, Clone)]
pub struct PairDensities {
    pub n_occ: usize,
    pub n_virt: usize,
    pub pairs: Vec<(usize, usize)>,
    pub matrices: Vec<DMatrix<f64>>,
}

/// Pair densities `D^{ij} = 2 sym[T~ T^T + T~^T T] / (1 + delta_ij)` with
/// `T~ = 2T - T^T`. For a diagonal pair with symmetric `T` this is `2 T^2`,
/// the virtual natural-occupation matrix of the pair's doubles wavefunction.
pub fn pair_densities(amps: &PairAmplitudes) -> PairDensities {
    let matrices = amps
        .pairs
        .iter()
        .zip(&amps.t)
        .map(|(&(i, j), t)| {
            let tt = 2.0 * t - t.transpose();
            let m = &tt * t.transpose() + tt.transpose() * t;
            let sym = 0.5 * (&m + m.transpose());
            let scale = if i == j { 1.0 } else { 2.0 };
            sym * scale
        })
        .collect();
    PairDensities { n_occ: amps.n_occ, n_virt: amps.n_virt, pairs: amps.pairs.clone(), matrices }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectedPno {
    pub pair: (usize, usize),
    pub local: usize,
    pub occupation: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SelectOptions {
    /// Only diagonal pairs `(i, i)` take part.
    pub diagonal_only: bool,
    /// Drop candidates below this occupation before filling the budget.
    pub occupation_threshold: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct PnoSet {
    pub n_occ: usize,
    pub n_virt: usize,
    pub pairs: Vec<(usize, usize)>,
    /// Per pair, occupations in descending order.
    pub occupations: Vec<Vec<f64>>,
    /// Per pair, `n_virt x n_virt`, column `k` is the PNO with occupation `occupations[pair][k]`.
    pub coefficients: Vec<DMatrix<f64>>,
    /// Retained PNOs in descending occupation.
    pub selection: Vec<SelectedPno>,
    /// Candidates that were not retained, in descending occupation.
    pub discarded: Vec<SelectedPno>,
    pub diagonal_only: bool,
    pub qubit_budget: usize,
}

impl PnoSet {
    /// Ordered pair labels of the retained PNOs.
    pub fn signature(&self) -> Vec<(usize, usize)> {
        self.selection.iter().map(|s| s.pair).collect()
    }

    fn vector(&self, s: &SelectedPno) -> nalgebra::DVectorView<'_, f64> {
        let k = self.pairs.iter().position(|&p| p == s.pair).unwrap();
        self.coefficients[k].column(s.local)
    }
}

fn check_budget(qubit_budget: usize, n_occ: usize, n_virt: usize) -> Result<usize> {
    let max_feasible = 2 * (n_occ + n_virt);
    if qubit_budget % 2 != 0 {
        return Err(Error::Budget { requested: qubit_budget, max_feasible, reason: "odd qubit count".into() });
    }
    if qubit_budget / 2 < n_occ {
        return Err(Error::Budget {
            requested: qubit_budget,
            max_feasible,
            reason: format!("fewer spatial orbitals than the {n_occ} occupied ones"),
        });
    }
    let wanted = qubit_budget / 2 - n_occ;
    if wanted > n_virt {
        return Err(Error::Budget {
            requested: qubit_budget,
            max_feasible,
            reason: format!("{wanted} PNOs requested but only {n_virt} virtual orbitals exist"),
        });
    }
    Ok(wanted)
}

/// Diagonalizes every pair density and keeps the globally largest
/// occupations until `qubit_budget / 2 - n_occ` PNOs are retained. Ties are
/// broken by pair label, then local index.
pub fn select_pnos(densities: &PairDensities, qubit_budget: usize, opts: &SelectOptions) -> Result<PnoSet> {
    let wanted = check_budget(qubit_budget, densities.n_occ, densities.n_virt)?;
    let (pairs, mats): (Vec<_>, Vec<_>) = densities
        .pairs
        .iter()
        .zip(&densities.matrices)
        .filter(|((i, j), _)| !opts.diagonal_only || i == j)
        .map(|(p, m)| (*p, m.clone()))
        .unzip();

    let decomposed: Vec<(Vec<f64>, DMatrix<f64>)> = mats
        .into_par_iter()
        .map(|m| {
            let n = m.nrows();
            let eig = m.symmetric_eigen();
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
            let mut vecs = DMatrix::zeros(n, n);
            let mut occ = Vec::with_capacity(n);
            for (k, &col) in order.iter().enumerate() {
                let mut v = eig.eigenvectors.column(col).into_owned();
                let imax = v.iamax();
                if v[imax] < 0.0 {
                    v = -v;
                }
                vecs.set_column(k, &v);
                occ.push(eig.eigenvalues[col]);
            }
            (occ, vecs)
        })
        .collect();
    let (occupations, coefficients): (Vec<_>, Vec<_>) = decomposed.into_iter().unzip();

    let mut pool: Vec<SelectedPno> = pairs
        .iter()
        .zip(&occupations)
        .flat_map(|(&pair, occ)| occ.iter().enumerate().map(move |(local, &o)| SelectedPno { pair, local, occupation: o }))
        .collect();
    pool.sort_by(|a, b| {
        b.occupation
            .total_cmp(&a.occupation)
            .then(a.pair.cmp(&b.pair))
            .then(a.local.cmp(&b.local))
    });
    let mut selection = Vec::with_capacity(wanted);
    let mut discarded = Vec::new();
    for cand in pool {
        let below = opts.occupation_threshold.is_some_and(|tau| cand.occupation < tau);
        if selection.len() < wanted && !below {
            selection.push(cand);
        } else {
            discarded.push(cand);
        }
    }
    Ok(PnoSet {
        n_occ: densities.n_occ,
        n_virt: densities.n_virt,
        pairs,
        occupations,
        coefficients,
        selection,
        discarded,
        diagonal_only: opts.diagonal_only,
        qubit_budget,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orthonormalization {
    #[default]
    Cholesky,
    Symmetric,
}

/// Orthonormal orbital set: occupied orbitals followed by the retained PNOs.
#[derive(Debug, Clone)]
pub struct OrbitalSpace {
    pub n_parent: usize,
    pub occupied: Vec<usize>,
    pub assignment: Vec<OrbitalOrigin>,
    /// `n_parent x n_total`, columns are the new orbitals in the parent basis.
    pub transform: DMatrix<f64>,
}

impl OrbitalSpace {
    pub fn n_total(&self) -> usize {
        self.transform.ncols()
    }

    pub fn n_occ(&self) -> usize {
        self.occupied.len()
    }

    /// Orbitals of PNO origin `(i, i)`, in space order.
    pub fn diagonal_set(&self, i: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, o)| **o == OrbitalOrigin::Pair(i, i))
            .map(|(k, _)| k)
            .collect()
    }

    /// Space over an already orthonormal basis with an explicit pair
    /// assignment for orbitals `n_occ..`; the transform is the identity.
    pub fn with_assignment(n_occ: usize, pno_pairs: &[(usize, usize)]) -> Result<Self> {
        let n = n_occ + pno_pairs.len();
        let mut assignment: Vec<OrbitalOrigin> = (0..n_occ).map(OrbitalOrigin::Occupied).collect();
        for &(i, j) in pno_pairs {
            if i > j || j >= n_occ {
                return Err(Error::Orbitals(format!("invalid pair label ({i},{j}) for {n_occ} occupied orbitals")));
            }
            assignment.push(OrbitalOrigin::Pair(i, j));
        }
        Ok(Self { n_parent: n, occupied: (0..n_occ).collect(), assignment, transform: DMatrix::identity(n, n) })
    }

    pub fn check_orthonormal(&self) -> Result<()> {
        let n = self.n_total();
        let dev = (self.transform.transpose() * &self.transform - DMatrix::<f64>::identity(n, n)).abs().max();
        if dev > 1e-8 {
            return Err(Error::Orbitals(format!("transform not orthonormal (deviation {dev:e})")));
        }
        Ok(())
    }
}

/// Orthonormalizes the retained PNOs (embedded in the parent MO basis, whose
/// overlap is the identity) and prepends the occupied orbitals. Cholesky
/// keeps the first, highest-occupation PNO fixed up to normalization.
pub fn orthonormalize(pnos: &PnoSet, method: Orthonormalization) -> Result<OrbitalSpace> {
    let n_occ = pnos.n_occ;
    let n_parent = n_occ + pnos.n_virt;
    let m = pnos.selection.len();
    let mut v = DMatrix::zeros(n_parent, m);
    for (k, s) in pnos.selection.iter().enumerate() {
        // occupied block stays zero: PNOs live in the virtual space, so the
        // projection against occupied orbitals is exact here
        v.view_mut((n_occ, k), (pnos.n_virt, 1)).copy_from(&pnos.vector(s));
    }
    let vt = orthonormalize_columns(&v, method)?;
    let mut transform = DMatrix::zeros(n_parent, n_occ + m);
    for i in 0..n_occ {
        transform[(i, i)] = 1.0;
    }
    transform.view_mut((0, n_occ), (n_parent, m)).copy_from(&vt);
    let mut assignment: Vec<OrbitalOrigin> = (0..n_occ).map(OrbitalOrigin::Occupied).collect();
    assignment.extend(pnos.selection.iter().map(|s| OrbitalOrigin::Pair(s.pair.0, s.pair.1)));
    Ok(OrbitalSpace { n_parent, occupied: (0..n_occ).collect(), assignment, transform })
}

/// Orthonormalizes the columns of `v` (identity metric) in column order.
pub fn orthonormalize_columns(v: &DMatrix<f64>, method: Orthonormalization) -> Result<DMatrix<f64>> {
    let m = v.ncols();
    if m == 0 {
        return Ok(v.clone());
    }
    let gram = v.transpose() * v;
    let eig = gram.clone().symmetric_eigen();
    let (lo, hi) = (eig.eigenvalues.min(), eig.eigenvalues.max());
    if !(lo > 0.0) || hi / lo > MAX_GRAM_CONDITION {
        return Err(Error::LinearlyDependentPnos);
    }
    match method {
        Orthonormalization::Cholesky => {
            let chol = gram.cholesky().ok_or(Error::LinearlyDependentPnos)?;
            let l = chol.l();
            // V L^{-T}: solve L X^T = V^T
            let xt = l.solve_lower_triangular(&v.transpose()).ok_or(Error::LinearlyDependentPnos)?;
            Ok(xt.transpose())
        }
        Orthonormalization::Symmetric => {
            let inv_sqrt = &eig.eigenvectors
                * DMatrix::from_diagonal(&eig.eigenvalues.map(|x| 1.0 / x.sqrt()))
                * eig.eigenvectors.transpose();
            Ok(v * inv_sqrt)
        }
    }
}

/// Integrals over the orbitals of `space`; orbital order is occupied then
/// PNOs in selection order. The new orbitals are not canonical, so no
/// orbital energies are attached.
pub fn build_final_integrals(mo: &IntegralSet, space: &OrbitalSpace) -> Result<IntegralSet> {
    if space.n_parent != mo.n_orb() {
        return Err(Error::Dimension(format!(
            "orbital space built on {} orbitals, integrals have {}",
            space.n_parent,
            mo.n_orb()
        )));
    }
    space.check_orthonormal()?;
    let u = &space.transform;
    let h = u.transpose() * &mo.h * u;
    let h = 0.5 * (&h + h.transpose());
    let g = mo.g.transform(u);
    let set = IntegralSet {
        h,
        g,
        core_energy: mo.core_energy,
        orbital_energies: None,
        n_electrons: mo.n_electrons,
        pair_origin: Some(space.assignment.clone()),
    };
    set.validate()?;
    Ok(set)
}

/// Folds the listed occupied orbitals into the core energy and a modified
/// one-body operator over the remaining orbitals.
pub fn freeze_core(mo: &IntegralSet, frozen: &[usize]) -> Result<IntegralSet> {
    let n_occ = mo.n_occ();
    let mut sorted = frozen.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != frozen.len() {
        return Err(Error::Orbitals("duplicate frozen orbital".into()));
    }
    if let Some(&bad) = sorted.iter().find(|&&i| i >= n_occ) {
        return Err(Error::Orbitals(format!("orbital {bad} is not occupied (n_occ = {n_occ})")));
    }
    if sorted.is_empty() {
        return Ok(mo.clone());
    }
    let g = &mo.g;
    let mut core = mo.core_energy;
    for &i in &sorted {
        core += 2.0 * mo.h[(i, i)];
        for &j in &sorted {
            core += 2.0 * g.get(i, j, i, j) - g.get(i, j, j, i);
        }
    }
    let keep: Vec<usize> = (0..mo.n_orb()).filter(|p| !sorted.contains(p)).collect();
    let m = keep.len();
    let mut h = DMatrix::zeros(m, m);
    for (a, &p) in keep.iter().enumerate() {
        for (b, &q) in keep.iter().enumerate() {
            let mut v = mo.h[(p, q)];
            for &i in &sorted {
                v += 2.0 * g.get(p, i, q, i) - g.get(p, i, i, q);
            }
            h[(a, b)] = v;
        }
    }
    let set = IntegralSet {
        h,
        g: g.select(&keep),
        core_energy: core,
        orbital_energies: mo.orbital_energies.as_ref().map(|e| keep.iter().map(|&p| e[p]).collect()),
        n_electrons: mo.n_electrons - 2 * sorted.len(),
        pair_origin: mo.pair_origin.as_ref().map(|o| keep.iter().map(|&p| o[p]).collect()),
    };
    set.validate()?;
    Ok(set)
}
