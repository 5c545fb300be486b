use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::Tensor4;

/// Where an orbital of a compressed space came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum OrbitalOrigin {
    /// Occupied Hartree-Fock orbital (index in the parent space).
    Occupied(usize),
    /// Pair-natural orbital of the occupied pair `(i, j)`, `i <= j`.
    Pair(usize, usize),
}

/// Molecular-orbital integrals over spatial orbitals. `g` is stored in
/// physicists' notation, `g[p,q,r,s] = <pq|rs> = (pr|qs)`.
#[derive(Debug, Clone)]
pub struct IntegralSet {
    pub h: DMatrix<f64>,
    pub g: Tensor4,
    pub core_energy: f64,
    pub orbital_energies: Option<Vec<f64>>,
    pub n_electrons: usize,
    pub pair_origin: Option<Vec<OrbitalOrigin>>,
}

impl IntegralSet {
    pub fn new(h: DMatrix<f64>, g: Tensor4, core_energy: f64, n_electrons: usize) -> Result<Self> {
        let set = Self { h, g, core_energy, orbital_energies: None, n_electrons, pair_origin: None };
        set.validate()?;
        Ok(set)
    }

    pub fn n_orb(&self) -> usize {
        self.h.nrows()
    }

    pub fn n_occ(&self) -> usize {
        self.n_electrons / 2
    }

    pub fn with_orbital_energies(mut self, eps: Vec<f64>) -> Result<Self> {
        if eps.len() != self.n_orb() {
            return Err(Error::Dimension(format!("{} orbital energies for {} orbitals", eps.len(), self.n_orb())));
        }
        self.orbital_energies = Some(eps);
        Ok(self)
    }

    /// Dimensions, electron count and index symmetries to `1e-12`.
    pub fn validate(&self) -> Result<()> {
        let n = self.h.nrows();
        if self.h.ncols() != n || self.g.dim() != n {
            return Err(Error::Dimension(format!(
                "h is {}x{}, g has dimension {}",
                self.h.nrows(),
                self.h.ncols(),
                self.g.dim()
            )));
        }
        if self.n_electrons % 2 != 0 {
            return Err(Error::Molecule(format!("odd electron count {}", self.n_electrons)));
        }
        if self.n_electrons / 2 > n {
            return Err(Error::Molecule(format!("{} electrons do not fit in {n} orbitals", self.n_electrons)));
        }
        if let Some(e) = &self.orbital_energies {
            if e.len() != n {
                return Err(Error::Dimension("orbital energy count".into()));
            }
        }
        if let Some(o) = &self.pair_origin {
            if o.len() != n {
                return Err(Error::Dimension("pair origin count".into()));
            }
        }
        let tol = 1e-12;
        for p in 0..n {
            for q in 0..n {
                if (self.h[(p, q)] - self.h[(q, p)]).abs() > tol {
                    return Err(Error::Dimension(format!("h not symmetric at ({p},{q})")));
                }
                for r in 0..n {
                    for s in 0..n {
                        let v = self.g.get(p, q, r, s);
                        let others = [self.g.get(q, p, s, r), self.g.get(r, q, p, s), self.g.get(p, s, r, q)];
                        if others.iter().any(|o| (o - v).abs() > tol) {
                            return Err(Error::Dimension(format!("<pq|rs> symmetry broken at ({p},{q},{r},{s})")));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Closed-shell Fock matrix `f_pq = h_pq + sum_i (2<pi|qi> - <pi|iq>)` over
    /// the first `n_electrons / 2` orbitals.
    pub fn fock(&self) -> DMatrix<f64> {
        let n = self.n_orb();
        let mut f = self.h.clone();
        for p in 0..n {
            for q in 0..n {
                let mut v = 0.0;
                for i in 0..self.n_occ() {
                    v += 2.0 * self.g.get(p, i, q, i) - self.g.get(p, i, i, q);
                }
                f[(p, q)] += v;
            }
        }
        f
    }

    /// Energy of the closed-shell determinant occupying the first
    /// `n_electrons / 2` orbitals.
    pub fn reference_energy(&self) -> f64 {
        let nocc = self.n_occ();
        let mut e = self.core_energy;
        for i in 0..nocc {
            e += 2.0 * self.h[(i, i)];
            for j in 0..nocc {
                e += 2.0 * self.g.get(i, j, i, j) - self.g.get(i, j, j, i);
            }
        }
        e
    }
}
