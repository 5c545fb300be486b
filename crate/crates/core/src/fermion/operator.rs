use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::qubit::PRUNE_TOL;

/// One creation (`dagger = true`) or annihilation operator on a spin orbital.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Ladder {
    pub mode: usize,
    pub dagger: bool,
}

impl Ladder {
    pub fn create(mode: usize) -> Self {
        Self { mode, dagger: true }
    }

    pub fn annihilate(mode: usize) -> Self {
        Self { mode, dagger: false }
    }

    pub fn adjoint(self) -> Self {
        Self { mode: self.mode, dagger: !self.dagger }
    }
}

/// Real linear combination of normal-ordered ladder-operator products.
/// Stored terms have creations left of annihilations and descending mode
/// indices within each group; the empty product is the identity.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FermionOperator {
    terms: BTreeMap<Vec<Ladder>, f64>,
}

impl FermionOperator {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity(coeff: f64) -> Self {
        let mut op = Self::zero();
        op.add_product(&[], coeff);
        op
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Ladder>, &f64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, ops: &[Ladder]) -> f64 {
        self.terms.get(ops).copied().unwrap_or(0.0)
    }

    /// Highest mode index referenced, if any.
    pub fn max_mode(&self) -> Option<usize> {
        self.terms.keys().flat_map(|k| k.iter().map(|l| l.mode)).max()
    }

    /// Adds `coeff * ops[0] ops[1] ...`, normal ordering on the way in.
    pub fn add_product(&mut self, ops: &[Ladder], coeff: f64) {
        if coeff == 0.0 {
            return;
        }
        for (term, c) in normal_order(ops.to_vec(), coeff) {
            *self.terms.entry(term).or_insert(0.0) += c;
        }
    }

    pub fn simplify(&mut self) {
        self.terms.retain(|_, c| c.abs() >= PRUNE_TOL);
    }

    pub fn add(&mut self, other: &Self) {
        for (k, c) in &other.terms {
            *self.terms.entry(k.clone()).or_insert(0.0) += c;
        }
        self.simplify();
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = Self { terms: self.terms.iter().map(|(k, c)| (k.clone(), c * s)).collect() };
        out.simplify();
        out
    }

    /// Hermitian adjoint, re-normal-ordered.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero();
        for (k, c) in &self.terms {
            let rev: Vec<Ladder> = k.iter().rev().map(|l| l.adjoint()).collect();
            out.add_product(&rev, *c);
        }
        out.simplify();
        out
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let adj = self.adjoint();
        let ok = self.terms.keys().chain(adj.terms.keys()).all(|k| (self.coefficient(k) - adj.coefficient(k)).abs() < tol);
        ok
    }
}

/// Normal orders a product by adjacent swaps, emitting the contraction
/// terms produced by `a_p a^dag_p = 1 - a^dag_p a_p`.
fn normal_order(ops: Vec<Ladder>, coeff: f64) -> Vec<(Vec<Ladder>, f64)> {
    let mut out = Vec::new();
    let mut stack = vec![(ops, coeff)];
    'outer: while let Some((mut term, mut c)) = stack.pop() {
        for i in 1..term.len() {
            for j in (1..=i).rev() {
                let (left, right) = (term[j - 1], term[j]);
                if right.dagger && !left.dagger {
                    term.swap(j - 1, j);
                    c = -c;
                    if left.mode == right.mode {
                        let mut reduced = term.clone();
                        reduced.drain(j - 1..=j);
                        stack.push((reduced, -c));
                    }
                } else if right.dagger == left.dagger {
                    if right.mode == left.mode {
                        continue 'outer;
                    }
                    if right.mode > left.mode {
                        term.swap(j - 1, j);
                        c = -c;
                    }
                }
            }
        }
        out.push((term, c));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(m: usize) -> Ladder {
        Ladder::create(m)
    }
    fn a(m: usize) -> Ladder {
        Ladder::annihilate(m)
    }

    #[test]
    fn anticommutation() {
        // a_0 a^dag_0 = 1 - a^dag_0 a_0
        let mut op = FermionOperator::zero();
        op.add_product(&[a(0), c(0)], 1.0);
        assert_eq!(op.coefficient(&[]), 1.0);
        assert_eq!(op.coefficient(&[c(0), a(0)]), -1.0);
        assert_eq!(op.len(), 2);
        // a_1 a^dag_0 = -a^dag_0 a_1
        let mut op = FermionOperator::zero();
        op.add_product(&[a(1), c(0)], 1.0);
        assert_eq!(op.coefficient(&[c(0), a(1)]), -1.0);
        // pauli exclusion
        let mut op = FermionOperator::zero();
        op.add_product(&[c(2), c(2)], 1.0);
        assert!(op.is_empty());
        // descending order within groups
        let mut op = FermionOperator::zero();
        op.add_product(&[c(0), c(3), a(1), a(2)], 1.0);
        assert_eq!(op.coefficient(&[c(3), c(0), a(2), a(1)]), 1.0);
    }

    #[test]
    fn hermiticity() {
        let mut op = FermionOperator::zero();
        op.add_product(&[c(0), a(1)], 0.5);
        assert!(!op.is_hermitian(1e-12));
        op.add_product(&[c(1), a(0)], 0.5);
        assert!(op.is_hermitian(1e-12));
    }
}
