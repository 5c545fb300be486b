use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::pauli::{pauli_multiply, PauliString};
use crate::error::{Error, Result};

/// Coefficients below this magnitude are pruned on simplification.
pub const PRUNE_TOL: f64 = 1e-14;

/// Weighted sum of Pauli strings on a fixed register.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitOperator {
    n_qubits: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

impl QubitOperator {
    pub fn zero(n_qubits: usize) -> Self {
        Self { n_qubits, terms: BTreeMap::new() }
    }

    pub fn identity(n_qubits: usize, coeff: f64) -> Self {
        let mut op = Self::zero(n_qubits);
        op.add_term(PauliString::identity(n_qubits), Complex64::new(coeff, 0.0));
        op.simplify();
        op
    }

    pub fn from_term(p: PauliString, coeff: Complex64) -> Self {
        let mut op = Self::zero(p.n_qubits());
        op.add_term(p, coeff);
        op.simplify();
        op
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, p: &PauliString) -> Complex64 {
        self.terms.get(p).copied().unwrap_or_default()
    }

    /// Accumulates without pruning; call [`simplify`](Self::simplify) afterwards.
    pub fn add_term(&mut self, p: PauliString, coeff: Complex64) {
        debug_assert_eq!(p.n_qubits(), self.n_qubits);
        *self.terms.entry(p).or_default() += coeff;
    }

    pub fn simplify(&mut self) {
        self.terms.retain(|_, c| c.norm() >= PRUNE_TOL);
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::Operator(format!("qubit-count mismatch: {} vs {}", self.n_qubits, other.n_qubits)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(*p, *c);
        }
        out.simplify();
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self { n_qubits: self.n_qubits, terms: self.terms.iter().map(|(p, c)| (*p, c * s)).collect() };
        out.simplify();
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(self.n_qubits);
        for (pa, ca) in &self.terms {
            for (pb, cb) in &other.terms {
                let (pc, ph) = pauli_multiply(pa, pb)?;
                out.add_term(pc, ca * cb * ph.to_complex());
            }
        }
        out.simplify();
        Ok(out)
    }

    /// `[A, B] = AB - BA`; only anticommuting string pairs contribute.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(self.n_qubits);
        for (pa, ca) in &self.terms {
            for (pb, cb) in &other.terms {
                if pa.commutes_with(pb) {
                    continue;
                }
                let (pc, ph) = pauli_multiply(pa, pb)?;
                out.add_term(pc, 2.0 * ca * cb * ph.to_complex());
            }
        }
        out.simplify();
        Ok(out)
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_imaginary(&self) -> f64 {
        self.terms.values().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    /// Hermitian within `tol` (all Pauli coefficients real).
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_imaginary() < tol
    }

    pub fn adjoint(&self) -> Self {
        Self { n_qubits: self.n_qubits, terms: self.terms.iter().map(|(p, c)| (*p, c.conj())).collect() }
    }

    /// Same operator embedded in a register of `n` qubits.
    pub fn widen(&self, n: usize) -> Result<Self> {
        let mut out = Self::zero(n);
        for (p, c) in &self.terms {
            out.add_term(p.widen(n)?, *c);
        }
        Ok(out)
    }

    /// `out = self * input` on a full statevector.
    pub fn apply(&self, input: &[Complex64], out: &mut [Complex64]) {
        assert_eq!(input.len(), 1usize << self.n_qubits);
        assert_eq!(out.len(), input.len());
        out.iter_mut().for_each(|a| *a = Complex64::default());
        for (p, c) in &self.terms {
            let x = p.x_mask() as usize;
            for (b, amp) in input.iter().enumerate() {
                if amp.re == 0.0 && amp.im == 0.0 {
                    continue;
                }
                out[b ^ x] += c * p.apply_phase(b as u64) * amp;
            }
        }
    }

    /// Dense `2^n x 2^n` matrix; intended for small registers.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for (p, c) in &self.terms {
            let x = p.x_mask() as usize;
            for b in 0..dim {
                m[(b ^ x, b)] += c * p.apply_phase(b as u64);
            }
        }
        m
    }

    /// One term per line: `coeff  P0 P1 ...`, with `I` for the identity string.
    /// Real coefficients are written bare, complex ones as `(re,im)`; both use
    /// shortest round-trip float formatting.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# qubits {}", self.n_qubits).unwrap();
        for (p, c) in &self.terms {
            if c.im == 0.0 {
                writeln!(out, "{:?}  {p}", c.re).unwrap();
            } else {
                writeln!(out, "({:?},{:?})  {p}", c.re, c.im).unwrap();
            }
        }
        out
    }

    /// Parses [`to_text`](Self::to_text) output. Without a `# qubits` header the
    /// register is sized by the highest index present.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut declared: Option<usize> = None;
        let mut raw: Vec<(Vec<(usize, char)>, Complex64)> = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let line_no = k + 1;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            if let Some(rest) = t.strip_prefix('#') {
                if let Some(n) = rest.trim().strip_prefix("qubits") {
                    declared = Some(n.trim().parse().map_err(|_| Error::Parse {
                        line: line_no,
                        msg: format!("bad qubit count '{}'", n.trim()),
                    })?);
                }
                continue;
            }
            let mut fields = t.split_whitespace();
            let ctok = fields.next().unwrap();
            let bad = |m: String| Error::Parse { line: line_no, msg: m };
            let coeff = if let Some(inner) = ctok.strip_prefix('(').and_then(|s| s.strip_suffix(')')) {
                let (re, im) = inner.split_once(',').ok_or_else(|| bad(format!("bad coefficient '{ctok}'")))?;
                Complex64::new(
                    re.parse().map_err(|_| bad(format!("bad coefficient '{ctok}'")))?,
                    im.parse().map_err(|_| bad(format!("bad coefficient '{ctok}'")))?,
                )
            } else {
                Complex64::new(ctok.parse().map_err(|_| bad(format!("bad coefficient '{ctok}'")))?, 0.0)
            };
            let mut ops = Vec::new();
            for tok in fields {
                let mut chars = tok.chars();
                let letter = chars.next().unwrap();
                if tok == "I" {
                    continue;
                }
                let q: usize = chars.as_str().parse().map_err(|_| bad(format!("bad Pauli factor '{tok}'")))?;
                ops.push((q, letter));
            }
            raw.push((ops, coeff));
        }
        let needed = raw.iter().flat_map(|(o, _)| o.iter().map(|(q, _)| q + 1)).max().unwrap_or(0);
        let n = declared.unwrap_or(needed);
        if needed > n {
            return Err(Error::Operator(format!("term acts on qubit {} beyond declared {n}", needed - 1)));
        }
        let mut op = Self::zero(n);
        for (ops, c) in raw {
            op.add_term(PauliString::from_letters(n, &ops)?, c);
        }
        op.simplify();
        Ok(op)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, s: &[(usize, char)]) -> PauliString {
        PauliString::from_letters(n, s).unwrap()
    }

    #[test]
    fn commutator_basics() {
        let x = QubitOperator::from_term(p(1, &[(0, 'X')]), Complex64::new(1.0, 0.0));
        let z = QubitOperator::from_term(p(1, &[(0, 'Z')]), Complex64::new(1.0, 0.0));
        assert!(x.commutator(&x).unwrap().is_empty());
        let c = x.commutator(&z).unwrap();
        assert_eq!(c.len(), 1);
        assert!((c.coefficient(&p(1, &[(0, 'Y')])) - Complex64::new(0.0, -2.0)).norm() < 1e-15);
        // agrees with AB - BA
        let direct = x.mul(&z).unwrap().sub(&z.mul(&x).unwrap()).unwrap();
        assert_eq!(direct, c);
    }

    #[test]
    fn mismatch_is_error() {
        let a = QubitOperator::identity(2, 1.0);
        let b = QubitOperator::identity(3, 1.0);
        assert!(a.add(&b).is_err());
        assert!(a.commutator(&b).is_err());
    }

    #[test]
    fn dense_and_apply_agree() {
        let mut op = QubitOperator::zero(3);
        op.add_term(p(3, &[(0, 'X'), (2, 'Y')]), Complex64::new(0.3, 0.1));
        op.add_term(p(3, &[(1, 'Z')]), Complex64::new(-0.7, 0.0));
        op.add_term(p(3, &[(0, 'Y'), (1, 'X'), (2, 'Z')]), Complex64::new(0.2, 0.0));
        let m = op.to_dense();
        let v: Vec<Complex64> = (0..8).map(|k| Complex64::new(k as f64 * 0.1, 1.0 - k as f64 * 0.05)).collect();
        let mut out = vec![Complex64::default(); 8];
        op.apply(&v, &mut out);
        let dv = &m * nalgebra::DVector::from_vec(v);
        for k in 0..8 {
            assert!((dv[k] - out[k]).norm() < 1e-14);
        }
        // Y on one qubit: [[0,-i],[i,0]]
        let y = QubitOperator::from_term(p(1, &[(0, 'Y')]), Complex64::new(1.0, 0.0)).to_dense();
        assert_eq!(y[(0, 1)], Complex64::new(0.0, -1.0));
        assert_eq!(y[(1, 0)], Complex64::new(0.0, 1.0));
    }

    #[test]
    fn text_roundtrip() {
        let mut op = QubitOperator::zero(4);
        op.add_term(PauliString::identity(4), Complex64::new(-0.812_345_678_901_234_5, 0.0));
        op.add_term(p(4, &[(0, 'X'), (1, 'X')]), Complex64::new(0.5, 0.0));
        op.add_term(p(4, &[(3, 'Y')]), Complex64::new(1e-3, -2.5e-7));
        let text = op.to_text();
        assert!(text.contains("0.5  X0 X1"));
        assert_eq!(QubitOperator::from_text(&text).unwrap(), op);
        let bare = QubitOperator::from_text("0.5 X0 X1\n-0.25 Z2").unwrap();
        assert_eq!(bare.n_qubits(), 3);
        assert!(QubitOperator::from_text("0.5 Q0").is_err());
    }
}
