//! Pair and single excitation generators, UpCCGSD and PNO-restricted
//! ansaetze, and naive CNOT-ladder resource counts.
//!
//! A generator `G` is the Hermitian operator `i (T - T^dag)` for an
//! excitation `T`; a parameter `theta` enters as `exp(-i theta/2 G)`. The
//! Jordan-Wigner strings of one generator commute pairwise, so that
//! exponential is an exact product of Pauli rotations.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion::{jordan_wigner, spin_orbital, FermionOperator, Ladder, PauliString, QubitOperator};
use crate::molint::OrbitalOrigin;
use crate::pno::OrbitalSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExcitationKind {
    /// Both electrons of spatial orbital `from` move to `to`.
    PairDouble { from: usize, to: usize },
    /// One electron of spin `spin` (0 up, 1 down) moves from `from` to `to`.
    Single { from: usize, to: usize, spin: usize },
    /// Pair transfer on the one-qubit-per-spatial-orbital (hard-core boson) register.
    PairedDouble { from: usize, to: usize },
}

impl fmt::Display for ExcitationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExcitationKind::PairDouble { from, to } => write!(f, "D({from}->{to})"),
            ExcitationKind::Single { from, to, spin } => {
                write!(f, "S({from}->{to},{})", if *spin == 0 { "up" } else { "down" })
            }
            ExcitationKind::PairedDouble { from, to } => write!(f, "P({from}->{to})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExcitationGenerator {
    pub kind: ExcitationKind,
    pub n_qubits: usize,
    /// Real Pauli expansion of the Hermitian generator.
    pub strings: Vec<(PauliString, f64)>,
}

impl ExcitationGenerator {
    fn from_excitation(kind: ExcitationKind, excitation: &FermionOperator, n_qubits: usize) -> Result<Self> {
        let anti = {
            let mut a = excitation.clone();
            a.add(&excitation.adjoint().scale(-1.0));
            a
        };
        let g = jordan_wigner(&anti, n_qubits)?.scale(Complex64::new(0.0, 1.0));
        Self::from_qubit_operator(kind, &g)
    }

    fn from_qubit_operator(kind: ExcitationKind, g: &QubitOperator) -> Result<Self> {
        if g.max_imaginary() > 1e-12 {
            return Err(Error::Ansatz(format!("generator {kind} is not Hermitian")));
        }
        let strings: Vec<(PauliString, f64)> = g.terms().map(|(p, c)| (*p, c.re)).collect();
        for (k, (a, _)) in strings.iter().enumerate() {
            for (b, _) in &strings[k + 1..] {
                if !a.commutes_with(b) {
                    return Err(Error::Ansatz(format!("generator {kind} has non-commuting strings {a} and {b}")));
                }
            }
        }
        Ok(Self { kind, n_qubits: g.n_qubits(), strings })
    }

    pub fn to_operator(&self) -> QubitOperator {
        let mut op = QubitOperator::zero(self.n_qubits);
        for (p, c) in &self.strings {
            op.add_term(*p, Complex64::new(*c, 0.0));
        }
        op.simplify();
        op
    }

    /// CNOT cost of the naive ladder decomposition, `2 (w - 1)` per string.
    pub fn cnot_count(&self) -> usize {
        self.strings.iter().map(|(p, _)| 2 * p.weight().saturating_sub(1)).sum()
    }
}

/// `G = i (a+_{a up} a_{i up} a+_{a down} a_{i down} - h.c.)` on `2 * n_spatial` qubits.
pub fn make_pair_double(i: usize, a: usize, n_spatial: usize) -> Result<ExcitationGenerator> {
    if i == a {
        return Err(Error::Ansatz(format!("pair double needs distinct orbitals, got {i} twice")));
    }
    if i.max(a) >= n_spatial {
        return Err(Error::Ansatz(format!("orbital {} out of range for {n_spatial}", i.max(a))));
    }
    let mut t = FermionOperator::zero();
    t.add_product(
        &[
            Ladder::create(spin_orbital(a, 0)),
            Ladder::annihilate(spin_orbital(i, 0)),
            Ladder::create(spin_orbital(a, 1)),
            Ladder::annihilate(spin_orbital(i, 1)),
        ],
        1.0,
    );
    ExcitationGenerator::from_excitation(ExcitationKind::PairDouble { from: i, to: a }, &t, 2 * n_spatial)
}

/// `G = i (a+_{q s} a_{p s} - h.c.)` on `2 * n_spatial` qubits.
pub fn make_single(p: usize, q: usize, spin: usize, n_spatial: usize) -> Result<ExcitationGenerator> {
    if p == q {
        return Err(Error::Ansatz(format!("single excitation needs distinct orbitals, got {p} twice")));
    }
    if spin > 1 {
        return Err(Error::Ansatz(format!("spin index {spin} is not 0 or 1")));
    }
    if p.max(q) >= n_spatial {
        return Err(Error::Ansatz(format!("orbital {} out of range for {n_spatial}", p.max(q))));
    }
    let mut t = FermionOperator::zero();
    t.add_product(&[Ladder::create(spin_orbital(q, spin)), Ladder::annihilate(spin_orbital(p, spin))], 1.0);
    ExcitationGenerator::from_excitation(ExcitationKind::Single { from: p, to: q, spin }, &t, 2 * n_spatial)
}

/// Pair transfer `G = i (s+_a s-_i - s+_i s-_a)` with `s+ = (X - iY)/2` on
/// `n_spatial` qubits, the image of [`make_pair_double`] on the
/// seniority-zero subspace.
pub fn make_paired_double(i: usize, a: usize, n_spatial: usize) -> Result<ExcitationGenerator> {
    if i == a {
        return Err(Error::Ansatz(format!("pair transfer needs distinct orbitals, got {i} twice")));
    }
    if i.max(a) >= n_spatial {
        return Err(Error::Ansatz(format!("orbital {} out of range for {n_spatial}", i.max(a))));
    }
    let n = n_spatial;
    let raise = |q: usize| -> Result<QubitOperator> {
        let mut op = QubitOperator::zero(n);
        op.add_term(PauliString::from_letters(n, &[(q, 'X')])?, Complex64::new(0.5, 0.0));
        op.add_term(PauliString::from_letters(n, &[(q, 'Y')])?, Complex64::new(0.0, -0.5));
        Ok(op)
    };
    let t = raise(a)?.mul(&raise(i)?.adjoint())?;
    let g = t.sub(&t.adjoint())?.scale(Complex64::new(0.0, 1.0));
    ExcitationGenerator::from_qubit_operator(ExcitationKind::PairedDouble { from: i, to: a }, &g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnsatzKind {
    Upccgsd,
    PnoUpccd,
    PnoUpccsd,
    PnoUpccgd,
    /// PNO-UpCCGD doubles plus the singles matching every double.
    PnoUpccgsd,
}

impl AnsatzKind {
    pub fn all() -> [AnsatzKind; 5] {
        [
            AnsatzKind::PnoUpccd,
            AnsatzKind::PnoUpccsd,
            AnsatzKind::PnoUpccgd,
            AnsatzKind::PnoUpccgsd,
            AnsatzKind::Upccgsd,
        ]
    }

    pub fn needs_pno_metadata(self) -> bool {
        self != AnsatzKind::Upccgsd
    }
}

impl fmt::Display for AnsatzKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AnsatzKind::Upccgsd => "upccgsd",
            AnsatzKind::PnoUpccd => "pno-upccd",
            AnsatzKind::PnoUpccsd => "pno-upccsd",
            AnsatzKind::PnoUpccgd => "pno-upccgd",
            AnsatzKind::PnoUpccgsd => "pno-upccgsd",
        };
        f.write_str(s)
    }
}

impl FromStr for AnsatzKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "upccgsd" => Ok(AnsatzKind::Upccgsd),
            "pno-upccd" => Ok(AnsatzKind::PnoUpccd),
            "pno-upccsd" => Ok(AnsatzKind::PnoUpccsd),
            "pno-upccgd" => Ok(AnsatzKind::PnoUpccgd),
            "pno-upccgsd" => Ok(AnsatzKind::PnoUpccgsd),
            other => Err(Error::Ansatz(format!("unknown ansatz '{other}'"))),
        }
    }
}

/// Ordered product of generator exponentials applied to a reference
/// determinant; generator `k` is applied `k`-th.
#[derive(Debug, Clone)]
pub struct Ansatz {
    pub name: String,
    pub n_qubits: usize,
    pub generators: Vec<ExcitationGenerator>,
    /// Occupied qubits of the reference state, strictly increasing.
    pub reference: Vec<usize>,
    pub pair_assignments: Option<Vec<OrbitalOrigin>>,
}

impl Ansatz {
    pub fn n_parameters(&self) -> usize {
        self.generators.len()
    }
}

fn validate_electrons(n_spatial: usize, n_electrons: usize) -> Result<()> {
    if n_electrons % 2 != 0 || n_electrons > 2 * n_spatial {
        return Err(Error::Ansatz(format!("invalid electron count {n_electrons} for {n_spatial} spatial orbitals")));
    }
    Ok(())
}

/// `k`-UpCCGSD: per layer, all pair doubles `p < q`, then all generalized
/// singles `p < q` for both spins; `3 C(N, 2)` parameters per layer.
pub fn build_upccgsd(n_spatial: usize, n_electrons: usize, layers: usize) -> Result<Ansatz> {
    validate_electrons(n_spatial, n_electrons)?;
    if layers == 0 {
        return Err(Error::Ansatz("at least one layer required".into()));
    }
    let mut generators = Vec::new();
    for _ in 0..layers {
        for p in 0..n_spatial {
            for q in p + 1..n_spatial {
                generators.push(make_pair_double(p, q, n_spatial)?);
            }
        }
        for p in 0..n_spatial {
            for q in p + 1..n_spatial {
                for spin in 0..2 {
                    generators.push(make_single(p, q, spin, n_spatial)?);
                }
            }
        }
    }
    Ok(Ansatz {
        name: if layers == 1 { "upccgsd".into() } else { format!("{layers}-upccgsd") },
        n_qubits: 2 * n_spatial,
        generators,
        reference: (0..n_electrons).collect(),
        pair_assignments: None,
    })
}

/// PNO-restricted ansatz from the pair structure of an orbital space whose
/// first `n_occ` orbitals are the occupied ones.
pub fn build_pno_ansatz(space: &OrbitalSpace, variant: AnsatzKind) -> Result<Ansatz> {
    build_pno_ansatz_from_origins(Some(&space.assignment), space.n_occ(), variant)
}

/// As [`build_pno_ansatz`], from per-orbital origins (e.g. carried by an
/// integral set). `None` is reported as missing metadata.
pub fn build_pno_ansatz_from_origins(
    origins: Option<&[OrbitalOrigin]>,
    n_occ: usize,
    variant: AnsatzKind,
) -> Result<Ansatz> {
    let origins = origins.ok_or(Error::MissingPnoMetadata)?;
    let n_spatial = origins.len();
    if variant == AnsatzKind::Upccgsd {
        let mut a = build_upccgsd(n_spatial, 2 * n_occ, 1)?;
        a.pair_assignments = Some(origins.to_vec());
        return Ok(a);
    }
    validate_electrons(n_spatial, 2 * n_occ)?;
    for (k, o) in origins.iter().enumerate() {
        let ok = match o {
            OrbitalOrigin::Occupied(i) => k < n_occ && *i == k,
            OrbitalOrigin::Pair(i, j) => k >= n_occ && i <= j && *j < n_occ,
        };
        if !ok {
            return Err(Error::Ansatz(format!("orbital {k} has inconsistent origin {o:?}")));
        }
    }
    let diag = |i: usize| -> Vec<usize> {
        (n_occ..n_spatial).filter(|&k| origins[k] == OrbitalOrigin::Pair(i, i)).collect()
    };

    let mut doubles = Vec::new();
    for i in 0..n_occ {
        for a in diag(i) {
            doubles.push((i, a));
        }
    }
    let mut generalized = Vec::new();
    if matches!(variant, AnsatzKind::PnoUpccgd | AnsatzKind::PnoUpccgsd) {
        for i in 0..n_occ {
            let set = diag(i);
            for (x, &a) in set.iter().enumerate() {
                for &b in &set[x + 1..] {
                    generalized.push((a, b));
                }
            }
        }
    }
    let mut generators = Vec::new();
    for &(i, a) in doubles.iter().chain(&generalized) {
        generators.push(make_pair_double(i, a, n_spatial)?);
    }
    let singles_for: Vec<(usize, usize)> = match variant {
        AnsatzKind::PnoUpccsd => doubles.clone(),
        AnsatzKind::PnoUpccgsd => doubles.iter().chain(&generalized).copied().collect(),
        _ => Vec::new(),
    };
    for (p, q) in singles_for {
        for spin in 0..2 {
            generators.push(make_single(p, q, spin, n_spatial)?);
        }
    }
    Ok(Ansatz {
        name: variant.to_string(),
        n_qubits: 2 * n_spatial,
        generators,
        reference: (0..2 * n_occ).collect(),
        pair_assignments: Some(origins.to_vec()),
    })
}

/// Maps every pair double of `ansatz` onto the hard-core-boson register
/// (one qubit per spatial orbital). Fails on any other generator kind.
pub fn paired_ansatz(ansatz: &Ansatz) -> Result<Ansatz> {
    let n_spatial = ansatz.n_qubits / 2;
    let generators = ansatz
        .generators
        .iter()
        .map(|g| match g.kind {
            ExcitationKind::PairDouble { from, to } => make_paired_double(from, to, n_spatial),
            other => Err(Error::Ansatz(format!("generator {other} has no paired image"))),
        })
        .collect::<Result<Vec<_>>>()?;
    let n_occ = ansatz.reference.len() / 2;
    Ok(Ansatz {
        name: format!("paired-{}", ansatz.name),
        n_qubits: n_spatial,
        generators,
        reference: (0..n_occ).collect(),
        pair_assignments: ansatz.pair_assignments.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorCost {
    pub label: String,
    pub n_strings: usize,
    pub cnots: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub ansatz: String,
    pub n_parameters: usize,
    pub n_cnots: usize,
    pub breakdown: Vec<GeneratorCost>,
}

impl ResourceReport {
    pub fn cell(&self) -> String {
        format!("{} ({})", self.n_parameters, self.n_cnots)
    }
}

/// Parameter and naive CNOT counts, with no cancellation between rotations.
pub fn count_resources(ansatz: &Ansatz) -> ResourceReport {
    let breakdown: Vec<GeneratorCost> = ansatz
        .generators
        .iter()
        .map(|g| GeneratorCost { label: g.kind.to_string(), n_strings: g.strings.len(), cnots: g.cnot_count() })
        .collect();
    ResourceReport {
        ansatz: ansatz.name.clone(),
        n_parameters: ansatz.n_parameters(),
        n_cnots: breakdown.iter().map(|b| b.cnots).sum(),
        breakdown,
    }
}

/// Rows are systems, columns ansatz variants, cells `params (cnots)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResourceTable {
    pub columns: Vec<String>,
    pub rows: Vec<ResourceRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceRow {
    pub system: String,
    pub cells: Vec<Option<ResourceCell>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceCell {
    pub parameters: usize,
    pub cnots: usize,
}

impl ResourceTable {
    pub fn new(columns: &[AnsatzKind]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    /// Adds a row; reports are matched to columns by ansatz name.
    pub fn push(&mut self, system: &str, reports: &[ResourceReport]) {
        let cells = self
            .columns
            .iter()
            .map(|c| {
                reports
                    .iter()
                    .find(|r| &r.ansatz == c)
                    .map(|r| ResourceCell { parameters: r.n_parameters, cnots: r.n_cnots })
            })
            .collect();
        self.rows.push(ResourceRow { system: system.to_string(), cells });
    }

    pub fn to_text(&self) -> String {
        let mut grid: Vec<Vec<String>> = Vec::new();
        let mut header = vec!["system".to_string()];
        header.extend(self.columns.iter().cloned());
        grid.push(header);
        for row in &self.rows {
            let mut line = vec![row.system.clone()];
            line.extend(row.cells.iter().map(|c| match c {
                Some(c) => format!("{} ({})", c.parameters, c.cnots),
                None => "-".to_string(),
            }));
            grid.push(line);
        }
        let widths: Vec<usize> =
            (0..grid[0].len()).map(|k| grid.iter().map(|r| r[k].chars().count()).max().unwrap_or(0)).collect();
        let mut out = String::new();
        for line in grid {
            let cols: Vec<String> = line.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
            out.push_str(cols.join("  ").trim_end());
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_double_structure() {
        let g = make_pair_double(0, 1, 2).unwrap();
        assert_eq!(g.strings.len(), 8);
        for (p, c) in &g.strings {
            assert_eq!(p.weight(), 4);
            assert_eq!(p.support(), vec![0, 1, 2, 3]);
            assert!((c.abs() - 0.125).abs() < 1e-15);
        }
        let far = make_pair_double(0, 5, 6).unwrap();
        for (p, _) in &far.strings {
            assert_eq!(p.support(), vec![0, 1, 10, 11]);
        }
        assert_eq!(far.cnot_count(), 48);
        assert!(make_pair_double(2, 2, 4).is_err());
    }

    #[test]
    fn single_structure() {
        let g = make_single(0, 1, 0, 2).unwrap();
        assert_eq!(g.strings.len(), 2);
        for (p, c) in &g.strings {
            assert_eq!(p.support(), vec![0, 1, 2]);
            assert_eq!(p.letter(1), 'Z');
            assert!((c.abs() - 0.5).abs() < 1e-15);
        }
        let g = make_single(0, 2, 1, 3).unwrap();
        assert!(g.strings.iter().all(|(p, _)| p.weight() == 5));
        assert_eq!(g.cnot_count(), 16);
        assert!(make_single(1, 1, 0, 3).is_err());
    }

    #[test]
    fn upccgsd_counts() {
        assert_eq!(build_upccgsd(2, 2, 1).unwrap().n_parameters(), 3);
        let a = build_upccgsd(6, 4, 1).unwrap();
        assert_eq!(a.n_parameters(), 45);
        assert_eq!(count_resources(&a).n_cnots, 1280);
        assert_eq!(build_upccgsd(6, 4, 2).unwrap().n_parameters(), 90);
        assert!(build_upccgsd(2, 3, 1).is_err());
        assert!(build_upccgsd(2, 6, 1).is_err());
    }

    #[test]
    fn pno_variants() {
        let space = OrbitalSpace::with_assignment(2, &[(1, 1); 4]).unwrap();
        let d = build_pno_ansatz(&space, AnsatzKind::PnoUpccd).unwrap();
        assert_eq!(d.n_parameters(), 4);
        assert_eq!(d.reference, vec![0, 1, 2, 3]);
        let sd = build_pno_ansatz(&space, AnsatzKind::PnoUpccsd).unwrap();
        assert_eq!(sd.n_parameters(), 12);
        let gd = build_pno_ansatz(&space, AnsatzKind::PnoUpccgd).unwrap();
        assert_eq!(gd.n_parameters(), 4 + 6);
        // generalized block follows the occupied-to-PNO block
        assert_eq!(gd.generators[4].kind, ExcitationKind::PairDouble { from: 2, to: 3 });
        assert_eq!(build_pno_ansatz(&space, AnsatzKind::PnoUpccgsd).unwrap().n_parameters(), 30);
        assert!(matches!(
            build_pno_ansatz_from_origins(None, 2, AnsatzKind::PnoUpccd),
            Err(Error::MissingPnoMetadata)
        ));
    }

    #[test]
    fn paired_images() {
        let g = make_paired_double(0, 2, 3).unwrap();
        assert_eq!(g.strings.len(), 2);
        assert!(g.strings.iter().all(|(p, c)| p.weight() == 2 && (c.abs() - 0.5).abs() < 1e-15));
        let space = OrbitalSpace::with_assignment(1, &[(0, 0), (0, 0)]).unwrap();
        let sd = build_pno_ansatz(&space, AnsatzKind::PnoUpccsd).unwrap();
        assert!(paired_ansatz(&sd).is_err());
        let d = build_pno_ansatz(&space, AnsatzKind::PnoUpccd).unwrap();
        let p = paired_ansatz(&d).unwrap();
        assert_eq!(p.n_qubits, 3);
        assert_eq!(p.reference, vec![0]);
    }

    #[test]
    fn table_text() {
        let mut t = ResourceTable::new(&[AnsatzKind::PnoUpccd, AnsatzKind::Upccgsd]);
        let space = OrbitalSpace::with_assignment(2, &[(1, 1); 4]).unwrap();
        let reports: Vec<_> = [AnsatzKind::PnoUpccd, AnsatzKind::Upccgsd]
            .iter()
            .map(|k| count_resources(&build_pno_ansatz(&space, *k).unwrap()))
            .collect();
        t.push("LiH(4,12)", &reports);
        let text = t.to_text();
        assert!(text.contains("4 (192)"));
        assert!(text.contains("45 (1280)"));
        let back: ResourceTable = serde_json::from_str(&t.to_json().unwrap()).unwrap();
        assert_eq!(back, t);
    }
}
