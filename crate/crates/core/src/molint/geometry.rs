use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ANGSTROM_TO_BOHR: f64 = 1.889_726_124_6;

const ELEMENTS: [&str; 36] = [
    "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne", "Na", "Mg", "Al", "Si", "P", "S", "Cl", "Ar", "K", "Ca",
    "Sc", "Ti", "V", "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As", "Se", "Br", "Kr",
];

/// Nuclear charge for an element symbol (case-insensitive).
pub fn atomic_number(symbol: &str) -> Option<u32> {
    ELEMENTS
        .iter()
        .position(|s| s.eq_ignore_ascii_case(symbol))
        .map(|i| i as u32 + 1)
}

pub fn element_symbol(z: u32) -> Option<&'static str> {
    ELEMENTS.get((z as usize).checked_sub(1)?).copied()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub symbol: String,
    pub z: u32,
    /// bohr
    pub position: [f64; 3],
}

/// Closed-shell molecule; coordinates in bohr.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Molecule {
    atoms: Vec<Atom>,
    charge: i32,
    multiplicity: u32,
}

impl Molecule {
    pub fn new(atoms: Vec<Atom>, charge: i32, multiplicity: u32) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Molecule("no atoms".into()));
        }
        for (k, a) in atoms.iter().enumerate() {
            if a.z == 0 {
                return Err(Error::Molecule(format!("atom {k} has nuclear charge 0")));
            }
            if a.position.iter().any(|c| !c.is_finite()) {
                return Err(Error::Molecule(format!("atom {k} has a non-finite coordinate")));
            }
        }
        if multiplicity != 1 {
            return Err(Error::Molecule(format!("multiplicity {multiplicity} not supported (closed shell only)")));
        }
        let total_z: i64 = atoms.iter().map(|a| a.z as i64).sum();
        let n_electrons = total_z - charge as i64;
        if n_electrons < 0 {
            return Err(Error::Molecule(format!("charge {charge} leaves a negative electron count")));
        }
        if n_electrons % 2 != 0 {
            return Err(Error::Molecule(format!("odd electron count {n_electrons}")));
        }
        Ok(Self { atoms, charge, multiplicity })
    }

    /// Neutral singlet from `(symbol, position in bohr)` pairs.
    pub fn from_symbols(atoms: &[(&str, [f64; 3])]) -> Result<Self> {
        Self::with_charge(atoms, 0)
    }

    pub fn with_charge(atoms: &[(&str, [f64; 3])], charge: i32) -> Result<Self> {
        let atoms = atoms
            .iter()
            .map(|(s, p)| {
                let z = atomic_number(s).ok_or_else(|| Error::Molecule(format!("unknown element {s}")))?;
                Ok(Atom { symbol: element_symbol(z).unwrap().to_string(), z, position: *p })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(atoms, charge, 1)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn charge(&self) -> i32 {
        self.charge
    }

    pub fn multiplicity(&self) -> u32 {
        self.multiplicity
    }

    pub fn n_electrons(&self) -> usize {
        (self.atoms.iter().map(|a| a.z as i64).sum::<i64>() - self.charge as i64) as usize
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        dist(&self.atoms[i].position, &self.atoms[j].position)
    }
}

pub(crate) fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    dist2(a, b).sqrt()
}

pub(crate) fn dist2(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    (0..3).map(|k| (a[k] - b[k]).powi(2)).sum()
}

/// Parses XYZ text (count line, comment line, `element x y z` in angstrom).
/// The molecule is neutral; use [`parse_xyz_with_charge`] for ions.
pub fn parse_xyz(text: &str) -> Result<Molecule> {
    parse_xyz_with_charge(text, 0)
}

pub fn parse_xyz_with_charge(text: &str, charge: i32) -> Result<Molecule> {
    let mut lines = text.lines();
    let count_line = lines.next().ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
    let count: usize = count_line
        .trim()
        .parse()
        .map_err(|_| Error::Parse { line: 1, msg: format!("malformed atom count '{}'", count_line.trim()) })?;
    // comment line may be missing only when there are no atoms
    lines.next();
    let mut atoms = Vec::with_capacity(count);
    for (k, line) in lines.enumerate() {
        let line_no = k + 3;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if atoms.len() == count {
            return Err(Error::Parse { line: line_no, msg: "more atoms than declared".into() });
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < 4 {
            return Err(Error::Parse { line: line_no, msg: format!("expected 'element x y z', got '{line}'") });
        }
        let z = atomic_number(fields[0])
            .ok_or_else(|| Error::Parse { line: line_no, msg: format!("unknown element {}", fields[0]) })?;
        let mut position = [0.0; 3];
        for c in 0..3 {
            let v: f64 = fields[c + 1].parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("non-numeric coordinate '{}'", fields[c + 1]),
            })?;
            position[c] = v * ANGSTROM_TO_BOHR;
        }
        atoms.push(Atom { symbol: element_symbol(z).unwrap().to_string(), z, position });
    }
    if atoms.len() != count {
        return Err(Error::Parse {
            line: 1,
            msg: format!("declared {count} atoms, found {}", atoms.len()),
        });
    }
    Molecule::new(atoms, charge, 1)
}
