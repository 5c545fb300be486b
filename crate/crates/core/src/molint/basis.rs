use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::geometry::Molecule;
use crate::error::{Error, Result};

/// Contracted s-type Gaussian shell. Contraction coefficients multiply
/// normalized primitives; the contracted function is renormalized by the
/// integral engine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisShell {
    pub center: [f64; 3],
    pub exponents: Vec<f64>,
    pub coefficients: Vec<f64>,
}

impl BasisShell {
    pub fn new(center: [f64; 3], exponents: Vec<f64>, coefficients: Vec<f64>) -> Result<Self> {
        if exponents.is_empty() || exponents.len() != coefficients.len() {
            return Err(Error::Basis(format!(
                "{} exponents vs {} coefficients",
                exponents.len(),
                coefficients.len()
            )));
        }
        if let Some(a) = exponents.iter().find(|a| !(**a > 0.0) || !a.is_finite()) {
            return Err(Error::Basis(format!("exponent {a} not strictly positive")));
        }
        Ok(Self { center, exponents, coefficients })
    }

    pub fn primitive(center: [f64; 3], exponent: f64) -> Result<Self> {
        Self::new(center, vec![exponent], vec![1.0])
    }
}

/// Built-in s-only basis sets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BasisName {
    Sto3g,
    Sto6g,
    Pople631g,
    /// `n` uncontracted s primitives per atom, exponents `alpha * beta^k`.
    EvenTempered { n: usize, alpha: f64, beta: f64 },
}

impl fmt::Display for BasisName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisName::Sto3g => write!(f, "sto-3g"),
            BasisName::Sto6g => write!(f, "sto-6g"),
            BasisName::Pople631g => write!(f, "6-31g"),
            BasisName::EvenTempered { n, alpha, beta } => write!(f, "even-tempered:{n}:{alpha}:{beta}"),
        }
    }
}

impl FromStr for BasisName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "sto-3g" | "sto3g" => return Ok(BasisName::Sto3g),
            "sto-6g" | "sto6g" => return Ok(BasisName::Sto6g),
            "6-31g" | "631g" => return Ok(BasisName::Pople631g),
            _ => {}
        }
        if let Some(rest) = lower.strip_prefix("even-tempered:") {
            let parts: Vec<&str> = rest.split(':').collect();
            let bad = || Error::Basis(format!("expected even-tempered:<n>:<alpha>:<beta>, got '{s}'"));
            if parts.len() != 3 {
                return Err(bad());
            }
            let n: usize = parts[0].parse().map_err(|_| bad())?;
            let alpha: f64 = parts[1].parse().map_err(|_| bad())?;
            let beta: f64 = parts[2].parse().map_err(|_| bad())?;
            if n == 0 || !(alpha > 0.0) || !(beta > 1.0) {
                return Err(bad());
            }
            return Ok(BasisName::EvenTempered { n, alpha, beta });
        }
        Err(Error::Basis(format!("unknown basis '{s}'")))
    }
}

// (exponents, coefficients) per shell
type ShellData = (&'static [f64], &'static [f64]);

const STO3G_COEF: [f64; 3] = [0.154_328_97, 0.535_328_14, 0.444_634_54];
const STO6G_COEF: [f64; 6] = [0.009_163_596_28, 0.049_361_493_0, 0.168_538_305, 0.370_562_800, 0.416_491_530, 0.130_334_084];

fn library(basis: BasisName, z: u32) -> Option<Vec<ShellData>> {
    match (basis, z) {
        (BasisName::Sto3g, 1) => Some(vec![(&[3.425_250_91, 0.623_913_73, 0.168_855_40], &STO3G_COEF)]),
        (BasisName::Sto3g, 2) => Some(vec![(&[6.362_421_39, 1.158_923_00, 0.313_649_79], &STO3G_COEF)]),
        (BasisName::Sto6g, 1) => Some(vec![(
            &[35.523_221_22, 6.513_143_725, 1.822_142_904, 0.625_955_266_0, 0.243_076_747_1, 0.100_112_428_0],
            &STO6G_COEF,
        )]),
        (BasisName::Sto6g, 2) => Some(vec![(
            &[65.984_568_24, 12.098_198_36, 3.384_639_924, 1.162_715_163, 0.451_516_322_2, 0.185_959_356_0],
            &STO6G_COEF,
        )]),
        (BasisName::Pople631g, 1) => Some(vec![
            (&[18.731_137_0, 2.825_393_7, 0.640_121_7], &[0.033_494_60, 0.234_726_95, 0.813_757_33]),
            (&[0.161_277_8], &[1.0]),
        ]),
        (BasisName::Pople631g, 2) => Some(vec![
            (&[38.421_634_0, 5.778_030_0, 1.241_774_0], &[0.023_766_0, 0.154_679_0, 0.469_630_0]),
            (&[0.297_964_0], &[1.0]),
        ]),
        _ => None,
    }
}

/// Shells of a built-in basis placed on every atom of `molecule`, in atom order.
pub fn basis_for(molecule: &Molecule, basis: BasisName) -> Result<Vec<BasisShell>> {
    let mut shells = Vec::new();
    for atom in molecule.atoms() {
        match basis {
            BasisName::EvenTempered { n, alpha, beta } => {
                for k in 0..n {
                    shells.push(BasisShell::primitive(atom.position, alpha * beta.powi(k as i32))?);
                }
            }
            _ => {
                let data = library(basis, atom.z)
                    .ok_or_else(|| Error::Basis(format!("{basis} has no s-only data for {}", atom.symbol)))?;
                for (exps, coefs) in data {
                    shells.push(BasisShell::new(atom.position, exps.to_vec(), coefs.to_vec())?);
                }
            }
        }
    }
    Ok(shells)
}
