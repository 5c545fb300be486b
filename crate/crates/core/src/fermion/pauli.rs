use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum register width of a packed Pauli string.
pub const MAX_QUBITS: usize = 64;

/// Phase-free Pauli string on `n` qubits, packed as X and Z bitmasks
/// (`Y` has both bits). The operator represented is
/// `prod_q P_q` with `Y = i X Z` on every qubit carrying both bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PauliString {
    n: u8,
    x: u64,
    z: u64,
}

/// Power of `i` in `{0, 1, 2, 3}` representing `{1, i, -1, -i}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Phase(pub u8);

impl Phase {
    pub fn to_complex(self) -> Complex64 {
        match self.0 & 3 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

fn mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        Self { n: n as u8, x: 0, z: 0 }
    }

    pub fn from_masks(n: usize, x: u64, z: u64) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::Operator(format!("{n} qubits exceed the maximum of {MAX_QUBITS}")));
        }
        if (x | z) & !mask(n) != 0 {
            return Err(Error::Operator(format!("masks reach beyond {n} qubits")));
        }
        Ok(Self { n: n as u8, x, z })
    }

    /// Builds a string from `(qubit, letter)` pairs, letters in `IXYZ`.
    pub fn from_letters(n: usize, ops: &[(usize, char)]) -> Result<Self> {
        let mut p = Self::identity(n);
        for &(q, c) in ops {
            if q >= n {
                return Err(Error::Operator(format!("qubit {q} out of range for {n} qubits")));
            }
            let bit = 1u64 << q;
            if (p.x | p.z) & bit != 0 {
                return Err(Error::Operator(format!("qubit {q} listed twice")));
            }
            match c.to_ascii_uppercase() {
                'I' => {}
                'X' => p.x |= bit,
                'Z' => p.z |= bit,
                'Y' => {
                    p.x |= bit;
                    p.z |= bit;
                }
                other => return Err(Error::Operator(format!("unknown Pauli letter '{other}'"))),
            }
        }
        Ok(p)
    }

    pub fn n_qubits(&self) -> usize {
        self.n as usize
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    pub fn support(&self) -> Vec<usize> {
        let m = self.x | self.z;
        (0..self.n as usize).filter(|q| m >> q & 1 == 1).collect()
    }

    pub fn letter(&self, q: usize) -> char {
        match (self.x >> q & 1, self.z >> q & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (0, 1) => 'Z',
            _ => 'Y',
        }
    }

    /// Number of `Y` factors, the power of `i` in `P = i^{n_y} X^x Z^z`.
    #[inline]
    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// Same string on a wider register.
    pub fn widen(&self, n: usize) -> Result<Self> {
        if n < self.n as usize {
            return Err(Error::Operator(format!("cannot narrow a {}-qubit string to {n}", self.n)));
        }
        Self::from_masks(n, self.x, self.z)
    }

    /// Amplitude factor of `P|b> = factor(b) |b ^ x>` for basis state `b`.
    #[inline]
    pub fn apply_phase(&self, b: u64) -> Complex64 {
        let k = self.y_count() + 2 * (b & self.z).count_ones();
        Phase((k & 3) as u8).to_complex()
    }
}

/// Product `a * b = phase * c` of two Pauli strings.
pub fn pauli_multiply(a: &PauliString, b: &PauliString) -> Result<(PauliString, Phase)> {
    if a.n != b.n {
        return Err(Error::Operator(format!("length mismatch: {} vs {} qubits", a.n, b.n)));
    }
    let x = a.x ^ b.x;
    let z = a.z ^ b.z;
    let c = PauliString { n: a.n, x, z };
    // i^{ya} X^xa Z^za i^{yb} X^xb Z^zb = i^{ya+yb} (-1)^{|za & xb|} X^x Z^z, and X^x Z^z = i^{-yc} c
    let k = a.y_count() as i64 + b.y_count() as i64 + 2 * (a.z & b.x).count_ones() as i64 - c.y_count() as i64;
    Ok((c, Phase(k.rem_euclid(4) as u8)))
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "I");
        }
        let mut first = true;
        for q in self.support() {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{}{}", self.letter(q), q)?;
            first = false;
        }
        Ok(())
    }
}
