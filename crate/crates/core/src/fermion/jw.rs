//! Jordan-Wigner encoding with parity strings on lower indices:
//! `a^dag_j -> (X_j - i Y_j)/2 * Z_{j-1} ... Z_0`.

use num_complex::Complex64;

use super::operator::{FermionOperator, Ladder};
use super::pauli::{pauli_multiply, PauliString, MAX_QUBITS};
use super::qubit::QubitOperator;
use crate::error::{Error, Result};

fn ladder_image(l: Ladder, n: usize) -> [(PauliString, Complex64); 2] {
    let j = l.mode;
    let lower = (1u64 << j) - 1;
    let bit = 1u64 << j;
    let x = PauliString::from_masks(n, bit, lower).expect("mode checked against register");
    let y = PauliString::from_masks(n, bit, lower | bit).expect("mode checked against register");
    let yc = if l.dagger { Complex64::new(0.0, -0.5) } else { Complex64::new(0.0, 0.5) };
    [(x, Complex64::new(0.5, 0.0)), (y, yc)]
}

/// Pauli expansion of a single ladder-operator product.
pub fn jw_product(ops: &[Ladder], n_qubits: usize) -> Result<Vec<(PauliString, Complex64)>> {
    if n_qubits > MAX_QUBITS {
        return Err(Error::Operator(format!("{n_qubits} qubits exceed the maximum of {MAX_QUBITS}")));
    }
    let mut acc: Vec<(PauliString, Complex64)> = vec![(PauliString::identity(n_qubits), Complex64::new(1.0, 0.0))];
    for &l in ops {
        if l.mode >= n_qubits {
            return Err(Error::Operator(format!("mode {} overflows {n_qubits} qubits", l.mode)));
        }
        let img = ladder_image(l, n_qubits);
        let mut next = Vec::with_capacity(acc.len() * 2);
        for (p, c) in &acc {
            for (q, d) in &img {
                let (r, ph) = pauli_multiply(p, q)?;
                next.push((r, c * d * ph.to_complex()));
            }
        }
        acc = next;
    }
    Ok(acc)
}

pub fn jordan_wigner(op: &FermionOperator, n_qubits: usize) -> Result<QubitOperator> {
    let mut out = QubitOperator::zero(n_qubits);
    for (ops, &c) in op.terms() {
        for (p, d) in jw_product(ops, n_qubits)? {
            out.add_term(p, d * c);
        }
    }
    out.simplify();
    Ok(out)
}

/// Total particle number `sum_j (I - Z_j) / 2`.
pub fn number_operator(n_qubits: usize) -> QubitOperator {
    let mut op = QubitOperator::zero(n_qubits);
    for j in 0..n_qubits {
        op.add_term(PauliString::identity(n_qubits), Complex64::new(0.5, 0.0));
        op.add_term(PauliString::from_masks(n_qubits, 0, 1 << j).unwrap(), Complex64::new(-0.5, 0.0));
    }
    op.simplify();
    op
}

/// `S_z = 1/2 sum_p (n_{2p} - n_{2p+1})` under interleaved spin ordering.
pub fn sz_operator(n_qubits: usize) -> QubitOperator {
    let mut op = QubitOperator::zero(n_qubits);
    for j in 0..n_qubits {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        op.add_term(PauliString::identity(n_qubits), Complex64::new(0.25 * sign, 0.0));
        op.add_term(PauliString::from_masks(n_qubits, 0, 1 << j).unwrap(), Complex64::new(-0.25 * sign, 0.0));
    }
    op.simplify();
    op
}
