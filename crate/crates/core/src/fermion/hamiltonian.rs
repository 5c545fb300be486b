use super::jw::jordan_wigner;
use super::operator::{FermionOperator, Ladder};
use super::qubit::QubitOperator;
use crate::error::Result;
use crate::molint::IntegralSet;

/// Spin orbital of spatial orbital `p` with spin `0` (up) or `1` (down).
#[inline]
pub fn spin_orbital(p: usize, spin: usize) -> usize {
    2 * p + spin
}

/// Second-quantized electronic Hamiltonian
/// `E_core + sum h_pq a+_{p s} a_{q s} + 1/2 sum <pq|rs> a+_{p s} a+_{q t} a_{s t} a_{r s}`.
pub fn build_hamiltonian(mo: &IntegralSet) -> FermionOperator {
    let n = mo.n_orb();
    let mut op = FermionOperator::identity(mo.core_energy);
    for p in 0..n {
        for q in 0..n {
            let h = mo.h[(p, q)];
            if h == 0.0 {
                continue;
            }
            for s in 0..2 {
                op.add_product(&[Ladder::create(spin_orbital(p, s)), Ladder::annihilate(spin_orbital(q, s))], h);
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let v = mo.g.get(p, q, r, s);
                    if v == 0.0 {
                        continue;
                    }
                    for sig in 0..2 {
                        for tau in 0..2 {
                            let (ps, qt) = (spin_orbital(p, sig), spin_orbital(q, tau));
                            if ps == qt {
                                continue;
                            }
                            let (st, rs) = (spin_orbital(s, tau), spin_orbital(r, sig));
                            if st == rs {
                                continue;
                            }
                            op.add_product(
                                &[Ladder::create(ps), Ladder::create(qt), Ladder::annihilate(st), Ladder::annihilate(rs)],
                                0.5 * v,
                            );
                        }
                    }
                }
            }
        }
    }
    op.simplify();
    op
}

/// Jordan-Wigner image of [`build_hamiltonian`] on `2 * n_orb` qubits.
pub fn qubit_hamiltonian(mo: &IntegralSet) -> Result<QubitOperator> {
    jordan_wigner(&build_hamiltonian(mo), 2 * mo.n_orb())
}
