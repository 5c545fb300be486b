//! Second-quantized operators, the spin-orbital Hamiltonian, Jordan-Wigner
//! encoding and Pauli-operator algebra.

pub mod hamiltonian;
pub mod jw;
pub mod operator;
pub mod pauli;
pub mod qubit;

pub use hamiltonian::{build_hamiltonian, qubit_hamiltonian, spin_orbital};
pub use jw::{jordan_wigner, jw_product, number_operator, sz_operator};
pub use operator::{FermionOperator, Ladder};
pub use pauli::{pauli_multiply, PauliString, Phase};
pub use qubit::QubitOperator;
