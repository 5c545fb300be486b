//! Compact qubit Hamiltonians from MP2 pair-natural orbitals, pair-restricted
//! unitary coupled-cluster ansaetze, and a statevector VQE checked against an
//! exact-diagonalization oracle.
//!
//! Conventions used throughout the crate:
//!
//! * lengths in bohr, energies in hartree;
//! * spin orbitals are interleaved, spatial orbital `p` maps to `2p` (up) and
//!   `2p + 1` (down);
//! * qubits are little-endian, qubit `q` is bit `q` of a basis-state index;
//! * two-electron integrals are kept in physicists' notation `<pq|rs>` in
//!   memory and in chemists' notation `(pq|rs)` on disk.

pub mod ansatz;
pub mod error;
pub mod fermion;
pub mod molint;
pub mod optimizer;
pub mod oracle;
pub mod pno;
pub mod scf;
pub mod simulator;
pub mod tensor;
pub mod workbench;

pub use error::{Error, Result};
