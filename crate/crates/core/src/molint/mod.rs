//! Geometry, a small s-type Gaussian integral engine, and FCIDUMP I/O.

pub mod basis;
pub mod boys;
pub mod fcidump;
pub mod geometry;
pub mod integral_set;
pub mod integrals;

pub use basis::{basis_for, BasisName, BasisShell};
pub use boys::boys;
pub use fcidump::{format_fcidump, parse_fcidump, read_fcidump, write_fcidump};
pub use geometry::{parse_xyz, parse_xyz_with_charge, Atom, Molecule, ANGSTROM_TO_BOHR};
pub use integral_set::{IntegralSet, OrbitalOrigin};
pub use integrals::{compute_ao_integrals, AOIntegralSet};
