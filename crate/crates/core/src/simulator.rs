//! Dense statevector engine with exact generator exponentials.
//!
//! Qubit `q` is bit `q` of an amplitude index. Every excitation generator
//! has spectrum in `{0, +-1}`, which the shift-rule gradient relies on.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::ansatz::{Ansatz, ExcitationGenerator};
use crate::error::{Error, Result};
use crate::fermion::{PauliString, QubitOperator};

pub const MAX_SIM_QUBITS: usize = 26;

const HERMITIAN_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// `|0...0>`.
    pub fn zero_state(n_qubits: usize) -> Result<Self> {
        if n_qubits > MAX_SIM_QUBITS {
            return Err(Error::State(format!("{n_qubits} qubits exceed the simulator cap of {MAX_SIM_QUBITS}")));
        }
        let mut amps = vec![Complex64::default(); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let n_qubits = amps.len().trailing_zeros() as usize;
        if amps.is_empty() || 1usize << n_qubits != amps.len() || n_qubits > MAX_SIM_QUBITS {
            return Err(Error::State(format!("{} amplitudes is not a supported power of two", amps.len())));
        }
        let s = Self { n_qubits, amps };
        if (s.norm_sqr() - 1.0).abs() > 1e-10 {
            return Err(Error::State(format!("state not normalized (norm^2 = {})", s.norm_sqr())));
        }
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// `cos(angle/2) psi - i sin(angle/2) P psi`, in place.
    pub fn apply_pauli_rotation(&mut self, p: &PauliString, angle: f64) {
        debug_assert_eq!(p.n_qubits(), self.n_qubits);
        let (s, c) = (0.5 * angle).sin_cos();
        let x = p.x_mask() as usize;
        let mis = Complex64::new(0.0, -s);
        if x == 0 {
            for (b, a) in self.amps.iter_mut().enumerate() {
                *a = *a * (c + mis * p.apply_phase(b as u64));
            }
            return;
        }
        let top = 1usize << (usize::BITS - 1 - x.leading_zeros());
        for b in 0..self.amps.len() {
            if b & top != 0 {
                continue;
            }
            let b2 = b ^ x;
            let (a, a2) = (self.amps[b], self.amps[b2]);
            // P|b2> = phase(b2)|b>, P|b> = phase(b)|b2>
            self.amps[b] = c * a + mis * p.apply_phase(b2 as u64) * a2;
            self.amps[b2] = c * a2 + mis * p.apply_phase(b as u64) * a;
        }
    }

    /// `exp(-i theta/2 G)` as a product of the generator's commuting rotations.
    pub fn apply_generator(&mut self, g: &ExcitationGenerator, theta: f64) {
        for (p, c) in &g.strings {
            self.apply_pauli_rotation(p, theta * c);
        }
    }

    fn apply_operator_terms(&self, strings: &[(PauliString, f64)]) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); self.amps.len()];
        for (p, c) in strings {
            let x = p.x_mask() as usize;
            for (b, a) in self.amps.iter().enumerate() {
                out[b ^ x] += *c * p.apply_phase(b as u64) * a;
            }
        }
        out
    }

    pub fn apply_ansatz(&mut self, ansatz: &Ansatz, theta: &[f64]) -> Result<()> {
        check_params(ansatz, theta)?;
        if ansatz.n_qubits != self.n_qubits {
            return Err(Error::State(format!("ansatz on {} qubits, state on {}", ansatz.n_qubits, self.n_qubits)));
        }
        for (g, t) in ansatz.generators.iter().zip(theta) {
            self.apply_generator(g, *t);
        }
        Ok(())
    }
}

/// Computational basis state with the listed qubits set.
pub fn prepare_reference(n_qubits: usize, occupied: &[usize]) -> Result<Statevector> {
    let mut s = Statevector::zero_state(n_qubits)?;
    let mut idx = 0usize;
    for &q in occupied {
        if q >= n_qubits {
            return Err(Error::State(format!("occupied qubit {q} out of range for {n_qubits}")));
        }
        if idx & (1 << q) != 0 {
            return Err(Error::State(format!("duplicate occupied qubit {q}")));
        }
        idx |= 1 << q;
    }
    s.amps[0] = Complex64::default();
    s.amps[idx] = Complex64::new(1.0, 0.0);
    Ok(s)
}

fn check_params(ansatz: &Ansatz, theta: &[f64]) -> Result<()> {
    if theta.len() != ansatz.n_parameters() {
        return Err(Error::Dimension(format!(
            "{} parameters given for an ansatz with {}",
            theta.len(),
            ansatz.n_parameters()
        )));
    }
    Ok(())
}

fn check_hermitian(h: &QubitOperator) -> Result<()> {
    let im = h.max_imaginary();
    if im >= HERMITIAN_TOL {
        return Err(Error::NonHermitian(im));
    }
    Ok(())
}

/// `<psi|H|psi>`. Per-term contributions are evaluated in parallel and summed
/// in term order.
pub fn expectation(state: &Statevector, h: &QubitOperator) -> Result<f64> {
    if h.n_qubits() != state.n_qubits {
        return Err(Error::Dimension(format!("operator on {} qubits, state on {}", h.n_qubits(), state.n_qubits)));
    }
    check_hermitian(h)?;
    let terms: Vec<(&PauliString, &Complex64)> = h.terms().collect();
    let parts: Vec<Complex64> = terms
        .par_iter()
        .map(|(p, c)| {
            let x = p.x_mask() as usize;
            let amps = &state.amps;
            let mut acc = Complex64::default();
            for (b, a) in amps.iter().enumerate() {
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                acc += amps[b ^ x].conj() * p.apply_phase(b as u64) * a;
            }
            **c * acc
        })
        .collect();
    let total: Complex64 = parts.into_iter().sum();
    if total.im.abs() >= HERMITIAN_TOL {
        return Err(Error::NonHermitian(total.im.abs()));
    }
    Ok(total.re)
}

/// Ansatz state `U(theta) |ref>`.
pub fn ansatz_state(ansatz: &Ansatz, theta: &[f64]) -> Result<Statevector> {
    let mut s = prepare_reference(ansatz.n_qubits, &ansatz.reference)?;
    s.apply_ansatz(ansatz, theta)?;
    Ok(s)
}

pub fn energy(h: &QubitOperator, ansatz: &Ansatz, theta: &[f64]) -> Result<f64> {
    expectation(&ansatz_state(ansatz, theta)?, h)
}

/// Energy with `theta_k -> theta_k + shift` and an extra `exp(-i alpha P0)`
/// right after generator `k`, `P0 = 1 - G_k^2` the kernel projector.
fn shifted_energy(h: &QubitOperator, ansatz: &Ansatz, theta: &[f64], k: usize, shift: f64, alpha: f64) -> Result<f64> {
    let mut s = prepare_reference(ansatz.n_qubits, &ansatz.reference)?;
    for (j, g) in ansatz.generators.iter().enumerate() {
        if j != k {
            s.apply_generator(g, theta[j]);
            continue;
        }
        s.apply_generator(g, theta[j] + shift);
        let gs = s.apply_operator_terms(&g.strings);
        let ggs = Statevector { n_qubits: s.n_qubits, amps: gs }.apply_operator_terms(&g.strings);
        let f = Complex64::from_polar(1.0, -alpha) - 1.0;
        for (a, b) in s.amps.iter_mut().zip(ggs) {
            // P0 psi = psi - G(G psi)
            let p0 = *a - b;
            *a += f * p0;
        }
    }
    expectation(&s, h)
}

/// Parameter-shift gradient, exact for generators with spectrum `{0, +-1}`.
///
/// Splitting `G = (G+ + G-)/2` with involutory `G+- = G +- P0` gives
/// `dE/dtheta_k = 1/4 [f+(pi/2) - f+(-pi/2) + f-(pi/2) - f-(-pi/2)]`, where
/// `f+-(s)` shifts `theta_k` by `s` and applies `exp(-+ i s/2 P0)` after
/// generator `k`. For a pure two-level generator `P0` acts trivially and
/// this reduces to the familiar two-term rule.
pub fn gradient_shift(h: &QubitOperator, ansatz: &Ansatz, theta: &[f64]) -> Result<Vec<f64>> {
    check_params(ansatz, theta)?;
    check_hermitian(h)?;
    let s = std::f64::consts::FRAC_PI_2;
    (0..theta.len())
        .into_par_iter()
        .map(|k| {
            let fp = shifted_energy(h, ansatz, theta, k, s, 0.5 * s)? - shifted_energy(h, ansatz, theta, k, -s, -0.5 * s)?;
            let fm = shifted_energy(h, ansatz, theta, k, s, -0.5 * s)? - shifted_energy(h, ansatz, theta, k, -s, 0.5 * s)?;
            Ok(0.25 * (fp + fm))
        })
        .collect()
}

/// Reverse-mode gradient, `dE/dtheta_k = Im <lambda_k| G_k |psi_k>`.
pub fn gradient_adjoint(h: &QubitOperator, ansatz: &Ansatz, theta: &[f64]) -> Result<Vec<f64>> {
    let (_, g) = energy_and_gradient(h, ansatz, theta)?;
    Ok(g)
}

/// Energy and adjoint gradient from one forward and one backward sweep.
pub fn energy_and_gradient(h: &QubitOperator, ansatz: &Ansatz, theta: &[f64]) -> Result<(f64, Vec<f64>)> {
    check_params(ansatz, theta)?;
    check_hermitian(h)?;
    let mut phi = ansatz_state(ansatz, theta)?;
    if h.n_qubits() != phi.n_qubits {
        return Err(Error::Dimension(format!("operator on {} qubits, state on {}", h.n_qubits(), phi.n_qubits)));
    }
    let mut lam_amps = vec![Complex64::default(); phi.amps.len()];
    h.apply(&phi.amps, &mut lam_amps);
    let e = phi.inner(&Statevector { n_qubits: phi.n_qubits, amps: lam_amps.clone() });
    if e.im.abs() >= HERMITIAN_TOL {
        return Err(Error::NonHermitian(e.im.abs()));
    }
    let mut lam = Statevector { n_qubits: phi.n_qubits, amps: lam_amps };
    let mut grad = vec![0.0; theta.len()];
    for (k, g) in ansatz.generators.iter().enumerate().rev() {
        let gphi = phi.apply_operator_terms(&g.strings);
        let v: Complex64 = lam.amps.iter().zip(&gphi).map(|(l, x)| l.conj() * x).sum();
        grad[k] = v.im;
        phi.apply_generator(g, -theta[k]);
        lam.apply_generator(g, -theta[k]);
    }
    Ok((e.re, grad))
}

/// `gradient_shift` is the reference path; [`gradient_adjoint`] agrees with it.
pub fn gradient(h: &QubitOperator, ansatz: &Ansatz, theta: &[f64]) -> Result<Vec<f64>> {
    gradient_shift(h, ansatz, theta)
}
