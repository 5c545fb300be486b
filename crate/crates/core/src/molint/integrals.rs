use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::basis::BasisShell;
use super::boys::boys;
use super::geometry::{dist, dist2, Molecule};
use crate::error::{Error, Result};
use crate::tensor::Tensor4;

/// Atomic-orbital integrals; `eri` is in chemists' notation `(pq|rs)`.
#[derive(Debug, Clone)]
pub struct AOIntegralSet {
    pub n_ao: usize,
    pub overlap: DMatrix<f64>,
    pub kinetic: DMatrix<f64>,
    pub nuclear: DMatrix<f64>,
    /// `kinetic + nuclear`
    pub core_hamiltonian: DMatrix<f64>,
    pub eri: Tensor4,
    pub nuclear_repulsion: f64,
}

struct Prim {
    alpha: f64,
    /// contraction coefficient times primitive and contraction normalization
    weight: f64,
    center: [f64; 3],
}

fn gaussian_product(a: &Prim, b: &Prim) -> (f64, [f64; 3], f64) {
    let p = a.alpha + b.alpha;
    let mut center = [0.0; 3];
    for k in 0..3 {
        center[k] = (a.alpha * a.center[k] + b.alpha * b.center[k]) / p;
    }
    let k_ab = (-a.alpha * b.alpha / p * dist2(&a.center, &b.center)).exp();
    (p, center, k_ab)
}

fn prim_overlap(a: &Prim, b: &Prim) -> f64 {
    let (p, _, k) = gaussian_product(a, b);
    (PI / p).powf(1.5) * k
}

fn prim_kinetic(a: &Prim, b: &Prim) -> f64 {
    let p = a.alpha + b.alpha;
    let mu = a.alpha * b.alpha / p;
    mu * (3.0 - 2.0 * mu * dist2(&a.center, &b.center)) * prim_overlap(a, b)
}

fn prim_nuclear(a: &Prim, b: &Prim, charge: f64, nucleus: &[f64; 3]) -> f64 {
    let (p, pc, k) = gaussian_product(a, b);
    -charge * 2.0 * PI / p * k * boys(0, p * dist2(&pc, nucleus))
}

fn prim_eri(a: &Prim, b: &Prim, c: &Prim, d: &Prim) -> f64 {
    let (p, pc, kab) = gaussian_product(a, b);
    let (q, qc, kcd) = gaussian_product(c, d);
    let rho = p * q / (p + q);
    2.0 * PI.powf(2.5) / (p * q * (p + q).sqrt()) * kab * kcd * boys(0, rho * dist2(&pc, &qc))
}

fn expand(shell: &BasisShell) -> Vec<Prim> {
    let mut prims: Vec<Prim> = shell
        .exponents
        .iter()
        .zip(&shell.coefficients)
        .map(|(&alpha, &c)| Prim { alpha, weight: c * (2.0 * alpha / PI).powf(0.75), center: shell.center })
        .collect();
    let mut norm = 0.0;
    for a in &prims {
        for b in &prims {
            norm += a.weight * b.weight * prim_overlap(a, b);
        }
    }
    let scale = 1.0 / norm.sqrt();
    for p in &mut prims {
        p.weight *= scale;
    }
    prims
}

fn contract2(a: &[Prim], b: &[Prim], f: impl Fn(&Prim, &Prim) -> f64) -> f64 {
    let mut s = 0.0;
    for pa in a {
        for pb in b {
            s += pa.weight * pb.weight * f(pa, pb);
        }
    }
    s
}

/// Overlap, kinetic, nuclear-attraction and electron-repulsion integrals over
/// normalized contracted s-type Gaussians.
pub fn compute_ao_integrals(molecule: &Molecule, shells: &[BasisShell]) -> Result<AOIntegralSet> {
    let atoms = molecule.atoms();
    let mut e_nuc = 0.0;
    for i in 0..atoms.len() {
        for j in 0..i {
            let r = dist(&atoms[i].position, &atoms[j].position);
            if r < 1e-8 {
                return Err(Error::NuclearCoincidence(j, i));
            }
            e_nuc += (atoms[i].z * atoms[j].z) as f64 / r;
        }
    }

    let basis: Vec<Vec<Prim>> = shells.iter().map(expand).collect();
    let n = basis.len();
    let mut overlap = DMatrix::zeros(n, n);
    let mut kinetic = DMatrix::zeros(n, n);
    let mut nuclear = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let s = contract2(&basis[i], &basis[j], prim_overlap);
            let t = contract2(&basis[i], &basis[j], prim_kinetic);
            let v: f64 = atoms
                .iter()
                .map(|at| contract2(&basis[i], &basis[j], |a, b| prim_nuclear(a, b, at.z as f64, &at.position)))
                .sum();
            for (m, val) in [(&mut overlap, s), (&mut kinetic, t), (&mut nuclear, v)] {
                m[(i, j)] = val;
                m[(j, i)] = val;
            }
        }
    }

    let mut eri = Tensor4::zeros(n);
    for p in 0..n {
        for q in 0..=p {
            let pq = p * (p + 1) / 2 + q;
            for r in 0..n {
                for s in 0..=r {
                    let rs = r * (r + 1) / 2 + s;
                    if rs > pq {
                        continue;
                    }
                    let mut v = 0.0;
                    for a in &basis[p] {
                        for b in &basis[q] {
                            for c in &basis[r] {
                                for d in &basis[s] {
                                    v += a.weight * b.weight * c.weight * d.weight * prim_eri(a, b, c, d);
                                }
                            }
                        }
                    }
                    eri.set_chemist_8fold(p, q, r, s, v);
                }
            }
        }
    }

    let core_hamiltonian = &kinetic + &nuclear;
    Ok(AOIntegralSet {
        n_ao: n,
        overlap,
        kinetic,
        nuclear,
        core_hamiltonian,
        eri,
        nuclear_repulsion: e_nuc,
    })
}
