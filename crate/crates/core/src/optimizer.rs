//! BFGS with a strong-Wolfe line search, and the VQE driver built on it.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::Ansatz;
use crate::error::{Error, Result};
use crate::fermion::QubitOperator;
use crate::simulator;

const C1: f64 = 1e-4;
const C2: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BfgsOptions {
    /// Exit once the gradient max-norm drops below this.
    pub grad_tol: f64,
    pub max_iter: usize,
    pub max_line_search: usize,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self { grad_tol: 1e-6, max_iter: 500, max_line_search: 40 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub iteration: usize,
    pub energy: f64,
    pub grad_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub parameters: Vec<f64>,
    pub energy: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub n_fev: usize,
    pub n_gev: usize,
    pub converged: bool,
    pub message: String,
    pub trajectory: Vec<TrajectoryPoint>,
    /// Random restarts performed in addition to the zero start.
    pub restarts: usize,
}

impl OptimizationResult {
    pub fn write_trajectory_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["iteration", "energy", "grad_norm"])?;
        for p in &self.trajectory {
            out.write_record([p.iteration.to_string(), format!("{:?}", p.energy), format!("{:?}", p.grad_norm)])?;
        }
        out.flush()?;
        Ok(())
    }
}

fn inf_norm(g: &[f64]) -> f64 {
    g.iter().fold(0.0, |m, x| m.max(x.abs()))
}

struct Counted<F> {
    f: F,
    n: usize,
}

impl<F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>> Counted<F> {
    fn eval(&mut self, x: &DVector<f64>) -> Result<(f64, DVector<f64>)> {
        self.n += 1;
        let (v, g) = (self.f)(x.as_slice())?;
        if !v.is_finite() || g.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                msg: if v.is_finite() { "non-finite gradient".into() } else { format!("non-finite objective {v}") },
                theta: x.as_slice().to_vec(),
            });
        }
        if g.len() != x.len() {
            return Err(Error::Dimension(format!("gradient of length {} for {} parameters", g.len(), x.len())));
        }
        Ok((v, DVector::from_vec(g)))
    }
}

struct LinePoint {
    alpha: f64,
    f: f64,
    g: DVector<f64>,
    d: f64,
}

/// Minimizer of the cubic through `(a, fa, da)` and `(b, fb, db)`, falling
/// back to bisection when it is undefined or too close to an end.
fn interpolate(lo: &LinePoint, hi: &LinePoint) -> f64 {
    let (a, b) = (lo.alpha, hi.alpha);
    let d1 = lo.d + hi.d - 3.0 * (lo.f - hi.f) / (a - b);
    let disc = d1 * d1 - lo.d * hi.d;
    let mid = 0.5 * (a + b);
    if disc < 0.0 {
        return mid;
    }
    let d2 = (b - a).signum() * disc.sqrt();
    let t = b - (b - a) * (hi.d + d2 - d1) / (hi.d - lo.d + 2.0 * d2);
    let (l, r) = (a.min(b), a.max(b));
    let margin = 0.1 * (r - l);
    if !t.is_finite() || t < l + margin || t > r - margin {
        mid
    } else {
        t
    }
}

/// Strong-Wolfe line search; returns the accepted point or `None`.
fn line_search<F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>>(
    fg: &mut Counted<F>,
    x: &DVector<f64>,
    p: &DVector<f64>,
    f0: f64,
    d0: f64,
    max_evals: usize,
) -> Result<Option<LinePoint>> {
    let probe = |fg: &mut Counted<F>, alpha: f64| -> Result<LinePoint> {
        let (f, g) = fg.eval(&(x + alpha * p))?;
        let d = g.dot(p);
        Ok(LinePoint { alpha, f, g, d })
    };
    let sufficient = |pt: &LinePoint| pt.f <= f0 + C1 * pt.alpha * d0;
    let curvature = |pt: &LinePoint| pt.d.abs() <= -C2 * d0;

    let mut prev = LinePoint { alpha: 0.0, f: f0, g: DVector::zeros(0), d: d0 };
    let mut alpha = 1.0;
    let mut evals = 0;
    let (mut lo, mut hi);
    loop {
        if evals >= max_evals {
            return Ok(None);
        }
        let cur = probe(fg, alpha)?;
        evals += 1;
        if !sufficient(&cur) || (evals > 1 && cur.f >= prev.f) {
            lo = prev;
            hi = cur;
            break;
        }
        if curvature(&cur) {
            return Ok(Some(cur));
        }
        if cur.d >= 0.0 {
            lo = cur;
            hi = prev;
            break;
        }
        prev = cur;
        alpha *= 2.0;
    }
    while evals < max_evals {
        let a = interpolate(&lo, &hi);
        let cur = probe(fg, a)?;
        evals += 1;
        if !sufficient(&cur) || cur.f >= lo.f {
            hi = cur;
        } else {
            if curvature(&cur) {
                return Ok(Some(cur));
            }
            if cur.d * (hi.alpha - lo.alpha) >= 0.0 {
                hi = std::mem::replace(&mut lo, cur);
            } else {
                lo = cur;
            }
        }
        if (hi.alpha - lo.alpha).abs() < 1e-16 {
            break;
        }
    }
    // accept a strictly decreasing point even without the curvature condition
    if lo.alpha > 0.0 && lo.f < f0 && lo.g.len() == x.len() {
        return Ok(Some(lo));
    }
    Ok(None)
}

/// BFGS on `fg(theta) -> (value, gradient)` from `theta0`.
pub fn minimize<F>(fg: F, theta0: &[f64], opts: &BfgsOptions) -> Result<OptimizationResult>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    let n = theta0.len();
    let mut fg = Counted { f: fg, n: 0 };
    let mut x = DVector::from_column_slice(theta0);
    let (mut f, mut g) = fg.eval(&x)?;
    let mut trajectory = vec![TrajectoryPoint { iteration: 0, energy: f, grad_norm: inf_norm(g.as_slice()) }];
    let mut hinv = DMatrix::<f64>::identity(n, n);
    let mut first = true;
    let mut iterations = 0;
    let mut converged = inf_norm(g.as_slice()) < opts.grad_tol;
    let mut message = if converged { "gradient below tolerance".to_string() } else { String::new() };

    while !converged && iterations < opts.max_iter {
        let mut p = -(&hinv * &g);
        let mut d0 = g.dot(&p);
        if d0 >= 0.0 {
            // lost descent; restart from steepest descent
            hinv = DMatrix::identity(n, n);
            first = true;
            p = -g.clone();
            d0 = g.dot(&p);
        }
        let Some(pt) = line_search(&mut fg, &x, &p, f, d0, opts.max_line_search)? else {
            message = "line search failed to find an acceptable step".into();
            break;
        };
        iterations += 1;
        let s = pt.alpha * &p;
        let y = &pt.g - &g;
        x += &s;
        f = pt.f;
        g = pt.g;
        let gn = inf_norm(g.as_slice());
        trajectory.push(TrajectoryPoint { iteration: iterations, energy: f, grad_norm: gn });
        if gn < opts.grad_tol {
            converged = true;
            message = "gradient below tolerance".into();
            break;
        }
        let ys = y.dot(&s);
        if ys > 1e-14 * y.norm() * s.norm() {
            if first {
                hinv *= ys / y.dot(&y);
                first = false;
            }
            let rho = 1.0 / ys;
            let hy = &hinv * &y;
            let yhy = y.dot(&hy);
            // H+ = H - rho (s (Hy)^T + (Hy) s^T) + (rho^2 y.Hy + rho) s s^T
            hinv -= rho * (&s * hy.transpose() + &hy * s.transpose());
            hinv += (rho * rho * yhy + rho) * (&s * s.transpose());
        }
    }
    if !converged && message.is_empty() {
        message = "maximum iterations reached".into();
    }
    Ok(OptimizationResult {
        parameters: x.as_slice().to_vec(),
        energy: f,
        grad_norm: inf_norm(g.as_slice()),
        iterations,
        n_fev: fg.n,
        n_gev: fg.n,
        converged,
        message,
        trajectory,
        restarts: 0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VqeOptions {
    pub grad_tol: f64,
    pub max_iter: usize,
    pub max_line_search: usize,
    /// Extra runs from seeded random starts; the lowest energy wins.
    pub restarts: usize,
    pub seed: u64,
    /// Half-width of the uniform distribution for random starts.
    pub restart_scale: f64,
}

impl Default for VqeOptions {
    fn default() -> Self {
        let b = BfgsOptions::default();
        Self {
            grad_tol: b.grad_tol,
            max_iter: b.max_iter,
            max_line_search: b.max_line_search,
            restarts: 0,
            seed: 0,
            restart_scale: 0.5,
        }
    }
}

impl VqeOptions {
    pub fn bfgs(&self) -> BfgsOptions {
        BfgsOptions { grad_tol: self.grad_tol, max_iter: self.max_iter, max_line_search: self.max_line_search }
    }
}

/// VQE from `theta = 0`, using the adjoint gradient.
pub fn run_vqe(h: &QubitOperator, ansatz: &Ansatz, opts: &VqeOptions) -> Result<OptimizationResult> {
    if h.n_qubits() != ansatz.n_qubits {
        return Err(Error::Dimension(format!("Hamiltonian on {} qubits, ansatz on {}", h.n_qubits(), ansatz.n_qubits)));
    }
    let n = ansatz.n_parameters();
    let fg = |t: &[f64]| simulator::energy_and_gradient(h, ansatz, t);
    let bfgs = opts.bfgs();
    let mut best = minimize(fg, &vec![0.0; n], &bfgs)?;
    if opts.restarts > 0 {
        let runs: Vec<OptimizationResult> = (0..opts.restarts)
            .into_par_iter()
            .map(|r| {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(r as u64));
                let start: Vec<f64> =
                    (0..n).map(|_| rng.random_range(-opts.restart_scale..=opts.restart_scale)).collect();
                minimize(|t: &[f64]| simulator::energy_and_gradient(h, ansatz, t), &start, &bfgs)
            })
            .collect::<Result<_>>()?;
        for r in runs {
            if r.energy < best.energy - 1e-12 {
                best = r;
            }
        }
        best.restarts = opts.restarts;
    }
    Ok(best)
}
