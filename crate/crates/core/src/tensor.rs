//! Dense rank-4 tensor used for two-electron integrals.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tensor4 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n * n * n] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn offset(&self, p: usize, q: usize, r: usize, s: usize) -> usize {
        ((p * self.n + q) * self.n + r) * self.n + s
    }

    #[inline]
    pub fn get(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.data[self.offset(p, q, r, s)]
    }

    #[inline]
    pub fn set(&mut self, p: usize, q: usize, r: usize, s: usize, value: f64) {
        let k = self.offset(p, q, r, s);
        self.data[k] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Sets all eight index permutations related by real chemists' symmetry
    /// `(pq|rs) = (qp|rs) = (pq|sr) = (rs|pq)`.
    pub fn set_chemist_8fold(&mut self, p: usize, q: usize, r: usize, s: usize, value: f64) {
        for (a, b, c, d) in [
            (p, q, r, s),
            (q, p, r, s),
            (p, q, s, r),
            (q, p, s, r),
            (r, s, p, q),
            (s, r, p, q),
            (r, s, q, p),
            (s, r, q, p),
        ] {
            self.set(a, b, c, d, value);
        }
    }

    /// Reorders indices: `out[p,q,r,s] = self[p,r,q,s]`. Converts chemists'
    /// `(pr|qs)` storage into physicists' `<pq|rs>` and back (the map is an
    /// involution).
    pub fn swap_inner(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        out.set(p, q, r, s, self.get(p, r, q, s));
                    }
                }
            }
        }
        out
    }

    /// Full four-index transform `out[a,b,c,d] = sum c[p,a] c[q,b] c[r,c] c[s,d] t[p,q,r,s]`
    /// with `c` of shape `n x m`, done as four quarter transforms.
    pub fn transform(&self, c: &DMatrix<f64>) -> Self {
        assert_eq!(c.nrows(), self.n, "transform row count must match tensor dimension");
        let n = self.n;
        let m = c.ncols();
        // quarter transforms on a rectangular buffer indexed [i0][i1][i2][i3]
        let mut dims = [n, n, n, n];
        let mut buf = self.data.clone();
        for axis in 0..4 {
            let mut new_dims = dims;
            new_dims[axis] = m;
            let mut out = vec![0.0; new_dims.iter().product()];
            let stride_in = |d: &[usize; 4], i: [usize; 4]| ((i[0] * d[1] + i[1]) * d[2] + i[2]) * d[3] + i[3];
            for i0 in 0..dims[0] {
                for i1 in 0..dims[1] {
                    for i2 in 0..dims[2] {
                        for i3 in 0..dims[3] {
                            let idx = [i0, i1, i2, i3];
                            let v = buf[stride_in(&dims, idx)];
                            if v == 0.0 {
                                continue;
                            }
                            let p = idx[axis];
                            for a in 0..m {
                                let w = c[(p, a)];
                                if w == 0.0 {
                                    continue;
                                }
                                let mut j = idx;
                                j[axis] = a;
                                out[stride_in(&new_dims, j)] += w * v;
                            }
                        }
                    }
                }
            }
            buf = out;
            dims = new_dims;
        }
        Self { n: m, data: buf }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Restriction to a subset of indices, in the listed order.
    pub fn select(&self, keep: &[usize]) -> Self {
        let m = keep.len();
        let mut out = Self::zeros(m);
        for (a, &p) in keep.iter().enumerate() {
            for (b, &q) in keep.iter().enumerate() {
                for (c, &r) in keep.iter().enumerate() {
                    for (d, &s) in keep.iter().enumerate() {
                        out.set(a, b, c, d, self.get(p, q, r, s));
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_transform_is_noop() {
        let mut t = Tensor4::zeros(3);
        t.set_chemist_8fold(0, 1, 2, 1, 0.25);
        t.set_chemist_8fold(2, 2, 2, 2, 1.5);
        let id = DMatrix::<f64>::identity(3, 3);
        assert!(t.transform(&id).max_abs_diff(&t) < 1e-15);
    }

    #[test]
    fn swap_inner_is_involution() {
        let mut t = Tensor4::zeros(2);
        t.set(0, 1, 1, 0, 3.0);
        t.set(1, 0, 0, 0, -1.0);
        assert_eq!(t.swap_inner().swap_inner(), t);
        assert_eq!(t.swap_inner().get(0, 1, 1, 0), 3.0);
        assert_eq!(t.swap_inner().get(1, 0, 0, 0), -1.0);
        assert_eq!(t.swap_inner().get(0, 1, 0, 1), 0.0);
    }
}
