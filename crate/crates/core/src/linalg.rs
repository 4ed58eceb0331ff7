//! Small dense linear algebra: symmetric eigenproblems, orthonormalization
//! and rank. Matrices here are weight blocks, so at most a few hundred rows.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Dense {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Dense { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols);
            m.data[i * cols..(i + 1) * cols].copy_from_slice(r);
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// # Panics
    /// On shape mismatch.
    pub fn mul(&self, other: &Dense) -> Dense {
        assert_eq!(self.cols, other.rows, "dense product shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &Dense) -> Dense {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Dense { rows: self.rows, cols: self.cols, data }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, &v| m.max(libm::fabs(v)))
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

impl Index<(usize, usize)> for Dense {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Dense {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Eigenvalues ascending; column `j` of the returned matrix is the
/// eigenvector of eigenvalue `j`.
pub fn symmetric_eigen(a: &Dense) -> (Vec<f64>, Dense) {
    assert_eq!(a.rows, a.cols, "eigenproblem needs a square matrix");
    let n = a.rows;
    let mut m = a.clone();
    let mut v = Dense::identity(n);
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += m[(i, j)] * m[(i, j)];
            }
        }
        if libm::sqrt(off) <= 1e-17 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = libm::copysign(1.0, theta) / (libm::fabs(theta) + libm::sqrt(theta * theta + 1.0));
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = Dense::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, new)] = v[(k, old)];
        }
    }
    (values, vectors)
}

pub fn symmetric_eigenvalues(a: &Dense) -> Vec<f64> {
    symmetric_eigen(a).0
}

/// Singular values, descending.
pub fn singular_values(a: &Dense) -> Vec<f64> {
    let g = if a.rows <= a.cols { a.mul(&a.transpose()) } else { a.transpose().mul(a) };
    let mut s: Vec<f64> = symmetric_eigenvalues(&g).into_iter().map(|x| libm::sqrt(x.max(0.0))).collect();
    s.reverse();
    s
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

/// Incremental orthonormal set; vectors whose residual norm falls below the
/// pivot threshold are rejected as dependent.
#[derive(Debug, Clone, Default)]
pub struct GramSchmidt {
    basis: Vec<Vec<f64>>,
    pivot: f64,
}

impl GramSchmidt {
    pub fn new(pivot: f64) -> Self {
        GramSchmidt { basis: Vec::new(), pivot }
    }

    /// Adds `v` if it is independent of the current span; returns the
    /// normalized new direction when accepted.
    pub fn insert(&mut self, v: &[f64]) -> Option<&[f64]> {
        let scale = norm(v);
        if scale == 0.0 {
            return None;
        }
        let mut w = v.to_vec();
        // two passes for stability
        for _ in 0..2 {
            for b in &self.basis {
                let c = dot(&w, b);
                for (x, y) in w.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
        let n = norm(&w);
        if n <= self.pivot * scale {
            return None;
        }
        for x in &mut w {
            *x /= n;
        }
        self.basis.push(w);
        self.basis.last().map(|b| b.as_slice())
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.basis
    }
}

/// Numerical rank of the row space.
pub fn rank(a: &Dense, pivot: f64) -> usize {
    let mut gs = GramSchmidt::new(pivot);
    for i in 0..a.rows {
        gs.insert(a.row(i));
    }
    gs.rank()
}

/// Orthonormal basis of the null space of `a` (vectors `x` with `a x = 0`),
/// from the eigenvectors of `a^T a` with eigenvalue below `tol` relative to
/// the largest.
pub fn null_space(a: &Dense, tol: f64) -> Vec<Vec<f64>> {
    let g = a.transpose().mul(a);
    let (vals, vecs) = symmetric_eigen(&g);
    let top = vals.iter().fold(0.0f64, |m, &v| m.max(libm::fabs(v))).max(1.0);
    (0..vals.len()).filter(|&j| vals[j] <= tol * top).map(|j| vecs.column(j)).collect()
}
