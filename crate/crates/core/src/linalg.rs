//! Small dense complex matrices and a Hermitian positive-definite solver.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `A^H x`.
    pub fn adjoint_mul_vec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: x.len(),
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.cols];
        for (r, &xr) in x.iter().enumerate() {
            if xr == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(r)) {
                *o += a.conj() * xr;
            }
        }
        Ok(out)
    }

    /// Gram matrix `A^H A`, exactly Hermitian. Zero entries of `A` are skipped,
    /// which matters for the banded channel matrices built in this crate.
    pub fn gram(&self) -> CMatrix {
        let n = self.cols;
        let mut g = CMatrix::zeros(n, n);
        let mut nz: Vec<(usize, Complex64)> = Vec::with_capacity(n);
        for r in 0..self.rows {
            nz.clear();
            nz.extend(
                self.row(r)
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v != Complex64::new(0.0, 0.0))
                    .map(|(i, v)| (i, *v)),
            );
            for &(p, vp) in &nz {
                let cp = vp.conj();
                for &(q, vq) in nz.iter().filter(|(q, _)| *q >= p) {
                    g.data[p * n + q] += cp * vq;
                }
            }
        }
        for p in 0..n {
            g.data[p * n + p].im = 0.0;
            for q in 0..p {
                g.data[p * n + q] = g.data[q * n + p].conj();
            }
        }
        g
    }

    /// Columns `cols` of `self`, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> CMatrix {
        let mut out = CMatrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                out.data[r * cols.len() + j] = self.data[r * self.cols + c];
            }
        }
        out
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self.data[r * self.cols + c]).collect()
    }

    pub fn add_diagonal(&mut self, d: f64) {
        for i in 0..self.rows.min(self.cols) {
            self.data[i * self.cols + i] += d;
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Lower-triangular Cholesky factor `L` with `A = L L^H`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: CMatrix,
}

impl Cholesky {
    /// Factorizes a Hermitian positive-definite matrix; only the lower
    /// triangle of `a` is read.
    pub fn new(a: &CMatrix) -> Result<Self> {
        let n = a.rows;
        if a.cols != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: a.cols,
            });
        }
        let mut l = CMatrix::zeros(n, n);
        let max_diag = (0..n).map(|i| a[(i, i)].re).fold(0.0, f64::max);
        for j in 0..n {
            let mut d = a[(j, j)].re;
            for k in 0..j {
                d -= l.data[j * n + k].norm_sqr();
            }
            if d <= 0.0 || !d.is_finite() {
                return Err(Error::SolveFailed {
                    pivot: j,
                    value: d,
                    ratio: if d > 0.0 { max_diag / d } else { f64::INFINITY },
                });
            }
            let djj = d.sqrt();
            l.data[j * n + j] = Complex64::new(djj, 0.0);
            for i in (j + 1)..n {
                let (ri, rj) = (i * n, j * n);
                let mut s = a.data[ri + j];
                for k in 0..j {
                    s -= l.data[ri + k] * l.data[rj + k].conj();
                }
                l.data[ri + j] = s / djj;
            }
        }
        Ok(Cholesky { l })
    }

    /// Ratio of the largest to smallest squared pivot, a cheap lower bound on
    /// the condition number.
    pub fn pivot_ratio(&self) -> f64 {
        let n = self.l.rows;
        let d: Vec<f64> = (0..n).map(|i| self.l[(i, i)].re.powi(2)).collect();
        let hi = d.iter().cloned().fold(0.0, f64::max);
        let lo = d.iter().cloned().fold(f64::INFINITY, f64::min);
        hi / lo
    }

    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.l.rows;
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: b.len(),
            });
        }
        let l = &self.l.data;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= l[i * n + k] * y[k];
            }
            y[i] = s / l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= l[k * n + i].conj() * y[k];
            }
            y[i] = s / l[i * n + i];
        }
        Ok(y)
    }
}
