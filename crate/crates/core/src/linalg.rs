//! Dense complex linear algebra.
//!
//! Matrices are stored row-major. Qubit 0 is the most significant bit of a basis
//! index, so `tensor_product(a, b)` places `a`'s indices in the leading block.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(crate::error::invalid_arg("matrix dimensions must be positive"));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = C64::new(d, 0.0);
        }
        m
    }

    /// `|u⟩⟨v|`
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.data[j * self.cols + i].conj())
    }

    /// Matrix product. Panics if the inner dimensions disagree.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul: inner dimensions disagree");
        let (n, m, p) = (self.rows, self.cols, rhs.cols);
        let mut out = vec![ZERO; n * p];
        for i in 0..n {
            let out_row = &mut out[i * p..(i + 1) * p];
            for k in 0..m {
                let a = self.data[i * m + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * p..(k + 1) * p];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Self {
            rows: n,
            cols: p,
            data: out,
        }
    }

    pub fn mat_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "mat_vec: dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Self { data, ..*self }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Self { data, ..*self }
    }

    pub fn scale(&self, s: C64) -> Self {
        let data = self.data.iter().map(|a| a * s).collect();
        Self { data, ..*self }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols))
            .map(|i| self.data[i * self.cols + i])
            .sum()
    }

    /// `tr(self · rhs)` without forming the product.
    pub fn trace_of_product(&self, rhs: &Self) -> C64 {
        assert_eq!((self.rows, self.cols), (rhs.cols, rhs.rows));
        let mut acc = ZERO;
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self.data[i * self.cols + k] * rhs.data[k * rhs.cols + i];
            }
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    /// Largest entrywise `|M − M†|`; infinite for non-square input.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut dev = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.data[i * n + j] - self.data[j * n + i].conj()).norm();
                dev = dev.max(d);
            }
        }
        dev
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(C64::norm_sqr).sum::<f64>().sqrt()
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.cols;
        self.data
            .iter()
            .enumerate()
            .all(|(idx, z)| idx / n == idx % n || *z == ZERO)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Kronecker product `a ⊗ b`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca, rb, cb) = (a.rows, a.cols, b.rows, b.cols);
    let cols = ca * cb;
    let mut data = vec![ZERO; ra * rb * cols];
    for i in 0..ra {
        for j in 0..ca {
            let s = a.data[i * ca + j];
            if s == ZERO {
                continue;
            }
            for k in 0..rb {
                let row = (i * rb + k) * cols + j * cb;
                for l in 0..cb {
                    data[row + l] = s * b.data[k * cb + l];
                }
            }
        }
    }
    ComplexMatrix {
        rows: ra * rb,
        cols,
        data,
    }
}

/// Eigendecomposition of a Hermitian matrix: ascending eigenvalues and the
/// matching orthonormal eigenvectors stored as columns.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `V f(Λ) V†`
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        let v = &self.vectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            if fv[k] == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = v[(i, k)] * fv[k];
                if vik == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += vik * v[(j, k)].conj();
                }
            }
        }
        out
    }
}

fn hermitian_tolerance(h: &ComplexMatrix) -> f64 {
    1e-9 * h.max_abs().max(1.0)
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
pub fn eigh(h: &ComplexMatrix) -> Result<HermitianEigen> {
    let dev = h.hermitian_deviation();
    if dev > hermitian_tolerance(h) {
        return Err(Error::NotHermitian(dev));
    }
    let n = h.rows;
    if h.is_diagonal() {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| h[(a, a)].re.total_cmp(&h[(b, b)].re));
        let values = order.iter().map(|&i| h[(i, i)].re).collect();
        let mut vectors = ComplexMatrix::zeros(n, n);
        for (col, &i) in order.iter().enumerate() {
            vectors[(i, col)] = ONE;
        }
        return Ok(HermitianEigen { values, vectors });
    }

    // symmetrize so the rotations act on an exactly Hermitian matrix
    let mut a = ComplexMatrix::from_fn(n, n, |i, j| (h[(i, j)] + h[(j, i)].conj()) * 0.5);
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    let off_diagonal = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                s += a[(p, q)].norm_sqr();
            }
        }
        s.sqrt()
    };

    let mut converged = false;
    for _sweep in 0..64 {
        if off_diagonal(&a) <= 1e-15 * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 || mag <= 1e-18 * scale {
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    continue;
                }
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let e_neg = phase.conj();
                // J = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] on (p, q)
                let jqp = -e_neg * s;
                let jqq = e_neg * c;
                for k in 0..n {
                    let x = a[(k, p)];
                    let y = a[(k, q)];
                    a[(k, p)] = x * c + y * jqp;
                    a[(k, q)] = x * s + y * jqq;
                }
                for k in 0..n {
                    let x = a[(p, k)];
                    let y = a[(q, k)];
                    a[(p, k)] = x * c + y * jqp.conj();
                    a[(q, k)] = x * s + y * jqq.conj();
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(app - t * mag, 0.0);
                a[(q, q)] = C64::new(aqq + t * mag, 0.0);
                for k in 0..n {
                    let x = v[(k, p)];
                    let y = v[(k, q)];
                    v[(k, p)] = x * c + y * jqp;
                    v[(k, q)] = x * s + y * jqq;
                }
            }
        }
    }
    if !converged && off_diagonal(&a) > 1e-10 * scale {
        return Err(Error::NoConvergence);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].re.total_cmp(&a[(y, y)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, col| v[(i, order[col])]);
    Ok(HermitianEigen { values, vectors })
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn eigvalsh(h: &ComplexMatrix) -> Result<Vec<f64>> {
    eigh(h).map(|e| e.values)
}

/// Applies a scalar function to a Hermitian matrix through its eigendecomposition.
pub fn herm_matrix_function(h: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    Ok(eigh(h)?.map(f))
}
