//! Dense column-major matrices and packed symmetric matrices.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Dense real matrix stored column by column.
///
/// Columns are contiguous, so `col(j)` is a plain slice. Loading vectors of
/// the sparse-PCA model are columns, which is why this order was chosen.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::eye(n, n)
    }

    /// The first `cols` columns of the `rows × rows` identity.
    pub fn eye(rows: usize, cols: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        for j in 0..rows.min(cols) {
            m[(j, j)] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (j, &d) in diag.iter().enumerate() {
            m[(j, j)] = d;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                m.data[i + j * rows] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from column-major data, rejecting non-finite entries.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument("matrix dimensions must be positive".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: (rows, cols),
                found: (data.len(), 1),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos % rows,
                col: pos / rows,
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from row-major data (the natural layout for literals).
    pub fn from_row_major(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: (rows, cols),
                found: (data.len(), 1),
            });
        }
        let mut col_major = vec![0.0; rows * cols];
        for i in 0..rows {
            for j in 0..cols {
                col_major[i + j * rows] = data[i * cols + j];
            }
        }
        Self::from_col_major(rows, cols, col_major)
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
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.cols).map(|j| self[(i, j)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for j in 0..self.cols {
            for i in 0..self.rows {
                t.data[j + i * self.cols] = self.data[i + j * self.rows];
            }
        }
        t
    }

    /// The leading `cols` columns.
    pub fn leading_cols(&self, cols: usize) -> Self {
        assert!(cols >= 1 && cols <= self.cols);
        Self {
            rows: self.rows,
            cols,
            data: self.data[..self.rows * cols].to_vec(),
        }
    }

    pub fn check_shape(&self, rows: usize, cols: usize) -> Result<()> {
        if self.shape() != (rows, cols) {
            return Err(Error::DimensionMismatch {
                expected: (rows, cols),
                found: self.shape(),
            });
        }
        Ok(())
    }

    /// `self · other`.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul: inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for j in 0..other.cols {
            let dst = &mut out.data[j * self.rows..(j + 1) * self.rows];
            for (k, &b) in other.col(j).iter().enumerate() {
                if b != 0.0 {
                    axpy_slice(dst, b, self.col(k));
                }
            }
        }
        out
    }

    /// `selfᵀ · other`.
    pub fn tr_matmul(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "tr_matmul: row counts differ");
        let mut out = Self::zeros(self.cols, other.cols);
        for i in 0..self.cols {
            let a = self.col(i);
            for j in 0..other.cols {
                out.data[i + j * self.cols] = dot_slice(a, other.col(j));
            }
        }
        out
    }

    /// `self · otherᵀ`.
    pub fn matmul_tr(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "matmul_tr: column counts differ");
        let mut out = Self::zeros(self.rows, other.rows);
        for k in 0..self.cols {
            let a = self.col(k);
            let b = other.col(k);
            for (j, &bj) in b.iter().enumerate() {
                if bj != 0.0 {
                    axpy_slice(&mut out.data[j * self.rows..(j + 1) * self.rows], bj, a);
                }
            }
        }
        out
    }

    /// `self · S` for a symmetric `S`.
    pub fn mul_sym(&self, s: &SymMatrix) -> Self {
        assert_eq!(self.cols, s.dim(), "mul_sym: dimensions differ");
        let mut out = Self::zeros(self.rows, self.cols);
        for j in 0..self.cols {
            let dst = &mut out.data[j * self.rows..(j + 1) * self.rows];
            for k in 0..self.cols {
                let c = s.get(k, j);
                if c != 0.0 {
                    axpy_slice(dst, c, &self.data[k * self.rows..(k + 1) * self.rows]);
                }
            }
        }
        out
    }

    /// `self += alpha · x`.
    pub fn axpy(&mut self, alpha: f64, x: &Self) {
        assert_eq!(self.shape(), x.shape(), "axpy: shapes differ");
        axpy_slice(&mut self.data, alpha, &x.data);
    }

    pub fn scale_mut(&mut self, alpha: f64) {
        self.data.iter_mut().for_each(|v| *v *= alpha);
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        out.scale_mut(alpha);
        out
    }

    /// Entrywise map.
    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Frobenius inner product `tr(selfᵀ other)`.
    pub fn dot(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape(), "dot: shapes differ");
        dot_slice(&self.data, &other.data)
    }

    pub fn frob_norm_sq(&self) -> f64 {
        dot_slice(&self.data, &self.data)
    }

    pub fn frob_norm(&self) -> f64 {
        libm::sqrt(self.frob_norm_sq())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `sym(selfᵀ other) = (selfᵀ other + otherᵀ self) / 2`.
    pub fn sym_tr_matmul(&self, other: &Self) -> SymMatrix {
        let prod = self.tr_matmul(other);
        SymMatrix::from_dense_sym_part(&prod)
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i + j * self.rows]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i + j * self.rows]
    }
}

impl Add for &DenseMatrix {
    type Output = DenseMatrix;

    fn add(self, rhs: &DenseMatrix) -> DenseMatrix {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl Sub for &DenseMatrix {
    type Output = DenseMatrix;

    fn sub(self, rhs: &DenseMatrix) -> DenseMatrix {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

impl Mul for &DenseMatrix {
    type Output = DenseMatrix;

    fn mul(self, rhs: &DenseMatrix) -> DenseMatrix {
        self.matmul(rhs)
    }
}

impl Mul<&DenseMatrix> for f64 {
    type Output = DenseMatrix;

    fn mul(self, rhs: &DenseMatrix) -> DenseMatrix {
        rhs.scaled(self)
    }
}

impl Neg for &DenseMatrix {
    type Output = DenseMatrix;

    fn neg(self) -> DenseMatrix {
        self.scaled(-1.0)
    }
}

#[inline]
pub(crate) fn dot_slice(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    // Four accumulators let the loop vectorize without reassociation flags.
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let k = 4 * c;
        acc[0] += a[k] * b[k];
        acc[1] += a[k + 1] * b[k + 1];
        acc[2] += a[k + 2] * b[k + 2];
        acc[3] += a[k + 3] * b[k + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for k in 4 * chunks..a.len() {
        s += a[k] * b[k];
    }
    s
}

#[inline]
pub(crate) fn axpy_slice(y: &mut [f64], alpha: f64, x: &[f64]) {
    debug_assert_eq!(y.len(), x.len());
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Symmetric matrix holding only its upper triangle, packed column by column.
///
/// Entry `(i, j)` with `i <= j` lives at `j(j+1)/2 + i`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    packed: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "symmetric matrix dimension must be positive");
        Self {
            dim,
            packed: vec![0.0; dim * (dim + 1) / 2],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut s = Self::zeros(dim);
        for i in 0..dim {
            s.set(i, i, 1.0);
        }
        s
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut s = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            s.set(i, i, d);
        }
        s
    }

    /// Builds from a function evaluated on the upper triangle (`i <= j`).
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut s = Self::zeros(dim);
        for j in 0..dim {
            for i in 0..=j {
                s.packed[Self::index(i, j)] = f(i, j);
            }
        }
        s
    }

    /// Symmetric part `(M + Mᵀ)/2` of a square matrix.
    pub fn from_dense_sym_part(m: &DenseMatrix) -> Self {
        assert_eq!(m.rows(), m.cols(), "symmetric part of a non-square matrix");
        Self::from_fn(m.rows(), |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
    }

    pub fn from_packed(dim: usize, packed: Vec<f64>) -> Result<Self> {
        if packed.len() != dim * (dim + 1) / 2 || dim == 0 {
            return Err(Error::InvalidArgument("packed length does not match dimension".into()));
        }
        Ok(Self { dim, packed })
    }

    #[inline]
    fn index(i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        j * (j + 1) / 2 + i
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of free coordinates, `dim(dim+1)/2`.
    #[inline]
    pub fn packed_len(&self) -> usize {
        self.packed.len()
    }

    #[inline]
    pub fn packed(&self) -> &[f64] {
        &self.packed
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.packed[Self::index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.packed[Self::index(i, j)] = v;
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }

    /// Coordinates in an orthonormal basis of the symmetric matrices:
    /// diagonal entries as is, off-diagonal entries scaled by √2.
    pub fn to_scaled_vec(&self) -> Vec<f64> {
        let mut v = self.packed.clone();
        for j in 0..self.dim {
            for i in 0..j {
                v[Self::index(i, j)] *= core::f64::consts::SQRT_2;
            }
        }
        v
    }

    pub fn from_scaled_vec(dim: usize, v: &[f64]) -> Self {
        assert_eq!(v.len(), dim * (dim + 1) / 2);
        let mut s = Self {
            dim,
            packed: v.to_vec(),
        };
        for j in 0..dim {
            for i in 0..j {
                s.packed[Self::index(i, j)] *= core::f64::consts::FRAC_1_SQRT_2;
            }
        }
        s
    }

    /// Basis element `k` of the orthonormal basis used by
    /// [`to_scaled_vec`](Self::to_scaled_vec).
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut e = vec![0.0; dim * (dim + 1) / 2];
        e[k] = 1.0;
        Self::from_scaled_vec(dim, &e)
    }

    /// Matrix inner product `tr(self · other)`.
    pub fn dot(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        let mut s = 0.0;
        for j in 0..self.dim {
            for i in 0..=j {
                let k = Self::index(i, j);
                let w = if i == j { 1.0 } else { 2.0 };
                s += w * self.packed[k] * other.packed[k];
            }
        }
        s
    }

    pub fn frob_norm(&self) -> f64 {
        libm::sqrt(self.dot(self))
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            dim: self.dim,
            packed: self.packed.iter().map(|v| alpha * v).collect(),
        }
    }

    /// `self += alpha · other`.
    pub fn axpy(&mut self, alpha: f64, other: &Self) {
        assert_eq!(self.dim, other.dim);
        axpy_slice(&mut self.packed, alpha, &other.packed);
    }
}

impl Add for &SymMatrix {
    type Output = SymMatrix;

    fn add(self, rhs: &SymMatrix) -> SymMatrix {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl Sub for &SymMatrix {
    type Output = SymMatrix;

    fn sub(self, rhs: &SymMatrix) -> SymMatrix {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}
