//! Dense complex linear algebra used by the block-diagonalization solver.
//!
//! Matrices are stored column-major, so [`vec`] is a plain copy of the
//! storage and [`unvec`] its exact inverse.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense complex matrix with column-major storage.
#[derive(Clone, PartialEq)]
pub struct ComplexDenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

/// Dense complex column vector.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexVector(Vec<Complex64>);

impl ComplexDenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from column-major storage.
    pub fn from_column_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from a list of rows. All rows must have equal length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let ncols = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != ncols) {
            return Err(Error::DimensionMismatch(format!(
                "row {i} has {} entries, expected {ncols}",
                r.len()
            )));
        }
        Ok(Self::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
    }

    /// Builds a real matrix from a list of rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    /// Square matrix with `diag` on the diagonal.
    pub fn diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { ZERO })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[ComplexVector]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.dim() != rows {
                return Err(Error::DimensionMismatch(format!(
                    "column {j} has length {}, expected {rows}",
                    c.dim()
                )));
            }
            data.extend_from_slice(c.as_slice());
        }
        Ok(Self {
            rows,
            cols: columns.len(),
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Column-major view of the entries.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        self.data[j * self.rows + i]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        self.data[j * self.rows + i] = value;
    }

    pub fn column(&self, j: usize) -> &[Complex64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    fn column_mut(&mut self, j: usize) -> &mut [Complex64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn row(&self, i: usize) -> Vec<Complex64> {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Columns `start..start+len` as a new matrix.
    pub fn columns(&self, start: usize, len: usize) -> Self {
        assert!(start + len <= self.cols, "column range out of bounds");
        Self {
            rows: self.rows,
            cols: len,
            data: self.data[start * self.rows..(start + len) * self.rows].to_vec(),
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for j in 0..rhs.cols {
            let dst = &mut out.data[j * self.rows..(j + 1) * self.rows];
            for k in 0..self.cols {
                let b = rhs.data[j * rhs.rows + k];
                if b == ZERO {
                    continue;
                }
                for (d, a) in dst.iter_mut().zip(self.column(k)) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &ComplexVector) -> Result<ComplexVector> {
        if self.cols != x.dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot apply {}x{} matrix to vector of length {}",
                self.rows,
                self.cols,
                x.dim()
            )));
        }
        let mut out = vec![ZERO; self.rows];
        for (k, b) in x.0.iter().enumerate() {
            for (d, a) in out.iter_mut().zip(self.column(k)) {
                *d += a * b;
            }
        }
        Ok(ComplexVector(out))
    }

    fn zip_with(&self, rhs: &Self, op: &str, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(Error::DimensionMismatch(format!(
                "cannot {op} {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, "add", |a, b| a + b)
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, "subtract", |a, b| a - b)
    }

    /// Vertical concatenation (same column count).
    pub fn vstack(blocks: &[Self]) -> Result<Self> {
        let cols = blocks.first().map_or(0, |b| b.cols);
        if blocks.iter().any(|b| b.cols != cols) {
            return Err(Error::DimensionMismatch("vstack requires equal column counts".into()));
        }
        let rows: usize = blocks.iter().map(|b| b.rows).sum();
        let mut out = Self::zeros(rows, cols);
        let mut offset = 0;
        for b in blocks {
            for j in 0..cols {
                out.column_mut(j)[offset..offset + b.rows].copy_from_slice(b.column(j));
            }
            offset += b.rows;
        }
        Ok(out)
    }

    /// Horizontal concatenation (same row count).
    pub fn hstack(blocks: &[Self]) -> Result<Self> {
        let rows = blocks.first().map_or(0, |b| b.rows);
        if blocks.iter().any(|b| b.rows != rows) {
            return Err(Error::DimensionMismatch("hstack requires equal row counts".into()));
        }
        let cols = blocks.iter().map(|b| b.cols).sum();
        let data = blocks.iter().flat_map(|b| b.data.iter().copied()).collect();
        Ok(Self { rows, cols, data })
    }

    /// Block-diagonal direct sum of square or rectangular blocks.
    pub fn direct_sum(blocks: &[&Self]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for j in 0..b.cols {
                out.column_mut(c0 + j)[r0..r0 + b.rows].copy_from_slice(b.column(j));
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }
}

impl fmt::Debug for ComplexDenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexDenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, " ")?;
            for j in 0..self.cols {
                let z = self.get(i, j);
                write!(f, " {:+.4}{:+.4}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<'a> Mul<&'a ComplexDenseMatrix> for &'a ComplexDenseMatrix {
    type Output = ComplexDenseMatrix;

    fn mul(self, rhs: &'a ComplexDenseMatrix) -> ComplexDenseMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl<'a> Add<&'a ComplexDenseMatrix> for &'a ComplexDenseMatrix {
    type Output = ComplexDenseMatrix;

    fn add(self, rhs: &'a ComplexDenseMatrix) -> ComplexDenseMatrix {
        self.try_add(rhs).expect("matrix sum shape mismatch")
    }
}

impl<'a> Sub<&'a ComplexDenseMatrix> for &'a ComplexDenseMatrix {
    type Output = ComplexDenseMatrix;

    fn sub(self, rhs: &'a ComplexDenseMatrix) -> ComplexDenseMatrix {
        self.try_sub(rhs).expect("matrix difference shape mismatch")
    }
}

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Self {
        Self(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![ZERO; dim])
    }

    pub fn from_real(entries: &[f64]) -> Self {
        Self(entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Hermitian inner product `<self, other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "inner product length mismatch");
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(self.0.iter().map(|z| z * s).collect())
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            self.clone()
        } else {
            self.scale(Complex64::new(1.0 / n, 0.0))
        }
    }
}

impl From<Vec<Complex64>> for ComplexVector {
    fn from(v: Vec<Complex64>) -> Self {
        Self(v)
    }
}

/// Kronecker product: block `(i, j)` of the result is `a[i, j] * b`.
pub fn kron(a: &ComplexDenseMatrix, b: &ComplexDenseMatrix) -> ComplexDenseMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = ComplexDenseMatrix::zeros(ar * br, ac * bc);
    for ja in 0..ac {
        for jb in 0..bc {
            let col = out.column_mut(ja * bc + jb);
            for ia in 0..ar {
                let s = a.get(ia, ja);
                if s == ZERO {
                    continue;
                }
                for (dst, src) in col[ia * br..(ia + 1) * br].iter_mut().zip(b.column(jb)) {
                    *dst = s * src;
                }
            }
        }
    }
    out
}

/// Stacks the columns of `a` on top of each other.
pub fn vec(a: &ComplexDenseMatrix) -> ComplexVector {
    ComplexVector(a.data.clone())
}

/// Inverse of [`vec`]: consecutive chunks of `leading_dim` entries become columns.
pub fn unvec(w: &ComplexVector, leading_dim: usize) -> Result<ComplexDenseMatrix> {
    if leading_dim == 0 || !w.dim().is_multiple_of(leading_dim) {
        return Err(Error::NotDivisible {
            len: w.dim(),
            leading_dim,
        });
    }
    Ok(ComplexDenseMatrix {
        rows: leading_dim,
        cols: w.dim() / leading_dim,
        data: w.0.clone(),
    })
}

pub fn dagger(a: &ComplexDenseMatrix) -> ComplexDenseMatrix {
    a.dagger()
}

/// Max-norm distance of `a^H a` from the identity, or `None` if `a` is not square.
pub fn unitarity_residual(a: &ComplexDenseMatrix) -> Option<f64> {
    if !a.is_square() {
        return None;
    }
    let gram = gram(a);
    Some(max_dev_from_identity(&gram))
}

pub fn is_unitary(a: &ComplexDenseMatrix, tol: f64) -> bool {
    unitarity_residual(a).is_some_and(|r| r <= tol)
}

/// `a^H a` without materializing the adjoint.
pub fn gram(a: &ComplexDenseMatrix) -> ComplexDenseMatrix {
    let n = a.cols;
    let mut g = ComplexDenseMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..=j {
            let z: Complex64 = a.column(i).iter().zip(a.column(j)).map(|(x, y)| x.conj() * y).sum();
            g.set(i, j, z);
            g.set(j, i, z.conj());
        }
    }
    g
}

pub(crate) fn max_dev_from_identity(a: &ComplexDenseMatrix) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..a.cols {
        for i in 0..a.rows {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((a.get(i, j) - target).norm());
        }
    }
    worst
}

/// Result of a one-sided Jacobi singular value decomposition `a v = u diag(s)`.
#[derive(Clone, Debug)]
pub struct JacobiSvd {
    /// Singular values in the column order of `v` (not sorted).
    pub singular_values: Vec<f64>,
    /// Unitary `n x n` matrix of right singular vectors.
    pub v: ComplexDenseMatrix,
}

impl JacobiSvd {
    pub fn max_singular_value(&self) -> f64 {
        self.singular_values.iter().copied().fold(0.0, f64::max)
    }

    /// Right singular vectors whose singular value is at most `cutoff`.
    pub fn null_vectors(&self, cutoff: f64) -> Vec<ComplexVector> {
        self.singular_values
            .iter()
            .enumerate()
            .filter(|(_, &s)| s <= cutoff)
            .map(|(j, _)| ComplexVector(self.v.column(j).to_vec()))
            .collect()
    }
}

const JACOBI_MAX_SWEEPS: usize = 80;

/// One-sided (Hestenes) Jacobi SVD.
///
/// Plane rotations are applied from the right until all column pairs of
/// `a v` are mutually orthogonal. The accumulated `v` stays unitary to
/// working precision, which is what the nullspace extraction relies on.
/// Works for any shape; for `rows < cols` at least `cols - rows` columns
/// are driven to zero.
pub fn jacobi_svd(a: &ComplexDenseMatrix) -> JacobiSvd {
    let n = a.cols;
    let mut u = a.clone();
    let mut v = ComplexDenseMatrix::identity(n);
    let eps = f64::EPSILON;
    // columns below this squared norm are already numerically zero
    let negligible = (eps * a.frobenius_norm()).powi(2);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = u.column(p).iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = u.column(q).iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = u.column(p).iter().zip(u.column(q)).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if alpha <= negligible || beta <= negligible || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let phase = phase / phase.norm();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_columns(&mut u, p, q, c, s, phase);
                rotate_columns(&mut v, p, q, c, s, phase);
            }
        }
        if !rotated {
            break;
        }
    }

    let singular_values = (0..n)
        .map(|j| u.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    JacobiSvd { singular_values, v }
}

// (x_p, x_q) <- (c x_p - s conj(phase) x_q, s x_p + c conj(phase) x_q)
fn rotate_columns(m: &mut ComplexDenseMatrix, p: usize, q: usize, c: f64, s: f64, phase: Complex64) {
    let rows = m.rows;
    let ph = phase.conj();
    let (head, tail) = m.data.split_at_mut(q * rows);
    let cp = &mut head[p * rows..(p + 1) * rows];
    let cq = &mut tail[..rows];
    for (xp, xq) in cp.iter_mut().zip(cq.iter_mut()) {
        let a = *xp;
        let b = *xq * ph;
        *xp = a * c - b * s;
        *xq = a * s + b * c;
    }
}

/// Orthonormal basis of `{x : m x = 0}`.
///
/// Singular values `<= tol * sigma_max` count as zero. A zero matrix has a
/// full kernel.
pub fn orthonormal_nullspace(m: &ComplexDenseMatrix, tol: f64) -> Vec<ComplexVector> {
    let svd = jacobi_svd(m);
    let cutoff = tol * svd.max_singular_value();
    svd.null_vectors(cutoff)
}

/// Like [`orthonormal_nullspace`], but with an absolute singular-value cutoff.
pub fn nullspace_below(m: &ComplexDenseMatrix, cutoff: f64) -> Vec<ComplexVector> {
    jacobi_svd(m).null_vectors(cutoff)
}

/// Orthogonal projector `q q^H` for a matrix `q` with orthonormal columns.
pub fn projector(q: &ComplexDenseMatrix) -> ComplexDenseMatrix {
    q * &q.dagger()
}

/// Max-norm distance between the projectors onto the column spans of two
/// matrices with orthonormal columns.
pub fn projector_distance(a: &ComplexDenseMatrix, b: &ComplexDenseMatrix) -> Result<f64> {
    if a.rows != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "projector distance between spaces of dimension {} and {}",
            a.rows, b.rows
        )));
    }
    Ok((&projector(a) - &projector(b)).max_norm())
}

/// Orthonormalizes the columns of `a` by modified Gram-Schmidt, dropping
/// columns whose remaining norm falls below `drop_tol`.
pub fn orthonormalize_columns(a: &ComplexDenseMatrix, drop_tol: f64) -> ComplexDenseMatrix {
    let mut basis: Vec<ComplexVector> = Vec::new();
    for j in 0..a.cols {
        let mut x = ComplexVector(a.column(j).to_vec());
        for _ in 0..2 {
            for b in &basis {
                let c = b.inner(&x);
                for (xi, bi) in x.0.iter_mut().zip(&b.0) {
                    *xi -= c * bi;
                }
            }
        }
        let n = x.norm();
        if n > drop_tol {
            basis.push(x.scale(Complex64::new(1.0 / n, 0.0)));
        }
    }
    ComplexDenseMatrix::from_columns(a.rows, &basis).expect("columns share the row count")
}
