//! Dense complex linear algebra and the string-diagram primitives.
//!
//! Every diagram in this crate is compiled down to a [`DenseMatrix`]: a morphism
//! `V -> W` between based Hilbert spaces is a `dim(W) x dim(V)` matrix, tensor
//! product is the Kronecker product (left factor most significant), and the
//! self-duality of each space uses the computational basis.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen::hermitian_eigenvalues;
use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Which norm a residual is measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    #[default]
    MaxAbs,
    Operator,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub epsilon: f64,
    pub norm: NormKind,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            epsilon: 1e-10,
            norm: NormKind::MaxAbs,
        }
    }
}

impl Tolerance {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0) {
            return Err(Error::InvalidTolerance(epsilon));
        }
        Ok(Tolerance {
            epsilon,
            norm: NormKind::MaxAbs,
        })
    }

    pub fn with_norm(self, norm: NormKind) -> Self {
        Tolerance { norm, ..self }
    }

    pub fn norm_of(&self, m: &DenseMatrix) -> f64 {
        match self.norm {
            NormKind::MaxAbs => m.max_abs(),
            NormKind::Operator => m.operator_norm(),
        }
    }

    pub fn accepts(&self, residual: f64) -> bool {
        residual <= self.epsilon
    }
}

#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:>9.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "matrix entries",
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Ragged);
        }
        Ok(Self::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0)))
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Ragged);
        }
        Ok(Self::from_fn(r, c, |i, j| rows[i][j]))
    }

    /// Column vector `n x 1`.
    pub fn column(v: &[C64]) -> Self {
        DenseMatrix {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    pub fn diagonal(d: &[C64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &z) in d.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn scalar(z: C64) -> Self {
        DenseMatrix {
            rows: 1,
            cols: 1,
            data: vec![z],
        }
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

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<C64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn conj(&self) -> Self {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, z: C64) -> Self {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&w| w * z).collect(),
        }
    }

    pub fn scale_re(&self, x: f64) -> Self {
        self.scale(C64::new(x, 0.0))
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                context: "matrix product",
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Composition `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.matmul(other)
    }

    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                context: "matrix-vector product",
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn trace(&self) -> Result<C64> {
        if !self.is_square() {
            return Err(Error::NotSquare(self.rows, self.cols));
        }
        Ok((0..self.rows).map(|i| self[(i, i)]).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest singular value, from the spectrum of `A†A`.
    pub fn operator_norm(&self) -> f64 {
        if self.data.is_empty() {
            return 0.0;
        }
        let gram = if self.rows >= self.cols {
            self.dagger().matmul(self).expect("gram shape")
        } else {
            self.matmul(&self.dagger()).expect("gram shape")
        };
        let evals = hermitian_eigenvalues(&gram).expect("gram is square");
        evals.into_iter().fold(0.0, f64::max).max(0.0).sqrt()
    }

    pub fn hermitian_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self, tol: &Tolerance) -> bool {
        self.is_square()
            && (self.dagger().matmul(self).expect("square") - DenseMatrix::identity(self.rows))
                .max_abs()
                <= tol.epsilon
    }

    pub fn max_abs_diff(&self, other: &DenseMatrix) -> Result<f64> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Row-major flattening, `|i⟩⊗|j⟩ ↦ M[i][j]`.
    pub fn vectorize(&self) -> Vec<C64> {
        self.data.clone()
    }

    pub fn unvectorize(v: &[C64], rows: usize, cols: usize) -> Result<DenseMatrix> {
        DenseMatrix::from_vec(rows, cols, v.to_vec())
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl Add for DenseMatrix {
    type Output = DenseMatrix;
    fn add(self, rhs: DenseMatrix) -> DenseMatrix {
        &self + &rhs
    }
}

impl Add for &DenseMatrix {
    type Output = DenseMatrix;
    fn add(self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix sum shape");
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for DenseMatrix {
    type Output = DenseMatrix;
    fn sub(self, rhs: DenseMatrix) -> DenseMatrix {
        &self - &rhs
    }
}

impl Sub for &DenseMatrix {
    type Output = DenseMatrix;
    fn sub(self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix difference shape");
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for DenseMatrix {
    type Output = DenseMatrix;
    fn neg(self) -> DenseMatrix {
        self.scale_re(-1.0)
    }
}

impl Mul for &DenseMatrix {
    type Output = DenseMatrix;
    fn mul(self, rhs: &DenseMatrix) -> DenseMatrix {
        self.matmul(rhs).expect("matrix product shape")
    }
}

/// Kronecker product `a ⊗ b`.
pub fn tensor(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = DenseMatrix::zeros(rows, cols);
    for ar in 0..a.rows {
        for ac in 0..a.cols {
            let x = a[(ar, ac)];
            if x == ZERO {
                continue;
            }
            for br in 0..b.rows {
                let row = ar * b.rows + br;
                for bc in 0..b.cols {
                    out.data[row * cols + ac * b.cols + bc] = x * b[(br, bc)];
                }
            }
        }
    }
    out
}

pub fn tensor_all(factors: &[&DenseMatrix]) -> DenseMatrix {
    factors
        .iter()
        .fold(DenseMatrix::identity(1), |acc, f| tensor(&acc, f))
}

pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push(x * y);
        }
    }
    out
}

pub fn dagger(a: &DenseMatrix) -> DenseMatrix {
    a.dagger()
}

/// `Σ_i e_i ⊗ e_i` as a `d² x 1` column.
pub fn cup(d: usize) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(d * d, 1);
    for i in 0..d {
        m[(i * d + i, 0)] = ONE;
    }
    m
}

pub fn cap(d: usize) -> DenseMatrix {
    cup(d).dagger()
}

/// Swap `V1 ⊗ V2 -> V2 ⊗ V1`.
pub fn swap(d1: usize, d2: usize) -> DenseMatrix {
    let n = d1 * d2;
    let mut m = DenseMatrix::zeros(n, n);
    for i in 0..d1 {
        for j in 0..d2 {
            m[(j * d1 + i, i * d2 + j)] = ONE;
        }
    }
    m
}

pub fn trace(a: &DenseMatrix) -> Result<C64> {
    a.trace()
}

/// Which tensor factor `partial_trace` removes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    First,
    Second,
}

/// Trace out one factor of an operator on `C^d1 ⊗ C^d2`.
pub fn partial_trace(a: &DenseMatrix, d1: usize, d2: usize, which: Factor) -> Result<DenseMatrix> {
    if !a.is_square() {
        return Err(Error::NotSquare(a.rows, a.cols));
    }
    if a.rows != d1 * d2 {
        return Err(Error::DimensionMismatch {
            context: "partial trace",
            expected: d1 * d2,
            found: a.rows,
        });
    }
    Ok(match which {
        Factor::Second => DenseMatrix::from_fn(d1, d1, |i, k| {
            (0..d2).map(|j| a[(i * d2 + j, k * d2 + j)]).sum()
        }),
        Factor::First => DenseMatrix::from_fn(d2, d2, |j, l| {
            (0..d1).map(|i| a[(i * d2 + j, i * d2 + l)]).sum()
        }),
    })
}

/// Outcome of a positive-semidefiniteness test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsdReport {
    pub psd: bool,
    pub min_eigenvalue: f64,
    pub hermitian_residual: f64,
    pub scale: f64,
}

/// Positive-semidefiniteness with the minimum eigenvalue as witness.
///
/// Accepts when the matrix is Hermitian to within `tol.epsilon * scale` and the
/// smallest eigenvalue is at least `-tol.epsilon * scale`, where `scale` is the
/// spectral radius (at least 1 for matrices of tiny norm).
pub fn is_psd(a: &DenseMatrix, tol: &Tolerance) -> Result<PsdReport> {
    if !a.is_square() {
        return Err(Error::NotSquare(a.rows, a.cols));
    }
    let herm = a.hermitian_residual();
    // Eigenvalues of the Hermitian part; a non-Hermitian input is rejected below anyway.
    let sym = (a + &a.dagger()).scale_re(0.5);
    let evals = hermitian_eigenvalues(&sym)?;
    let min = evals.iter().copied().fold(f64::INFINITY, f64::min);
    let radius = evals.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let scale = radius.max(1.0);
    let psd = herm <= tol.epsilon * scale && min >= -tol.epsilon * scale;
    Ok(PsdReport {
        psd,
        min_eigenvalue: if evals.is_empty() { 0.0 } else { min },
        hermitian_residual: herm,
        scale,
    })
}

/// Dimension of the nullspace of `a`, counted from the spectrum of `a†a`.
pub fn nullity(a: &DenseMatrix, rel_tol: f64) -> usize {
    let gram = a.dagger().matmul(a).expect("gram");
    let evals = hermitian_eigenvalues(&gram).expect("square");
    let top = evals.iter().copied().fold(0.0, f64::max).max(1.0);
    evals.iter().filter(|&&x| x <= rel_tol * top).count()
}
