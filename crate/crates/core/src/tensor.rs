//! Dense complex matrices and the few operations the channel code needs.
//!
//! Storage is row-major `Complex64`. Dimensions stay small (a few hundred
//! at most), so everything is dense and allocation is per result.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math;

/// Tolerance used when a matrix is flagged Hermitian at construction.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Hermiticity tolerance accepted by the eigensolver.
pub const EIGEN_HERMITIAN_TOL: f64 = 1e-10;
/// Most negative eigenvalue a density matrix may carry.
pub const PSD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

/// Which tensor factor a partial trace removes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    First,
    Second,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn diag(values: &[Complex64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(*v, 0.0);
        }
        m
    }

    /// `|u⟩⟨v|`.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    /// `|v⟩⟨v|`.
    pub fn projector(v: &[Complex64]) -> Self {
        Self::outer(v, v)
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

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Entrywise max-norm of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// `‖A − A†‖_max`.
    pub fn hermiticity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() <= tol
    }

    /// `⟨u|A|v⟩`.
    pub fn sandwich(&self, u: &[Complex64], v: &[Complex64]) -> Result<Complex64> {
        if u.len() != self.rows {
            return Err(Error::Dimension { expected: self.rows, got: u.len() });
        }
        if v.len() != self.cols {
            return Err(Error::Dimension { expected: self.cols, got: v.len() });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.rows {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..self.cols {
                row += self[(i, j)] * v[j];
            }
            acc += u[i].conj() * row;
        }
        Ok(acc)
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension { expected: self.cols, got: rhs.rows });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        Ok(out)
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows {
            return Err(Error::Dimension { expected: self.rows, got: other.rows });
        }
        if self.cols != other.cols {
            return Err(Error::Dimension { expected: self.cols, got: other.cols });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("shape mismatch in mul")
    }
}

/// Kronecker product; entry `[(i1,i2),(j1,j2)] = a[i1,j1]·b[i2,j2]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i1 in 0..a.rows {
        for j1 in 0..a.cols {
            let x = a[(i1, j1)];
            if x == Complex64::new(0.0, 0.0) {
                continue;
            }
            for i2 in 0..b.rows {
                for j2 in 0..b.cols {
                    out[(i1 * b.rows + i2, j1 * b.cols + j2)] = x * b[(i2, j2)];
                }
            }
        }
    }
    out
}

/// Partial trace of a square matrix on `d_first ⊗ d_second`, removing the
/// `traced` factor.
pub fn partial_trace(
    m: &ComplexMatrix,
    (d_first, d_second): (usize, usize),
    traced: Factor,
) -> Result<ComplexMatrix> {
    let n = d_first * d_second;
    if !m.is_square() || m.rows() != n {
        return Err(Error::Dimension { expected: n, got: m.rows() });
    }
    let out = match traced {
        Factor::Second => ComplexMatrix::from_fn(d_first, d_first, |a, b| {
            (0..d_second).map(|k| m[(a * d_second + k, b * d_second + k)]).sum()
        }),
        Factor::First => ComplexMatrix::from_fn(d_second, d_second, |a, b| {
            (0..d_first).map(|k| m[(k * d_second + a, k * d_second + b)]).sum()
        }),
    };
    Ok(out)
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// The complex matrix `A = X + iY` is mapped to the real symmetric
/// `[[X, −Y], [Y, X]]`, whose spectrum is that of `A` with every value
/// doubled, and diagonalized by cyclic Jacobi rotations.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::Dimension { expected: m.rows(), got: m.cols() });
    }
    let residual = m.hermiticity_residual();
    if residual > EIGEN_HERMITIAN_TOL * m.max_abs().max(1.0) {
        return Err(Error::Hermiticity { residual });
    }
    let n = m.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let dim = 2 * n;
    let mut a = vec![0.0; dim * dim];
    for i in 0..n {
        for j in 0..n {
            // Symmetrize so rounding in the input cannot bias the result.
            let z = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            a[i * dim + j] = z.re;
            a[(i + n) * dim + (j + n)] = z.re;
            a[i * dim + (j + n)] = -z.im;
            a[(i + n) * dim + j] = z.im;
        }
    }
    let mut all = jacobi_eigenvalues(&mut a, dim);
    all.sort_by(f64::total_cmp);
    Ok(all.into_iter().step_by(2).collect())
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    let eig = hermitian_eigenvalues(m)?;
    Ok(eig.first().copied().unwrap_or(0.0))
}

fn jacobi_eigenvalues(a: &mut [f64], n: usize) -> Vec<f64> {
    const MAX_SWEEPS: usize = 100;
    let total: f64 = a.iter().map(|x| x * x).sum();
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off <= (f64::EPSILON * f64::EPSILON) * total * 1e-4 || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(a, n, p, q);
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}

fn rotate(a: &mut [f64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    if apq == 0.0 {
        return;
    }
    let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
    let t = if theta >= 0.0 {
        1.0 / (theta + math::sqrt(theta * theta + 1.0))
    } else {
        -1.0 / (-theta + math::sqrt(theta * theta + 1.0))
    };
    let c = 1.0 / math::sqrt(t * t + 1.0);
    let s = t * c;
    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = c * akp - s * akq;
        a[k * n + q] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = c * apk - s * aqk;
        a[q * n + k] = s * apk + c * aqk;
    }
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;
}

/// A Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Dimension { expected: matrix.rows(), got: matrix.cols() });
        }
        let residual = matrix.hermiticity_residual();
        if residual > HERMITIAN_TOL {
            return Err(Error::Hermiticity { residual });
        }
        if (matrix.trace() - Complex64::new(1.0, 0.0)).norm() > HERMITIAN_TOL {
            return Err(Error::InvalidState("trace differs from 1"));
        }
        if min_eigenvalue(&matrix)? < -PSD_TOL {
            return Err(Error::InvalidState("negative eigenvalue"));
        }
        Ok(Self { matrix })
    }

    /// `|v⟩⟨v| / ⟨v|v⟩`.
    pub fn pure(v: &[Complex64]) -> Result<Self> {
        let norm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq == 0.0 || !norm_sq.is_finite() {
            return Err(Error::InvalidState("zero or non-finite state vector"));
        }
        let scale = 1.0 / math::sqrt(norm_sq);
        let unit: Vec<Complex64> = v.iter().map(|z| z * scale).collect();
        Ok(Self { matrix: ComplexMatrix::projector(&unit) })
    }

    /// Normalized Gram matrix `G G† / Tr(G G†)`; positive by construction.
    pub fn from_gram(g: &ComplexMatrix) -> Result<Self> {
        let mut rho = g.matmul(&g.adjoint())?;
        let tr = rho.trace().re;
        if tr <= 0.0 {
            return Err(Error::InvalidState("zero Gram matrix"));
        }
        rho = rho.scale(Complex64::new(1.0 / tr, 0.0));
        // Remove the anti-Hermitian rounding left by the product.
        let sym = &rho + &rho.adjoint();
        Ok(Self { matrix: sym.scale(Complex64::new(0.5, 0.0)) })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn sigma_z() -> ComplexMatrix {
        ComplexMatrix::diag_real(&[1.0, -1.0])
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let out = kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2));
        assert_eq!(out, ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_of_basis_projectors() {
        let out = kron(&ComplexMatrix::diag_real(&[1.0, 0.0]), &ComplexMatrix::diag_real(&[0.0, 1.0]));
        assert_eq!(out, ComplexMatrix::diag_real(&[0.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn kron_sigma_z_spectrum() {
        let zz = kron(&sigma_z(), &sigma_z());
        let eig = hermitian_eigenvalues(&zz).unwrap();
        let expected = [-1.0, -1.0, 1.0, 1.0];
        for (e, x) in eig.iter().zip(expected) {
            assert!((e - x).abs() < 1e-14);
        }
    }

    #[test]
    fn partial_trace_of_identity() {
        let out = partial_trace(&ComplexMatrix::identity(4), (2, 2), Factor::Second).unwrap();
        assert_eq!(out, ComplexMatrix::diag_real(&[2.0, 2.0]));
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let err = partial_trace(&ComplexMatrix::identity(4), (2, 3), Factor::First).unwrap_err();
        assert!(matches!(err, Error::Dimension { expected: 6, got: 4 }));
    }

    #[test]
    fn partial_trace_of_bell_projector() {
        let s = 1.0 / libm::sqrt(2.0);
        let bell = [c(s), c(0.0), c(0.0), c(s)];
        let p = ComplexMatrix::projector(&bell);
        let half = ComplexMatrix::diag_real(&[0.5, 0.5]);
        for side in [Factor::First, Factor::Second] {
            let r = partial_trace(&p, (2, 2), side).unwrap();
            assert!(r.max_abs_diff(&half).unwrap() < 1e-15);
        }
    }

    #[test]
    fn min_eigenvalue_examples() {
        assert!((min_eigenvalue(&ComplexMatrix::identity(3)).unwrap() - 1.0).abs() < 1e-14);
        assert!((min_eigenvalue(&ComplexMatrix::diag_real(&[2.0, -1.0])).unwrap() + 1.0).abs() < 1e-14);
        let v = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        assert!(min_eigenvalue(&ComplexMatrix::projector(&v)).unwrap().abs() < 1e-12);
    }

    #[test]
    fn min_eigenvalue_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(min_eigenvalue(&m), Err(Error::Hermiticity { .. })));
    }

    #[test]
    fn complex_hermitian_spectrum() {
        // σ_y has eigenvalues ±1.
        let sy = ComplexMatrix::from_vec(
            2,
            2,
            alloc::vec![c(0.0), Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0), c(0.0)],
        )
        .unwrap();
        let eig = hermitian_eigenvalues(&sy).unwrap();
        assert!((eig[0] + 1.0).abs() < 1e-14 && (eig[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(ComplexMatrix::diag_real(&[0.5, 0.5])).is_ok());
        assert!(DensityMatrix::new(ComplexMatrix::diag_real(&[0.7, 0.5])).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::diag_real(&[1.2, -0.2])).is_err());
        let pure = DensityMatrix::pure(&[c(1.0), c(1.0)]).unwrap();
        assert!((pure.matrix()[(0, 1)].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn from_vec_checks_length() {
        assert!(ComplexMatrix::from_vec(2, 2, alloc::vec![c(1.0); 3]).is_err());
    }
}
