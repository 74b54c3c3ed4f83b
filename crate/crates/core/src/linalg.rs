// SPDX-License-Identifier: Apache-2.0

//! Dense complex matrices and the column-stacking vectorization.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

pub type CMatrix<T> = DMatrix<Complex<T>>;
pub type CVector<T> = DVector<Complex<T>>;

/// Largest supported Hilbert-space dimension.
pub const MAX_DIM: usize = 64;

#[inline]
pub fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(lit(re), lit(im))
}

#[inline]
pub fn real<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

pub fn identity<T: Real>(d: usize) -> CMatrix<T> {
    CMatrix::identity(d, d)
}

pub fn zeros<T: Real>(d: usize) -> CMatrix<T> {
    CMatrix::zeros(d, d)
}

pub fn pauli_x<T: Real>() -> CMatrix<T> {
    CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
}

pub fn pauli_y<T: Real>() -> CMatrix<T> {
    CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
}

pub fn pauli_z<T: Real>() -> CMatrix<T> {
    CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
}

/// Diagonal matrix from real entries.
pub fn diag<T: Real>(values: &[f64]) -> CMatrix<T> {
    CMatrix::from_diagonal(&CVector::from_iterator(values.len(), values.iter().map(|v| c(*v, 0.0))))
}

pub fn scale<T: Real>(m: &CMatrix<T>, s: T) -> CMatrix<T> {
    m * real(s)
}

pub fn commutator<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    a * b - b * a
}

pub fn anticommutator<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    a * b + b * a
}

/// Hilbert–Schmidt (Frobenius) norm.
pub fn hs_norm<T: Real>(m: &CMatrix<T>) -> T {
    m.norm()
}

/// Operator norm: the largest singular value.
pub fn op_norm<T: Real>(m: &CMatrix<T>) -> T {
    if m.is_empty() {
        return T::zero();
    }
    m.singular_values().iter().copied().fold(T::zero(), |a, b| a.max(b))
}

/// `Tr(A† B)`.
pub fn hs_inner<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Complex<T> {
    a.iter().zip(b.iter()).fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

pub fn hermiticity_residual<T: Real>(m: &CMatrix<T>) -> T {
    (m - m.adjoint()).norm()
}

pub fn is_hermitian<T: Real>(m: &CMatrix<T>, tol: T) -> bool {
    m.is_square() && hermiticity_residual(m) <= tol
}

/// Column-stacking `vec(X)`; `vec(AXB) = (Bᵀ⊗A) vec(X)`.
pub fn vec<T: Real>(m: &CMatrix<T>) -> CVector<T> {
    CVector::from_column_slice(m.as_slice())
}

pub fn unvec<T: Real>(v: &CVector<T>, d: usize) -> CMatrix<T> {
    CMatrix::from_column_slice(d, d, v.as_slice())
}

pub fn kron<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    a.kronecker(b)
}

/// Eigen-decomposition of the Hermitian part `(M + M†)/2`, ascending.
pub fn hermitian_eigen<T: Real>(m: &CMatrix<T>) -> (Vec<T>, CMatrix<T>) {
    let h = (m + m.adjoint()) * real(lit::<T>(0.5));
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|a, b| eig.eigenvalues[*a].partial_cmp(&eig.eigenvalues[*b]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|i| eig.eigenvalues[*i]).collect();
    let vectors = CMatrix::from_columns(&order.iter().map(|i| eig.eigenvectors.column(*i).into_owned()).collect::<Vec<_>>());
    (values, vectors)
}

pub fn min_eigenvalue<T: Real>(m: &CMatrix<T>) -> T {
    hermitian_eigen(m).0.first().copied().unwrap_or_else(T::zero)
}

pub fn check_square<T: Real>(m: &CMatrix<T>, d: usize) -> Result<()> {
    if m.nrows() != d {
        return Err(Error::DimensionMismatch { expected: d, found: m.nrows() });
    }
    if m.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, found: m.ncols() });
    }
    Ok(())
}

/// Matrix with independent entries uniform in the unit square.
pub fn random_matrix<T: Real, R: Rng>(rng: &mut R, d: usize) -> CMatrix<T> {
    CMatrix::from_fn(d, d, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

pub fn random_hermitian<T: Real, R: Rng>(rng: &mut R, d: usize) -> CMatrix<T> {
    let a = random_matrix::<T, R>(rng, d);
    (&a + a.adjoint()) * real(lit::<T>(0.5))
}

/// Full-rank density matrix `AA†/Tr(AA†)`.
pub fn random_density<T: Real, R: Rng>(rng: &mut R, d: usize) -> CMatrix<T> {
    let a = random_matrix::<T, R>(rng, d);
    let rho = &a * a.adjoint();
    let tr = rho.trace();
    rho / tr
}

/// JSON form of a matrix: dimension and row-major `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixData {
    pub dim: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixData {
    pub fn from_matrix<T: Real>(m: &CMatrix<T>) -> Self {
        let d = m.nrows();
        let mut data = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                data.push([to_f64(m[(i, j)].re), to_f64(m[(i, j)].im)]);
            }
        }
        MatrixData { dim: d, data }
    }

    pub fn to_matrix<T: Real>(&self) -> Result<CMatrix<T>> {
        if self.data.len() != self.dim * self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim * self.dim, found: self.data.len() });
        }
        Ok(CMatrix::from_row_iterator(self.dim, self.dim, self.data.iter().map(|[re, im]| c(*re, *im))))
    }
}
