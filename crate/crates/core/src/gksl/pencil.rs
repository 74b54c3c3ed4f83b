// SPDX-License-Identifier: Apache-2.0

//! Convex pencils of GKSL generators and complete-positivity checks.

use super::{Gksl, Picture, Superoperator};
use crate::error::{Error, Result};
use crate::linalg::{hs_norm, min_eigenvalue, real, unvec, CMatrix};
use crate::scalar::{lit, Real};

/// Times at which the semigroup of each pencil member is tested for CP.
pub const CP_TIMES: [f64; 3] = [0.1, 1.0, 10.0];

/// `(1−λ)G₀ + λG₁`: Hamiltonians mix linearly, Lindblad operators are
/// rescaled by `√(1−λ)` and `√λ`; zero-weight operators are dropped.
pub fn convex_combine<T: Real>(g0: &Gksl<T>, g1: &Gksl<T>, lambda: T) -> Result<Gksl<T>> {
    if g0.dim() != g1.dim() {
        return Err(Error::DimensionMismatch { expected: g0.dim(), found: g1.dim() });
    }
    if g0.hbar() != g1.hbar() {
        return Err(Error::InvalidInput(format!("hbar differs: {} vs {}", g0.hbar(), g1.hbar())));
    }
    if !(lambda >= T::zero() && lambda <= T::one()) {
        return Err(Error::InvalidInput(format!("pencil parameter {lambda} outside [0, 1]")));
    }
    let mu = T::one() - lambda;
    let h = g0.hamiltonian() * real(mu) + g1.hamiltonian() * real(lambda);
    let mut ls = Vec::new();
    if mu > T::zero() {
        ls.extend(g0.lindblads().iter().map(|l| l * real(mu.sqrt())));
    }
    if lambda > T::zero() {
        ls.extend(g1.lindblads().iter().map(|l| l * real(lambda.sqrt())));
    }
    Gksl::new(g0.hbar(), h, ls)
}

/// Normalized Choi matrix `(1/d) Σ_ij E_ij ⊗ Φ(E_ij)`; the identity map gives
/// the projector onto the maximally entangled vector.
pub fn choi_matrix<T: Real>(map: &Superoperator<T>) -> CMatrix<T> {
    let d = map.dim;
    let mut out = CMatrix::zeros(d * d, d * d);
    let norm = real(T::one() / lit::<T>(d as f64));
    for i in 0..d {
        for j in 0..d {
            // vec(E_ij) is the unit vector at i + j·d
            let image = unvec(&map.matrix.column(i + j * d).into_owned(), d) * norm;
            out.view_mut((i * d, j * d), (d, d)).copy_from(&image);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CpCheck<T: Real> {
    pub min_eigenvalue: T,
    pub passed: bool,
}

/// `true` iff the Choi matrix has no eigenvalue below `−tol`.
pub fn cp_check<T: Real>(map: &Superoperator<T>, tol: T) -> CpCheck<T> {
    let min = min_eigenvalue(&choi_matrix(map));
    CpCheck { min_eigenvalue: min, passed: min >= -tol }
}

/// Superoperator of `X ↦ Xᵀ`, a positive but not completely positive map.
pub fn transpose_map<T: Real>(d: usize) -> Superoperator<T> {
    let mut m = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            m[(j + i * d, i + j * d)] = real(T::one());
        }
    }
    Superoperator { picture: Picture::Schrodinger, dim: d, matrix: m }
}

/// Checks at one pencil parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct PencilPoint<T: Real> {
    pub lambda: T,
    /// `(t, min Choi eigenvalue)` for each entry of [`CP_TIMES`].
    pub cp: Vec<(T, T)>,
    /// Largest `‖𝓛^{(λ)†}(I_j)‖` over the integrals.
    pub integral_residual: T,
    /// `‖S_λ − (1−λ)S₀ − λS₁‖` in the Schrödinger picture.
    pub affinity_residual: T,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BiLindbladReport<T: Real> {
    pub points: Vec<PencilPoint<T>>,
    pub passed: bool,
}

/// Convex compatibility and common integrals along the pencil.
///
/// `cp_tol` bounds negative Choi eigenvalues, `tol` bounds the integral and
/// affinity residuals.
pub fn bilindblad_check<T: Real>(
    g0: &Gksl<T>,
    g1: &Gksl<T>,
    integrals: &[CMatrix<T>],
    lambdas: &[T],
    tol: T,
    cp_tol: T,
) -> Result<BiLindbladReport<T>> {
    let s0 = g0.to_superoperator(Picture::Schrodinger).matrix;
    let s1 = g1.to_superoperator(Picture::Schrodinger).matrix;
    let mut points = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let g = convex_combine(g0, g1, lambda)?;
        let s = g.to_superoperator(Picture::Schrodinger);
        let mut cp = Vec::with_capacity(CP_TIMES.len());
        let mut cp_ok = true;
        for t in CP_TIMES {
            let check = cp_check(&s.exp(lit(t)), cp_tol);
            cp_ok &= check.passed;
            cp.push((lit(t), check.min_eigenvalue));
        }
        let mut integral_residual = T::zero();
        for a in integrals {
            integral_residual = integral_residual.max(hs_norm(&g.heisenberg_apply(a)?));
        }
        let affine = &s0 * real(T::one() - lambda) + &s1 * real(lambda);
        let affinity_residual = hs_norm(&(&s.matrix - affine));
        let passed = cp_ok && integral_residual < tol && affinity_residual < tol;
        points.push(PencilPoint { lambda, cp, integral_residual, affinity_residual, passed });
    }
    let passed = points.iter().all(|p| p.passed);
    Ok(BiLindbladReport { points, passed })
}
