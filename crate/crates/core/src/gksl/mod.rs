// SPDX-License-Identifier: Apache-2.0

//! Finite-dimensional GKSL generators, their Heisenberg adjoints and the
//! semigroups they generate.

mod pencil;
mod sectors;

use num_complex::Complex;

pub use pencil::{
    bilindblad_check, choi_matrix, convex_combine, cp_check, transpose_map, BiLindbladReport, CpCheck,
    PencilPoint, CP_TIMES,
};
pub use sectors::{
    coherence_trajectory, dephasing_rates, functional_calculus, joint_sectors, CoherenceRow, CoherenceTable,
    Sector, SectorDecomposition, COHERENCE_CSV_HEADER, SECTOR_GAP,
};

use crate::error::{Error, Result};
use crate::linalg::{
    self, anticommutator, check_square, commutator, hs_inner, hs_norm, identity, kron, real, unvec, vec, CMatrix,
    MAX_DIM,
};
use crate::scalar::{lit, Real};

/// Which side of the trace pairing a superoperator acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Picture {
    /// States: `ρ ↦ 𝓛(ρ)`.
    Schrodinger,
    /// Observables: `A ↦ 𝓛†(A)`.
    Heisenberg,
}

/// Matrix acting on column-stacked `d×d` matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator<T: Real> {
    pub picture: Picture,
    pub dim: usize,
    pub matrix: CMatrix<T>,
}

impl<T: Real> Superoperator<T> {
    pub fn apply(&self, x: &CMatrix<T>) -> CMatrix<T> {
        unvec(&(&self.matrix * vec(x)), self.dim)
    }

    /// `e^{tS}`, by Padé scaling and squaring.
    pub fn exp(&self, t: T) -> Superoperator<T> {
        let m = &self.matrix * real(t);
        Superoperator { picture: self.picture, dim: self.dim, matrix: m.exp() }
    }
}

/// `𝓛(ρ) = −(i/ħ)[H,ρ] + Σ_k (L_k ρ L_k† − ½{L_k†L_k, ρ})`.
#[derive(Clone, Debug, PartialEq)]
pub struct Gksl<T: Real> {
    dim: usize,
    hbar: T,
    hamiltonian: CMatrix<T>,
    lindblads: Vec<CMatrix<T>>,
}

/// Hermiticity tolerance for Hamiltonians, relative to `max(1, ‖H‖)`.
pub fn hermitian_tolerance<T: Real>() -> T {
    let eps = T::default_epsilon() * lit::<T>(1e3);
    eps.max(lit(1e-12))
}

impl<T: Real> Gksl<T> {
    pub fn new(hbar: T, hamiltonian: CMatrix<T>, lindblads: Vec<CMatrix<T>>) -> Result<Self> {
        let dim = hamiltonian.nrows();
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidInput(format!("dimension {dim} outside 1..={MAX_DIM}")));
        }
        if !(hbar > T::zero()) {
            return Err(Error::InvalidInput(format!("hbar must be positive, got {hbar}")));
        }
        check_square(&hamiltonian, dim)?;
        for l in &lindblads {
            check_square(l, dim)?;
        }
        let tol = hermitian_tolerance::<T>() * hs_norm(&hamiltonian).max(T::one());
        if !linalg::is_hermitian(&hamiltonian, tol) {
            return Err(Error::NotHermitian("H".into()));
        }
        Ok(Gksl { dim, hbar, hamiltonian, lindblads })
    }

    /// Generator with no Hamiltonian and no dissipation.
    pub fn zero(dim: usize, hbar: T) -> Result<Self> {
        Self::new(hbar, linalg::zeros(dim), Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hbar(&self) -> T {
        self.hbar
    }

    pub fn hamiltonian(&self) -> &CMatrix<T> {
        &self.hamiltonian
    }

    pub fn lindblads(&self) -> &[CMatrix<T>] {
        &self.lindblads
    }

    fn i_over_hbar(&self) -> Complex<T> {
        Complex::new(T::zero(), T::one() / self.hbar)
    }

    pub fn lindblad_apply(&self, rho: &CMatrix<T>) -> Result<CMatrix<T>> {
        check_square(rho, self.dim)?;
        let mut out = commutator(&self.hamiltonian, rho) * (-self.i_over_hbar());
        let half = real(lit::<T>(0.5));
        for l in &self.lindblads {
            let ld = l.adjoint();
            out += l * rho * &ld - anticommutator(&(&ld * l), rho) * half;
        }
        Ok(out)
    }

    pub fn heisenberg_apply(&self, a: &CMatrix<T>) -> Result<CMatrix<T>> {
        check_square(a, self.dim)?;
        let mut out = commutator(&self.hamiltonian, a) * self.i_over_hbar();
        let half = real(lit::<T>(0.5));
        for l in &self.lindblads {
            let ld = l.adjoint();
            out += &ld * a * l - anticommutator(&(&ld * l), a) * half;
        }
        Ok(out)
    }

    /// `|Tr(𝓛(ρ)A) − Tr(ρ𝓛†(A))|`.
    pub fn adjoint_pairing_residual(&self, rho: &CMatrix<T>, a: &CMatrix<T>) -> Result<T> {
        let lhs = (self.lindblad_apply(rho)? * a).trace();
        let rhs = (rho * self.heisenberg_apply(a)?).trace();
        Ok(nalgebra::ComplexField::modulus(lhs - rhs))
    }

    pub fn to_superoperator(&self, picture: Picture) -> Superoperator<T> {
        let d = self.dim;
        let id = identity::<T>(d);
        let h = &self.hamiltonian;
        let ham = kron(&id, h) - kron(&h.transpose(), &id);
        let half = real(lit::<T>(0.5));
        let mut m = match picture {
            Picture::Schrodinger => ham * (-self.i_over_hbar()),
            Picture::Heisenberg => ham * self.i_over_hbar(),
        };
        for l in &self.lindblads {
            let ld = l.adjoint();
            let ldl = &ld * l;
            let jump = match picture {
                Picture::Schrodinger => kron(&l.conjugate(), l),
                Picture::Heisenberg => kron(&l.transpose(), &ld),
            };
            m += jump - (kron(&id, &ldl) + kron(&ldl.transpose(), &id)) * half;
        }
        Superoperator { picture, dim: d, matrix: m }
    }

    fn check_time(t: T) -> Result<()> {
        if t < T::zero() {
            return Err(Error::InvalidInput(format!("evolution time must be nonnegative, got {t}")));
        }
        Ok(())
    }

    /// `e^{t𝓛}(ρ₀)`.
    pub fn evolve(&self, rho0: &CMatrix<T>, t: T) -> Result<CMatrix<T>> {
        Self::check_time(t)?;
        check_square(rho0, self.dim)?;
        Ok(self.to_superoperator(Picture::Schrodinger).exp(t).apply(rho0))
    }

    /// `e^{t𝓛†}(A)`.
    pub fn evolve_heisenberg(&self, a: &CMatrix<T>, t: T) -> Result<CMatrix<T>> {
        Self::check_time(t)?;
        check_square(a, self.dim)?;
        Ok(self.to_superoperator(Picture::Heisenberg).exp(t).apply(a))
    }

    /// Hilbert–Schmidt orthonormal basis of `ker 𝓛†`.
    pub fn kernel_of_adjoint(&self, tol: T) -> Result<Kernel<T>> {
        if !(tol > T::zero()) {
            return Err(Error::InvalidInput("kernel tolerance must be positive".into()));
        }
        let m = self.to_superoperator(Picture::Heisenberg).matrix;
        let svd = m.svd(false, true);
        let v_t = svd.v_t.expect("right singular vectors requested");
        let mut basis = Vec::new();
        let mut largest_null = T::zero();
        let mut smallest_range: Option<T> = None;
        for (i, s) in svd.singular_values.iter().enumerate() {
            if *s < tol {
                basis.push(unvec(&v_t.row(i).adjoint(), self.dim));
                largest_null = largest_null.max(*s);
            } else {
                smallest_range = Some(smallest_range.map_or(*s, |r: T| r.min(*s)));
            }
        }
        Ok(Kernel { basis, largest_null, smallest_range })
    }

    /// Checks `[H,O] = [L_k,O] = [L_k†,O] = 0` within `tol`.
    pub fn commutant_membership(&self, o: &CMatrix<T>, tol: T) -> Result<Membership<T>> {
        check_square(o, self.dim)?;
        let mut max_commutator = hs_norm(&commutator(&self.hamiltonian, o));
        for l in &self.lindblads {
            max_commutator = max_commutator.max(hs_norm(&commutator(l, o)));
            max_commutator = max_commutator.max(hs_norm(&commutator(&l.adjoint(), o)));
        }
        let adjoint_norm = hs_norm(&self.heisenberg_apply(o)?);
        Ok(Membership { member: max_commutator < tol, max_commutator, adjoint_norm })
    }

    /// Checks that the unital algebra generated by `generators` is abelian,
    /// lies in the commutant and is annihilated by `𝓛†`.
    pub fn invariant_algebra_check(&self, generators: &[CMatrix<T>], tol: T) -> Result<InvariantAlgebra<T>> {
        let mut max_commutator = T::zero();
        for (i, a) in generators.iter().enumerate() {
            check_square(a, self.dim)?;
            for b in &generators[i + 1..] {
                max_commutator = max_commutator.max(hs_norm(&commutator(a, b)));
            }
        }
        let mut commutant = true;
        for g in generators {
            commutant &= self.commutant_membership(g, tol)?.member;
        }
        let basis = generated_algebra(self.dim, generators);
        let mut max_residual = T::zero();
        for b in &basis {
            max_residual = max_residual.max(hs_norm(&self.heisenberg_apply(b)?));
        }
        let abelian = max_commutator < tol;
        Ok(InvariantAlgebra {
            dim: basis.len(),
            abelian,
            commutant,
            max_commutator,
            max_residual,
            passed: abelian && commutant && max_residual < tol,
        })
    }
}

/// Null space of `𝓛†` with the singular-value gap around the threshold.
#[derive(Clone, Debug)]
pub struct Kernel<T: Real> {
    pub basis: Vec<CMatrix<T>>,
    pub largest_null: T,
    pub smallest_range: Option<T>,
}

impl<T: Real> Kernel<T> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Distance of `a` from the kernel span, in Hilbert–Schmidt norm.
    pub fn distance(&self, a: &CMatrix<T>) -> T {
        let mut r = a.clone();
        for b in &self.basis {
            r -= b * hs_inner(b, a);
        }
        hs_norm(&r)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Membership<T: Real> {
    pub member: bool,
    pub max_commutator: T,
    /// `‖𝓛†(O)‖`, reported for the closure assertion.
    pub adjoint_norm: T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InvariantAlgebra<T: Real> {
    pub dim: usize,
    pub abelian: bool,
    pub commutant: bool,
    pub max_commutator: T,
    pub max_residual: T,
    pub passed: bool,
}

/// Orthonormal basis of the unital algebra generated by `gens`, grown by
/// products until the span stops increasing.
pub fn generated_algebra<T: Real>(dim: usize, gens: &[CMatrix<T>]) -> Vec<CMatrix<T>> {
    let threshold = lit::<T>(1e-9);
    let mut basis: Vec<CMatrix<T>> = Vec::new();
    let push = |basis: &mut Vec<CMatrix<T>>, m: &CMatrix<T>| -> bool {
        let mut r = m.clone();
        // two Gram–Schmidt passes for stability
        for _ in 0..2 {
            for b in basis.iter() {
                r -= b * hs_inner(b, &r);
            }
        }
        let n = hs_norm(&r);
        if n > threshold * hs_norm(m).max(T::one()) {
            basis.push(r * real(T::one() / n));
            true
        } else {
            false
        }
    };
    push(&mut basis, &identity(dim));
    for g in gens {
        push(&mut basis, g);
    }
    loop {
        let snapshot = basis.clone();
        let mut grew = false;
        for a in &snapshot {
            for g in gens {
                grew |= push(&mut basis, &(a * g));
            }
        }
        if !grew || basis.len() >= dim * dim {
            break;
        }
    }
    basis
}
