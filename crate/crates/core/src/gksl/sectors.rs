// SPDX-License-Identifier: Apache-2.0

//! Joint spectral sectors of commuting observables, dephasing rates and the
//! decay of inter-sector coherences.

use std::cmp::Ordering;

use nalgebra::DMatrix;
use num_complex::Complex;

use super::Gksl;
use crate::error::{Error, Result};
use crate::linalg::{check_square, commutator, hermitian_eigen, hs_norm, identity, real, CMatrix};
use crate::scalar::{lit, to_f64, Real};

/// Absolute gap separating distinct eigenvalues.
pub const SECTOR_GAP: f64 = 1e-8;

/// Tolerance for projector identities and reconstruction.
const RECONSTRUCTION_TOL: f64 = 1e-9;

pub const COHERENCE_CSV_HEADER: &str = "t,sector_nu,sector_mu,block_norm,predicted_norm";

/// One joint eigenspace.
#[derive(Clone, Debug, PartialEq)]
pub struct Sector<T: Real> {
    /// Joint eigenvalue tuple, one entry per observable.
    pub values: Vec<T>,
    /// Orthonormal basis as columns (`d × multiplicity`).
    pub basis: CMatrix<T>,
    pub projector: CMatrix<T>,
}

impl<T: Real> Sector<T> {
    pub fn multiplicity(&self) -> usize {
        self.basis.ncols()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SectorDecomposition<T: Real> {
    pub dim: usize,
    /// Sorted lexicographically by eigenvalue tuple.
    pub sectors: Vec<Sector<T>>,
}

impl<T: Real> SectorDecomposition<T> {
    pub fn len(&self) -> usize {
        self.sectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sectors.is_empty()
    }

    /// `‖Σ P_ν − 𝟙‖`.
    pub fn completeness_residual(&self) -> T {
        let mut sum = CMatrix::<T>::zeros(self.dim, self.dim);
        for s in &self.sectors {
            sum += &s.projector;
        }
        hs_norm(&(sum - identity(self.dim)))
    }
}

/// Simultaneous diagonalization by iterated eigenspace refinement.
pub fn joint_sectors<T: Real>(observables: &[CMatrix<T>], tol: T) -> Result<SectorDecomposition<T>> {
    let dim = match observables.first() {
        Some(a) => a.nrows(),
        None => return Err(Error::InvalidInput("no observables given".into())),
    };
    for (k, a) in observables.iter().enumerate() {
        check_square(a, dim)?;
        if hs_norm(&(a - a.adjoint())) > tol {
            return Err(Error::NotHermitian(format!("observable {k}")));
        }
    }
    for i in 0..observables.len() {
        for j in i + 1..observables.len() {
            let norm = hs_norm(&commutator(&observables[i], &observables[j]));
            if norm >= tol {
                return Err(Error::NonCommuting { first: i, second: j, norm: to_f64(norm) });
            }
        }
    }
    let gap = lit::<T>(SECTOR_GAP);
    let mut blocks: Vec<(Vec<T>, CMatrix<T>)> = vec![(Vec::new(), identity(dim))];
    for a in observables {
        let mut next = Vec::new();
        for (values, v) in blocks {
            let reduced = v.adjoint() * a * &v;
            let (evals, evecs) = hermitian_eigen(&reduced);
            let mut start = 0;
            while start < evals.len() {
                let mut end = start + 1;
                while end < evals.len() && evals[end] - evals[end - 1] <= gap {
                    end += 1;
                }
                let mean = evals[start..end].iter().fold(T::zero(), |s, x| s + *x) / lit::<T>((end - start) as f64);
                let w = evecs.columns(start, end - start).into_owned();
                let mut tuple = values.clone();
                tuple.push(mean);
                next.push((tuple, &v * w));
                start = end;
            }
        }
        blocks = next;
    }
    blocks.sort_by(|a, b| lex_cmp(&a.0, &b.0));
    let sectors: Vec<Sector<T>> = blocks
        .into_iter()
        .map(|(values, basis)| {
            let projector = &basis * basis.adjoint();
            Sector { values, basis, projector }
        })
        .collect();
    let out = SectorDecomposition { dim, sectors };
    let limit = lit::<T>(RECONSTRUCTION_TOL);
    for (k, a) in observables.iter().enumerate() {
        let mut rebuilt = CMatrix::<T>::zeros(dim, dim);
        for s in &out.sectors {
            rebuilt += &s.projector * real(s.values[k]);
        }
        let residual = hs_norm(&(a - rebuilt));
        if residual > limit {
            return Err(Error::InvalidInput(format!(
                "observable {k} is not reconstructed by its sectors (residual {residual})"
            )));
        }
    }
    Ok(out)
}

fn lex_cmp<T: Real>(a: &[T], b: &[T]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Scalar by which `l` acts on the sector, checked to `1e-9`.
fn sector_scalar<T: Real>(l: &CMatrix<T>, s: &Sector<T>, k: usize, nu: usize) -> Result<Complex<T>> {
    let lp = l * &s.projector;
    let scalar = (&lp).trace() / real(lit::<T>(s.multiplicity() as f64));
    let residual = hs_norm(&(lp - &s.projector * scalar));
    if residual > lit(RECONSTRUCTION_TOL) {
        return Err(Error::NonScalarSector { operator: k, sector: nu, residual: to_f64(residual) });
    }
    Ok(scalar)
}

/// `rate(ν, μ) = ½ Σ_k |ℓ_{k,ν} − ℓ_{k,μ}|²`.
pub fn dephasing_rates<T: Real>(g: &Gksl<T>, sectors: &SectorDecomposition<T>) -> Result<DMatrix<T>> {
    if sectors.dim != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), found: sectors.dim });
    }
    let n = sectors.len();
    let mut ell: Vec<Vec<Complex<T>>> = Vec::with_capacity(g.lindblads().len());
    for (k, l) in g.lindblads().iter().enumerate() {
        let row = sectors
            .sectors
            .iter()
            .enumerate()
            .map(|(nu, s)| sector_scalar(l, s, k, nu))
            .collect::<Result<Vec<_>>>()?;
        ell.push(row);
    }
    let half = lit::<T>(0.5);
    Ok(DMatrix::from_fn(n, n, |nu, mu| {
        ell.iter().fold(T::zero(), |acc, row| acc + (row[nu] - row[mu]).norm_sqr()) * half
    }))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoherenceRow<T: Real> {
    pub t: T,
    pub nu: usize,
    pub mu: usize,
    pub block_norm: T,
    /// `e^{−rate·t}‖ρ_{νμ}(0)‖`, absent when the law is not applicable.
    pub predicted_norm: Option<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoherenceTable<T: Real> {
    pub rows: Vec<CoherenceRow<T>>,
    /// The closed-form law applies only when `H` preserves every sector.
    pub law_applies: bool,
    /// Diagonal blocks are expected to stay fixed only when `H` is scalar on
    /// every sector.
    pub hamiltonian_scalar: bool,
    /// Largest relative mismatch on off-diagonal blocks.
    pub max_relative_error: T,
    /// Largest `‖ρ_{νν}(t) − ρ_{νν}(0)‖`.
    pub max_diagonal_drift: T,
}

impl<T: Real> CoherenceTable<T> {
    /// CSV with header [`COHERENCE_CSV_HEADER`]; inapplicable predictions are
    /// written as `nan`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(COHERENCE_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let predicted = r.predicted_norm.map(|p| format!("{:.12e}", to_f64(p))).unwrap_or_else(|| "nan".into());
            out.push_str(&format!(
                "{},{},{},{:.12e},{}\n",
                to_f64(r.t),
                r.nu,
                r.mu,
                to_f64(r.block_norm),
                predicted
            ));
        }
        out
    }
}

/// Block norms `‖P_ν ρ(t) P_μ‖` for every `ν ≤ μ` and every time.
///
/// When `H` commutes with every projector the block evolves as
/// `e^{−rate·t} U_ν(t) ρ_{νμ}(0) U_μ(t)†` with unitary `U`, so the norm law
/// `‖ρ_{νμ}(t)‖ = e^{−rate·t}‖ρ_{νμ}(0)‖` is asserted; otherwise predictions
/// are left empty. Diagonal blocks are compared entrywise only when `H` also
/// acts as a scalar on each sector.
pub fn coherence_trajectory<T: Real>(
    g: &Gksl<T>,
    rho0: &CMatrix<T>,
    sectors: &SectorDecomposition<T>,
    times: &[T],
) -> Result<CoherenceTable<T>> {
    check_square(rho0, g.dim())?;
    let rates = dephasing_rates(g, sectors)?;
    let limit = lit::<T>(RECONSTRUCTION_TOL);
    let law_applies = sectors
        .sectors
        .iter()
        .all(|s| hs_norm(&commutator(g.hamiltonian(), &s.projector)) <= limit);
    let hamiltonian_scalar = sectors
        .sectors
        .iter()
        .enumerate()
        .all(|(nu, s)| sector_scalar(g.hamiltonian(), s, 0, nu).is_ok());
    let block = |rho: &CMatrix<T>, nu: usize, mu: usize| -> CMatrix<T> {
        &sectors.sectors[nu].projector * rho * &sectors.sectors[mu].projector
    };
    let n = sectors.len();
    let initial: Vec<Vec<CMatrix<T>>> = (0..n).map(|nu| (0..n).map(|mu| block(rho0, nu, mu)).collect()).collect();
    let generator = g.to_superoperator(super::Picture::Schrodinger);
    let mut rows = Vec::new();
    let mut max_relative_error = T::zero();
    let mut max_diagonal_drift = T::zero();
    let tiny = lit::<T>(1e-12);
    for &t in times {
        if t < T::zero() {
            return Err(Error::InvalidInput(format!("evolution time must be nonnegative, got {t}")));
        }
        let rho_t = generator.exp(t).apply(rho0);
        for nu in 0..n {
            for mu in nu..n {
                let b = block(&rho_t, nu, mu);
                let block_norm = hs_norm(&b);
                let initial_norm = hs_norm(&initial[nu][mu]);
                let predicted_norm = law_applies.then(|| (-rates[(nu, mu)] * t).exp() * initial_norm);
                if let Some(p) = predicted_norm {
                    if nu == mu {
                        if hamiltonian_scalar {
                            max_diagonal_drift = max_diagonal_drift.max(hs_norm(&(b - &initial[nu][mu])));
                        }
                    } else {
                        // relative error, or absolute for blocks that start empty
                        let err = if initial_norm > tiny { (block_norm - p).abs() / p } else { (block_norm - p).abs() };
                        max_relative_error = max_relative_error.max(err);
                    }
                }
                rows.push(CoherenceRow { t, nu, mu, block_norm, predicted_norm });
            }
        }
    }
    Ok(CoherenceTable { rows, law_applies, hamiltonian_scalar, max_relative_error, max_diagonal_drift })
}

/// `Σ_ν φ(ν) P_ν`.
pub fn functional_calculus<T: Real>(sectors: &SectorDecomposition<T>, phi: &dyn Fn(&[T]) -> Complex<T>) -> CMatrix<T> {
    let mut out = CMatrix::<T>::zeros(sectors.dim, sectors.dim);
    for s in &sectors.sectors {
        out += &s.projector * phi(&s.values);
    }
    out
}
