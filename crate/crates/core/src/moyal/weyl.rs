// SPDX-License-Identifier: Apache-2.0

//! Weyl quantization on a truncated oscillator basis and the ħ-sweep of the
//! Egorov residual.

use std::collections::HashMap;

use num_complex::Complex;

use super::{poisson_bracket, PhaseSymbol, PhaseVar};
use crate::error::{Error, Result};
use crate::gksl::Gksl;
use crate::linalg::{commutator, op_norm, real, CMatrix};
use crate::scalar::{lit, to_f64, Real};

pub const EGOROV_CSV_HEADER: &str = "hbar,residual_norm,f_norm,ratio";

/// Matrix of a quantized symbol on `{|0⟩, …, |N−1⟩}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FockOperator<T: Real> {
    pub matrix: CMatrix<T>,
    pub truncation: usize,
    pub hbar: T,
    /// Rows and columns at the truncation boundary excluded by [`Self::interior`].
    pub margin: usize,
    /// Entries with `|i − j|` above this are zero.
    pub bandwidth: usize,
}

impl<T: Real> FockOperator<T> {
    pub fn interior_size(&self) -> usize {
        self.truncation.saturating_sub(self.margin)
    }

    /// Top-left block that is free of truncation effects.
    pub fn interior(&self) -> CMatrix<T> {
        interior(&self.matrix, self.margin)
    }

    /// Largest entry outside the declared band.
    pub fn out_of_band(&self) -> T {
        let mut worst = T::zero();
        for ((i, j), v) in self.matrix.iter().enumerate().map(|(k, v)| ((k % self.truncation, k / self.truncation), v)) {
            if i.abs_diff(j) > self.bandwidth {
                worst = worst.max(v.norm_sqr().sqrt());
            }
        }
        worst
    }
}

fn interior<T: Real>(m: &CMatrix<T>, margin: usize) -> CMatrix<T> {
    let k = m.nrows().saturating_sub(margin);
    m.view((0, 0), (k, k)).into_owned()
}

/// Position and momentum matrices on a basis of size `n`.
fn ladder<T: Real>(n: usize, hbar: T) -> (CMatrix<T>, CMatrix<T>) {
    let mut a = CMatrix::<T>::zeros(n, n);
    for k in 1..n {
        a[(k - 1, k)] = real(lit::<T>(k as f64).sqrt());
    }
    let ad = a.adjoint();
    let s = (hbar / lit(2.0)).sqrt();
    let x = (&a + &ad) * real(s);
    let p = (&ad - &a) * Complex::new(T::zero(), s);
    (x, p)
}

/// Sums of all orderings of `m` copies of `X` and `n` copies of `P`.
struct OrderingSums<T: Real> {
    x: CMatrix<T>,
    p: CMatrix<T>,
    memo: HashMap<(usize, usize), CMatrix<T>>,
}

impl<T: Real> OrderingSums<T> {
    fn new(dim: usize, hbar: T) -> Self {
        let (x, p) = ladder(dim, hbar);
        OrderingSums { x, p, memo: HashMap::new() }
    }

    fn get(&mut self, m: usize, n: usize) -> CMatrix<T> {
        if let Some(v) = self.memo.get(&(m, n)) {
            return v.clone();
        }
        let d = self.x.nrows();
        // split on the leftmost factor
        let mut out = if m == 0 && n == 0 { CMatrix::identity(d, d) } else { CMatrix::zeros(d, d) };
        if m > 0 {
            let rest = self.get(m - 1, n);
            out += &self.x * rest;
        }
        if n > 0 {
            let rest = self.get(m, n - 1);
            out += &self.p * rest;
        }
        self.memo.insert((m, n), out.clone());
        out
    }

    fn weyl(&mut self, m: usize, n: usize) -> CMatrix<T> {
        let mut binom = 1.0f64;
        for j in 0..n {
            binom = binom * (m + n - j) as f64 / (j + 1) as f64;
        }
        self.get(m, n) * real(T::one() / lit::<T>(binom))
    }
}

/// Weyl-ordered quantization of a polynomial symbol.
///
/// Products are formed on a basis padded by the symbol degree and then cut
/// back to `n` levels, so every returned entry equals the corresponding
/// entry of the untruncated operator.
pub fn weyl_quantize<T: Real>(a: &PhaseSymbol, n: usize, hbar: T) -> Result<FockOperator<T>> {
    let degree = a.phase_degree().max(0) as usize;
    if n < degree + 2 {
        return Err(Error::InvalidInput(format!("truncation {n} below symbol degree {degree} + 2")));
    }
    if !(hbar > T::zero()) {
        return Err(Error::InvalidInput(format!("hbar must be positive, got {hbar}")));
    }
    let padded = n + degree;
    let mut sums = OrderingSums::new(padded, hbar);
    let mut full = CMatrix::<T>::zeros(padded, padded);
    for (mono, c) in a.poly().terms() {
        let (mx, mxi, mh) = (mono.exponent(&PhaseVar::X), mono.exponent(&PhaseVar::Xi), mono.exponent(&PhaseVar::Hbar));
        if mh < 0 {
            return Err(Error::Unsupported(format!("negative power of hbar in `{a}`")));
        }
        let (re, im) = c.to_c64();
        let weight = Complex::new(lit::<T>(re), lit::<T>(im)) * real(hbar.powi(mh));
        full += sums.weyl(mx as usize, mxi as usize) * weight;
    }
    Ok(FockOperator {
        matrix: full.view((0, 0), (n, n)).into_owned(),
        truncation: n,
        hbar,
        margin: degree + 2,
        bandwidth: degree,
    })
}

/// `‖M_int((1/iħ)[Q(a), Q(b)] − Q({a, b}))‖` in operator norm.
pub fn commutator_check<T: Real>(a: &PhaseSymbol, b: &PhaseSymbol, n: usize, hbar: T, margin: usize) -> Result<T> {
    let qa = weyl_quantize(a, n, hbar)?.matrix;
    let qb = weyl_quantize(b, n, hbar)?.matrix;
    let qab = weyl_quantize(&poisson_bracket(a, b), n, hbar)?.matrix;
    let lhs = commutator(&qa, &qb) * Complex::new(T::zero(), -T::one() / hbar);
    Ok(op_norm(&interior(&(lhs - qab), margin)))
}

/// Semiclassical model: Hamiltonian, observable and Lindblad symbols with rates.
#[derive(Clone, Debug, PartialEq)]
pub struct EgorovModel {
    pub hamiltonian: PhaseSymbol,
    pub observable: PhaseSymbol,
    pub lindblads: Vec<(f64, PhaseSymbol)>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EgorovRow<T: Real> {
    pub hbar: T,
    pub residual_norm: T,
    pub f_norm: T,
    pub ratio: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EgorovSweep<T: Real> {
    pub rows: Vec<EgorovRow<T>>,
    /// Least-squares slope of `log ratio` against `log ħ`; absent when fewer
    /// than two rows have a positive ratio.
    pub slope: Option<T>,
}

impl<T: Real> EgorovSweep<T> {
    /// CSV with header [`EGOROV_CSV_HEADER`] and a final `slope=s±tol` line.
    pub fn to_csv(&self, tol: f64) -> String {
        let mut out = String::from(EGOROV_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:.12e},{:.12e},{:.12e}\n",
                to_f64(r.hbar),
                to_f64(r.residual_norm),
                to_f64(r.f_norm),
                to_f64(r.ratio)
            ));
        }
        match self.slope {
            Some(s) => out.push_str(&format!("slope={:.2}±{:.2}\n", to_f64(s), tol)),
            None => out.push_str(&format!("slope=nan±{tol:.2}\n")),
        }
        out
    }

    pub fn max_ratio(&self) -> T {
        self.rows.iter().fold(T::zero(), |m, r| m.max(r.ratio))
    }
}

/// `r(ħ) = ‖M_int(𝓛†Q(f) − Q({f, H}))‖ / max(1, ‖M_int Q(f)‖)` for each `ħ`.
pub fn egorov_sweep<T: Real>(model: &EgorovModel, hbars: &[T], n: usize, margin: usize) -> Result<EgorovSweep<T>> {
    let transported = poisson_bracket(&model.observable, &model.hamiltonian);
    let mut rows = Vec::with_capacity(hbars.len());
    for &hbar in hbars {
        let h = weyl_quantize(&model.hamiltonian, n, hbar)?.matrix;
        let mut ls = Vec::with_capacity(model.lindblads.len());
        for (rate, l) in &model.lindblads {
            if *rate < 0.0 {
                return Err(Error::InvalidInput(format!("negative rate {rate}")));
            }
            ls.push(weyl_quantize(l, n, hbar)?.matrix * real(lit::<T>(rate.sqrt())));
        }
        let g = Gksl::new(hbar, h, ls)?;
        let qf = weyl_quantize(&model.observable, n, hbar)?.matrix;
        let target = weyl_quantize(&transported, n, hbar)?.matrix;
        let residual = g.heisenberg_apply(&qf)? - target;
        let residual_norm = op_norm(&interior(&residual, margin));
        let f_norm = op_norm(&interior(&qf, margin));
        let ratio = residual_norm / f_norm.max(T::one());
        rows.push(EgorovRow { hbar, residual_norm, f_norm, ratio });
    }
    Ok(EgorovSweep { slope: log_log_slope(&rows), rows })
}

fn log_log_slope<T: Real>(rows: &[EgorovRow<T>]) -> Option<T> {
    if rows.len() < 2 || rows.iter().any(|r| !(r.ratio > T::zero()) || !(r.hbar > T::zero())) {
        return None;
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (to_f64(r.hbar).ln(), to_f64(r.ratio).ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(lit(sxy / sxx))
}
