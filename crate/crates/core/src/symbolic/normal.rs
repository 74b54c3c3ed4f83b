// SPDX-License-Identifier: Apache-2.0

//! Canonical normal form for [`Expression`] and the zero test built on it.
//!
//! An expression is expanded into a Laurent polynomial with rational
//! coefficients over *generators*: plain symbols, `exp(A)`, `sqrt(A)` and
//! `1/A` where `A` is itself a normal form. Within a monomial all exponential
//! factors are merged into a single `exp(ΣA)`, square roots carry exponent 1
//! (`sqrt(A)^2 = A`, `sqrt(A)^-1 = sqrt(A)·(1/A)`), and reciprocals of
//! single-term polynomials are folded into Laurent exponents. This catches
//! every cancellation that occurs in polynomial identities and in identities
//! among exp/sqrt factors with equal arguments. Whatever the structure cannot
//! decide is settled by evaluation at random rational points.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Expression;
use crate::poly::{Monomial, Poly};
use crate::scalar::{Coeff, Rational};

/// Number of admissible random points used by the probabilistic fallback.
pub const ZERO_TEST_POINTS: usize = 16;
/// Relative tolerance of the floating-point fallback.
pub const ZERO_TEST_TOLERANCE: f64 = 1e-12;
const ZERO_TEST_SEED: u64 = 0x6b69_6c6c_6a6f_7921;
const MAX_ATTEMPTS: usize = 400;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generator {
    Symbol(String),
    Exp(Box<NormalForm>),
    Sqrt(Box<NormalForm>),
    Recip(Box<NormalForm>),
}

/// Laurent polynomial over [`Generator`]s with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct NormalForm(Poly<Generator, Rational>);

/// Outcome of [`NormalForm::zero_test`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroVerdict {
    /// The normal form is the zero polynomial.
    Zero,
    /// Structure was inconclusive; every random sample evaluated to zero.
    ProbablyZero,
    NonZero,
    /// No sample point lay inside the sqrt/reciprocal domains.
    Inconclusive,
}

impl ZeroVerdict {
    pub fn is_zero(self) -> bool {
        matches!(self, ZeroVerdict::Zero | ZeroVerdict::ProbablyZero)
    }

    pub fn is_probabilistic(self) -> bool {
        matches!(self, ZeroVerdict::ProbablyZero)
    }
}

pub(crate) fn rational_sqrt(c: &Rational) -> Option<Rational> {
    if c.is_negative() {
        return None;
    }
    let n = c.numer();
    let d = c.denom();
    let rn = n.sqrt();
    let rd = d.sqrt();
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        Some(Rational::new(rn, rd))
    } else {
        None
    }
}

type Term = (Monomial<Generator>, Rational);

impl NormalForm {
    pub fn zero() -> Self {
        NormalForm(Poly::zero())
    }

    pub fn constant(c: Rational) -> Self {
        NormalForm(Poly::constant(c))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        self.0.as_constant()
    }

    pub fn poly(&self) -> &Poly<Generator, Rational> {
        &self.0
    }

    pub fn from_expression(e: &Expression) -> Self {
        match e {
            Expression::Const(c) => NormalForm::constant(c.clone()),
            Expression::Symbol(s) => NormalForm(Poly::var(Generator::Symbol(s.clone()))),
            Expression::Sum(items) => {
                let mut acc = Poly::zero();
                for item in items {
                    acc = &acc + &NormalForm::from_expression(item).0;
                }
                NormalForm(acc)
            }
            Expression::Product(items) => {
                let mut acc = NormalForm::constant(Rational::one());
                for item in items {
                    acc = acc.mul(&NormalForm::from_expression(item));
                    if acc.is_zero() {
                        break;
                    }
                }
                acc
            }
            Expression::Power(base, k) => NormalForm::from_expression(base).powi(*k),
            Expression::Exp(arg) => NormalForm::exp_of(NormalForm::from_expression(arg)),
            Expression::Sqrt(arg) => NormalForm::sqrt_of(NormalForm::from_expression(arg)),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        NormalForm(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        NormalForm(&self.0 - &other.0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        canonicalize(&self.0 * &other.0)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        NormalForm(self.0.scale(c))
    }

    pub fn powi(&self, k: i32) -> Self {
        if k >= 0 {
            let mut acc = NormalForm::constant(Rational::one());
            for _ in 0..k {
                acc = acc.mul(self);
            }
            return acc;
        }
        self.recip().powi(-k)
    }

    pub fn recip(&self) -> Self {
        if let Some((m, c)) = self.0.as_single_term() {
            let inv = Poly::term(Rational::one() / c.clone(), m.pow(-1));
            return canonicalize(inv);
        }
        // Normalize so the leading coefficient is one: 1/(cA) = (1/c)·(1/A).
        let (_, lead) = self.0.terms().next_back().expect("reciprocal of zero");
        let lead = lead.clone();
        let monic = NormalForm(self.0.scale(&(Rational::one() / lead.clone())));
        let g = Generator::Recip(Box::new(monic));
        NormalForm(Poly::term(Rational::one() / lead, Monomial::var(g, 1)))
    }

    fn exp_of(arg: NormalForm) -> Self {
        if arg.is_zero() {
            return NormalForm::constant(Rational::one());
        }
        NormalForm(Poly::var(Generator::Exp(Box::new(arg))))
    }

    fn sqrt_of(arg: NormalForm) -> Self {
        if let Some(c) = arg.as_constant() {
            if let Some(r) = rational_sqrt(&c) {
                return NormalForm::constant(r);
            }
        }
        NormalForm(Poly::var(Generator::Sqrt(Box::new(arg))))
    }

    pub fn to_expression(&self) -> Expression {
        Expression::sum(self.0.terms().map(|(m, c)| {
            let mut factors = vec![Expression::Const(c.clone())];
            for (g, e) in m.iter() {
                factors.push(generator_expression(g).pow(*e));
            }
            Expression::product(factors)
        }))
    }

    /// Evaluates all terms at a point; `None` when outside a domain.
    fn eval_terms(&self, point: &dyn Fn(&str) -> f64) -> Option<(f64, f64)> {
        let mut value = 0.0;
        let mut scale = 0.0;
        for (m, c) in self.0.terms() {
            let mut t = c.to_f64()?;
            for (g, e) in m.iter() {
                t *= eval_generator(g, point)?.powi(*e);
            }
            if !t.is_finite() {
                return None;
            }
            value += t;
            scale += t.abs();
        }
        Some((value, scale))
    }

    fn symbols(&self, out: &mut Vec<String>) {
        for (m, _) in self.0.terms() {
            for (g, _) in m.iter() {
                match g {
                    Generator::Symbol(s) => {
                        if !out.contains(s) {
                            out.push(s.clone());
                        }
                    }
                    Generator::Exp(a) | Generator::Sqrt(a) | Generator::Recip(a) => a.symbols(out),
                }
            }
        }
    }

    /// Structural zero test, falling back to evaluation at
    /// [`ZERO_TEST_POINTS`] random rational points.
    pub fn zero_test(&self) -> ZeroVerdict {
        if self.is_zero() {
            return ZeroVerdict::Zero;
        }
        if self.as_constant().is_some() {
            return ZeroVerdict::NonZero;
        }
        let has_opaque = self.0.terms().any(|(m, _)| {
            m.iter().any(|(g, _)| !matches!(g, Generator::Symbol(_)))
        });
        if !has_opaque {
            // A nonzero Laurent polynomial in plain symbols is nonzero.
            return ZeroVerdict::NonZero;
        }
        let mut names = Vec::new();
        self.symbols(&mut names);
        names.sort();
        let mut rng = ChaCha8Rng::seed_from_u64(ZERO_TEST_SEED);
        let mut accepted = 0;
        for _ in 0..MAX_ATTEMPTS {
            let values: Vec<f64> = names
                .iter()
                .map(|_| {
                    let num: i64 = rng.gen_range(-24..=24);
                    let den: i64 = rng.gen_range(1..=8);
                    num as f64 / den as f64
                })
                .collect();
            let lookup = |s: &str| {
                names.iter().position(|n| n == s).map(|i| values[i]).unwrap_or(f64::NAN)
            };
            let Some((value, scale)) = self.eval_terms(&lookup) else {
                continue;
            };
            if value.abs() > ZERO_TEST_TOLERANCE * scale.max(1.0) {
                return ZeroVerdict::NonZero;
            }
            accepted += 1;
            if accepted == ZERO_TEST_POINTS {
                return ZeroVerdict::ProbablyZero;
            }
        }
        ZeroVerdict::Inconclusive
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expression())
    }
}

fn generator_expression(g: &Generator) -> Expression {
    match g {
        Generator::Symbol(s) => Expression::Symbol(s.clone()),
        Generator::Exp(a) => Expression::Exp(Box::new(a.to_expression())),
        Generator::Sqrt(a) => Expression::Sqrt(Box::new(a.to_expression())),
        Generator::Recip(a) => Expression::Power(Box::new(a.to_expression()), -1),
    }
}

fn eval_generator(g: &Generator, point: &dyn Fn(&str) -> f64) -> Option<f64> {
    let v = match g {
        Generator::Symbol(s) => point(s),
        Generator::Exp(a) => a.eval_terms(point)?.0.exp(),
        Generator::Sqrt(a) => {
            let (x, scale) = a.eval_terms(point)?;
            if x < -1e-12 * scale.max(1.0) {
                return None;
            }
            x.max(0.0).sqrt()
        }
        Generator::Recip(a) => {
            let (x, scale) = a.eval_terms(point)?;
            if x.abs() < 1e-6 * scale.max(1.0) {
                return None;
            }
            1.0 / x
        }
    };
    v.is_finite().then_some(v)
}

/// Applies the exp-merging and sqrt-power rules to every term.
fn canonicalize(p: Poly<Generator, Rational>) -> NormalForm {
    let mut out = Poly::zero();
    let mut pending: Vec<Term> = p.into_terms().collect();
    while let Some((mono, coeff)) = pending.pop() {
        match rewrite_term(mono, coeff) {
            Rewrite::Done(m, c) => out.add_term(m, c),
            Rewrite::Expand(poly) => pending.extend(poly.into_terms()),
        }
    }
    NormalForm(out)
}

enum Rewrite {
    Done(Monomial<Generator>, Rational),
    Expand(Poly<Generator, Rational>),
}

fn rewrite_term(mono: Monomial<Generator>, coeff: Rational) -> Rewrite {
    let gens: Vec<(Generator, i32)> = mono.iter().map(|(g, e)| (g.clone(), *e)).collect();

    // merge exponentials: exp(A)^j · exp(B)^k = exp(jA + kB)
    let exp_count = gens.iter().filter(|(g, _)| matches!(g, Generator::Exp(_))).count();
    let needs_merge = exp_count > 1
        || gens.iter().any(|(g, e)| matches!(g, Generator::Exp(_)) && *e != 1);
    if needs_merge {
        let mut arg = NormalForm::zero();
        let mut rest = Monomial::one();
        for (g, e) in &gens {
            match g {
                Generator::Exp(a) => arg = arg.add(&a.scale(&Rational::from_int(*e as i64))),
                other => rest.mul_var(other.clone(), *e),
            }
        }
        let merged = NormalForm::exp_of(arg);
        let poly = Poly::term(coeff, rest);
        return Rewrite::Expand(&poly * &merged.0);
    }

    // sqrt(A)^k with k ∉ {1}: A^{⌊k/2⌋} · sqrt(A)^{k mod 2}
    for (g, e) in &gens {
        if let Generator::Sqrt(a) = g {
            if *e != 1 {
                let q = e.div_euclid(2);
                let r = e.rem_euclid(2);
                let mut rest = mono.clone();
                rest.take(g);
                rest.mul_var(g.clone(), r);
                let factor = a.powi(q);
                let poly = Poly::term(coeff, rest);
                return Rewrite::Expand(&poly * &factor.0);
            }
        }
    }
    Rewrite::Done(mono, coeff)
}

impl From<BigInt> for NormalForm {
    fn from(n: BigInt) -> Self {
        NormalForm::constant(Rational::from_integer(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nf(s: &str) -> NormalForm {
        Expression::parse(s).unwrap().normal_form()
    }

    #[test]
    fn exponentials_merge() {
        assert_eq!(nf("exp(z)*exp(-z)"), nf("1"));
        assert_eq!(nf("exp(z)^2"), nf("exp(2*z)"));
        assert_eq!(nf("exp(z - z)"), nf("1"));
    }

    #[test]
    fn sqrt_powers_reduce() {
        assert_eq!(nf("sqrt(1 + p^2)^2"), nf("1 + p^2"));
        assert_eq!(nf("sqrt(1 + p^2)^3"), nf("(1 + p^2)*sqrt(1 + p^2)"));
        assert_eq!(nf("sqrt(4/9)"), nf("2/3"));
        assert_eq!(nf("sqrt(x)*sqrt(x)^(-1)"), nf("1"));
    }

    #[test]
    fn monomial_reciprocal_is_laurent() {
        assert_eq!(nf("(2*x)^(-1)*x"), nf("1/2"));
    }

    #[test]
    fn probabilistic_fallback() {
        // x·(1/x) with a non-monomial reciprocal is only caught numerically.
        let e = nf("(1 + x^2)*(1 + x^2)^(-1) - 1");
        assert_eq!(e.zero_test(), ZeroVerdict::ProbablyZero);
        assert_eq!(nf("sqrt(x^2 + 1) - x").zero_test(), ZeroVerdict::NonZero);
    }

    #[test]
    fn inconclusive_outside_domain() {
        assert_eq!(nf("sqrt(-1 - x^2) - sqrt(-1 - x^2)*2 + sqrt(-1 - x^2)").zero_test(), ZeroVerdict::Zero);
        assert_eq!(nf("sqrt(-1 - x^2)*x").zero_test(), ZeroVerdict::Inconclusive);
    }

}
