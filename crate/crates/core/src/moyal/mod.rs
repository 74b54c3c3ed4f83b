// SPDX-License-Identifier: Apache-2.0

//! Moyal calculus on polynomial symbols in one degree of freedom.
//!
//! Conventions: `{x, ξ} = 1` and `x⋆ξ − ξ⋆x = iħ`, so that
//! `[Q(x), Q(ξ)] = iħ` and the Dirac condition holds with a plus sign.

mod weyl;

use std::fmt;

use num_traits::{One, Zero};

pub use weyl::{
    commutator_check, egorov_sweep, weyl_quantize, EgorovModel, EgorovRow, EgorovSweep, FockOperator,
    EGOROV_CSV_HEADER,
};

use crate::error::{Error, Result};
use crate::poly::{Monomial, Poly};
use crate::scalar::{Coeff, GaussianRational, Rational};
use crate::symbolic::{Expression, Generator};

/// Phase-space variables and the formal parameter `ħ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PhaseVar {
    X,
    Xi,
    Hbar,
}

impl PhaseVar {
    pub fn name(self) -> &'static str {
        match self {
            PhaseVar::X => "x",
            PhaseVar::Xi => "xi",
            PhaseVar::Hbar => "hbar",
        }
    }
}

/// Name reserved for the imaginary unit when parsing symbols.
pub const IMAGINARY_UNIT: &str = "i";

/// Polynomial in `x`, `ξ` and `ħ` with Gaussian-rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PhaseSymbol(Poly<PhaseVar, GaussianRational>);

impl PhaseSymbol {
    pub fn zero() -> Self {
        PhaseSymbol(Poly::zero())
    }

    pub fn one() -> Self {
        PhaseSymbol(Poly::one())
    }

    pub fn x() -> Self {
        PhaseSymbol(Poly::var(PhaseVar::X))
    }

    pub fn xi() -> Self {
        PhaseSymbol(Poly::var(PhaseVar::Xi))
    }

    pub fn hbar() -> Self {
        PhaseSymbol(Poly::var(PhaseVar::Hbar))
    }

    pub fn constant(c: GaussianRational) -> Self {
        PhaseSymbol(Poly::constant(c))
    }

    pub fn i() -> Self {
        Self::constant(GaussianRational::i())
    }

    pub fn poly(&self) -> &Poly<PhaseVar, GaussianRational> {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Converts a polynomial expression in `x`, `xi`, `hbar` (and `i` for the
    /// imaginary unit).
    pub fn from_expression(e: &Expression) -> Result<Self> {
        let nf = e.normal_form();
        let mut out = Poly::zero();
        for (m, c) in nf.poly().terms() {
            let mut term = Poly::constant(GaussianRational::real(c.clone()));
            for (g, k) in m.iter() {
                let Generator::Symbol(name) = g else {
                    return Err(Error::Unsupported(format!("non-polynomial symbol `{e}`")));
                };
                if *k < 0 {
                    return Err(Error::Unsupported(format!("negative power of `{name}` in `{e}`")));
                }
                let factor = match name.as_str() {
                    "x" => Poly::var(PhaseVar::X),
                    "xi" => Poly::var(PhaseVar::Xi),
                    "hbar" => Poly::var(PhaseVar::Hbar),
                    IMAGINARY_UNIT => Poly::constant(GaussianRational::i()),
                    other => return Err(Error::UnknownSymbol(other.to_string())),
                };
                term = &term * &factor.pow(*k as u32);
            }
            out = &out + &term;
        }
        Ok(PhaseSymbol(out))
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_expression(&Expression::parse(text)?)
    }

    /// Expression form, with `i` standing for the imaginary unit.
    pub fn to_expression(&self) -> Expression {
        let mut items = Vec::new();
        for (m, c) in self.0.terms() {
            let mono: Vec<Expression> = m.iter().map(|(v, k)| Expression::symbol(v.name()).pow(*k)).collect();
            if !c.re.is_zero() {
                items.push(Expression::product(
                    std::iter::once(Expression::rational(c.re.clone())).chain(mono.iter().cloned()),
                ));
            }
            if !c.im.is_zero() {
                items.push(Expression::product(
                    [Expression::rational(c.im.clone()), Expression::symbol(IMAGINARY_UNIT)]
                        .into_iter()
                        .chain(mono.iter().cloned()),
                ));
            }
        }
        Expression::sum(items)
    }

    /// Complex conjugate; `x`, `ξ` and `ħ` are real.
    pub fn conj(&self) -> Self {
        PhaseSymbol(self.0.map_coeffs(GaussianRational::conj))
    }

    pub fn is_real(&self) -> bool {
        self.0.terms().all(|(_, c)| c.is_real())
    }

    /// Coefficient of `ħ^k`, as a symbol in `x` and `ξ`.
    pub fn hbar_coefficient(&self, k: i32) -> Self {
        PhaseSymbol(self.0.collect_in(&PhaseVar::Hbar).remove(&k).unwrap_or_default())
    }

    /// Largest power of `ħ` present.
    pub fn hbar_degree(&self) -> i32 {
        self.0.degree_in(&PhaseVar::Hbar)
    }

    /// Total degree in `x` and `ξ`.
    pub fn phase_degree(&self) -> i32 {
        self.0.total_degree_in(&[PhaseVar::X, PhaseVar::Xi])
    }

    pub fn derivative(&self, v: PhaseVar) -> Self {
        PhaseSymbol(self.0.derivative(&v))
    }

    fn derivative_n(&self, nx: usize, nxi: usize) -> Self {
        let mut out = self.0.clone();
        for _ in 0..nx {
            out = out.derivative(&PhaseVar::X);
        }
        for _ in 0..nxi {
            out = out.derivative(&PhaseVar::Xi);
        }
        PhaseSymbol(out)
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        PhaseSymbol(self.0.scale(c))
    }
}

impl fmt::Display for PhaseSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expression())
    }
}

impl serde::Serialize for PhaseSymbol {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for PhaseSymbol {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        PhaseSymbol::parse(&text).map_err(serde::de::Error::custom)
    }
}

macro_rules! phase_ops {
    ($tr:ident, $f:ident) => {
        impl std::ops::$tr for &PhaseSymbol {
            type Output = PhaseSymbol;
            fn $f(self, rhs: Self) -> PhaseSymbol {
                PhaseSymbol((&self.0).$f(&rhs.0))
            }
        }
        impl std::ops::$tr for PhaseSymbol {
            type Output = PhaseSymbol;
            fn $f(self, rhs: Self) -> PhaseSymbol {
                PhaseSymbol((&self.0).$f(&rhs.0))
            }
        }
    };
}
phase_ops!(Add, add);
phase_ops!(Sub, sub);
phase_ops!(Mul, mul);

impl std::ops::Neg for PhaseSymbol {
    type Output = PhaseSymbol;
    fn neg(self) -> PhaseSymbol {
        PhaseSymbol(-self.0)
    }
}

fn binomial(n: usize, k: usize) -> Rational {
    let mut c = Rational::one();
    for j in 0..k {
        c = c * Rational::from_int((n - j) as i64) / Rational::from_int((j + 1) as i64);
    }
    c
}

/// Terminating Moyal series `Σ_n (1/n!)(iħ/2)^n Pⁿ(a, b)` with
/// `Pⁿ(a,b) = Σ_k C(n,k)(−1)^k ∂_x^{n−k}∂_ξ^k a · ∂_x^k ∂_ξ^{n−k} b`.
pub fn star_product(a: &PhaseSymbol, b: &PhaseSymbol) -> PhaseSymbol {
    if a.is_zero() || b.is_zero() {
        return PhaseSymbol::zero();
    }
    let max_n = a.phase_degree().min(b.phase_degree()).max(0) as usize;
    let mut out = Poly::zero();
    // (i/2)^n / n!
    let mut prefactor = GaussianRational::one();
    for n in 0..=max_n {
        if n > 0 {
            prefactor = (prefactor * GaussianRational::new(Rational::zero(), crate::scalar::ratio(1, 2))).div_int(n as i64);
        }
        let mut pn = Poly::zero();
        for k in 0..=n {
            let left = a.derivative_n(n - k, k);
            if left.is_zero() {
                continue;
            }
            let right = b.derivative_n(k, n - k);
            if right.is_zero() {
                continue;
            }
            let sign = if k % 2 == 0 { Rational::one() } else { -Rational::one() };
            let c = GaussianRational::real(binomial(n, k) * sign);
            pn = &pn + &(&left.0 * &right.0).scale(&c);
        }
        if pn.is_zero() {
            continue;
        }
        let hbar_n = Monomial::var(PhaseVar::Hbar, n as i32);
        out = &out + &pn.mul_monomial(&hbar_n).scale(&prefactor);
    }
    PhaseSymbol(out)
}

/// `(a⋆b − b⋆a)/(iħ)`; exact, since only odd orders survive.
pub fn moyal_bracket(a: &PhaseSymbol, b: &PhaseSymbol) -> PhaseSymbol {
    let diff = star_product(a, b) - star_product(b, a);
    let inv_hbar = Monomial::var(PhaseVar::Hbar, -1);
    PhaseSymbol(diff.0.mul_monomial(&inv_hbar).map_coeffs(GaussianRational::div_i))
}

/// `{a, b} = ∂_x a ∂_ξ b − ∂_ξ a ∂_x b`.
pub fn poisson_bracket(a: &PhaseSymbol, b: &PhaseSymbol) -> PhaseSymbol {
    &(a.derivative(PhaseVar::X) * b.derivative(PhaseVar::Xi)) - &(a.derivative(PhaseVar::Xi) * b.derivative(PhaseVar::X))
}

/// `moyal_bracket(a, b) − {a, b}`; always divisible by `ħ²`.
pub fn dirac_residual(a: &PhaseSymbol, b: &PhaseSymbol) -> PhaseSymbol {
    moyal_bracket(a, b) - poisson_bracket(a, b)
}

/// Symbol of the dissipator `l̄⋆f⋆l − ½(|l|²⋆f + f⋆|l|²)` with `|l|² = l̄⋆l`.
pub fn dissipator_symbol(l: &PhaseSymbol, f: &PhaseSymbol) -> PhaseSymbol {
    let lbar = l.conj();
    let abs2 = star_product(&lbar, l);
    let sandwich = star_product(&star_product(&lbar, f), l);
    let anti = star_product(&abs2, f) + star_product(f, &abs2);
    sandwich - anti.scale(&GaussianRational::real(crate::scalar::ratio(1, 2)))
}

/// `(d⁰, d¹)`: the `ħ⁰` and `ħ¹` parts of [`dissipator_symbol`].
pub fn dissipator_symbol_residual(l: &PhaseSymbol, f: &PhaseSymbol) -> (PhaseSymbol, PhaseSymbol) {
    let d = dissipator_symbol(l, f);
    (d.hbar_coefficient(0), d.hbar_coefficient(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn s(text: &str) -> PhaseSymbol {
        PhaseSymbol::parse(text).unwrap()
    }

    #[test]
    fn star_examples() {
        assert_eq!(star_product(&s("x"), &s("xi")), s("x*xi + i*hbar/2"));
        assert_eq!(star_product(&s("x^2*xi + 3"), &PhaseSymbol::one()), s("x^2*xi + 3"));
        assert_eq!(star_product(&s("x"), &s("x")), s("x^2"));
        assert_eq!(star_product(&s("xi"), &s("x")), s("x*xi - i*hbar/2"));
    }

    #[test]
    fn bracket_examples() {
        assert_eq!(moyal_bracket(&s("x^2"), &s("xi^2")), s("4*x*xi"));
        assert!(moyal_bracket(&s("x^2*xi"), &s("x^2*xi")).is_zero());
        assert_eq!(moyal_bracket(&s("x^3"), &s("xi^3")), s("9*x^2*xi^2 - 3/2*hbar^2"));
        assert_eq!(dirac_residual(&s("x^3"), &s("xi^3")), s("-3/2*hbar^2"));
        assert!(dirac_residual(&s("x^2 + x*xi"), &s("xi^2 - 5*x")).is_zero());
        assert!(dirac_residual(&s("x^4*xi"), &PhaseSymbol::one()).is_zero());
        assert_eq!(poisson_bracket(&s("x"), &s("xi")), PhaseSymbol::one());
    }

    #[test]
    fn parse_and_display() {
        let a = s("(x + i*xi)^2/2 - hbar");
        assert_eq!(a.hbar_coefficient(1), s("-1"));
        assert!(!a.is_real());
        assert_eq!(PhaseSymbol::parse(&a.to_string()).unwrap(), a);
        assert_eq!(a.conj(), s("(x - i*xi)^2/2 - hbar"));
        assert!(matches!(PhaseSymbol::parse("exp(x)"), Err(Error::Unsupported(_))));
        assert!(matches!(PhaseSymbol::parse("x^(-1)"), Err(Error::Unsupported(_))));
        assert!(matches!(PhaseSymbol::parse("q"), Err(Error::UnknownSymbol(_))));
        assert_eq!(a.phase_degree(), 2);
    }

    #[test]
    fn dissipator_examples() {
        let h = s("(x^2 + xi^2)/2");
        let l = s("3*((x^2 + xi^2)/2)^2 - (x^2 + xi^2)/2 + 1");
        let (d0, d1) = dissipator_symbol_residual(&l, &h);
        assert!(d0.is_zero() && d1.is_zero());
        let (d0, d1) = dissipator_symbol_residual(&PhaseSymbol::one(), &s("x^3*xi"));
        assert!(d0.is_zero() && d1.is_zero());
        // l = x + iξ is ∝ the annihilation operator; D(P) = −ħP
        let (d0, d1) = dissipator_symbol_residual(&s("x + i*xi"), &s("xi"));
        assert!(d0.is_zero());
        assert_eq!(d1, s("-xi"));
        // real l: the order-ħ part always cancels
        let (_, d1) = dissipator_symbol_residual(&s("x"), &s("xi"));
        assert!(d1.is_zero());
        assert_eq!(dissipator_symbol(&s("x"), &s("xi")), PhaseSymbol::zero());
        assert_eq!(binomial(4, 2), ratio(6, 1));
    }
}
