// SPDX-License-Identifier: Apache-2.0

//! Sparse multivariate Laurent polynomials with exact coefficients.
//!
//! A [`Poly`] maps monomials (variable → nonzero integer exponent) to nonzero
//! coefficients, so two polynomials are equal iff their term maps are equal.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::Coeff;

/// Product of variables raised to nonzero integer exponents.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial<V: Ord>(BTreeMap<V, i32>);

impl<V: Ord + Clone> Monomial<V> {
    pub fn one() -> Self {
        Monomial(BTreeMap::new())
    }

    pub fn var(v: V, exp: i32) -> Self {
        let mut m = BTreeMap::new();
        if exp != 0 {
            m.insert(v, exp);
        }
        Monomial(m)
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (V, i32)>) -> Self {
        let mut m = Self::one();
        for (v, e) in pairs {
            m.mul_var(v, e);
        }
        m
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, v: &V) -> i32 {
        self.0.get(v).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&V, &i32)> {
        self.0.iter()
    }

    /// Sum of all exponents.
    pub fn degree(&self) -> i32 {
        self.0.values().sum()
    }

    pub fn mul_var(&mut self, v: V, exp: i32) {
        if exp == 0 {
            return;
        }
        let e = self.0.entry(v.clone()).or_insert(0);
        *e += exp;
        if *e == 0 {
            self.0.remove(&v);
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (v, e) in &other.0 {
            out.mul_var(v.clone(), *e);
        }
        out
    }

    pub fn pow(&self, k: i32) -> Self {
        if k == 0 {
            return Self::one();
        }
        Monomial(self.0.iter().map(|(v, e)| (v.clone(), e * k)).collect())
    }

    /// Removes `v` and returns its former exponent.
    pub fn take(&mut self, v: &V) -> i32 {
        self.0.remove(v).unwrap_or(0)
    }

    pub fn retain(&mut self, f: impl FnMut(&V, &mut i32) -> bool) {
        self.0.retain(f);
    }
}

/// Exact sparse polynomial over variables `V` with coefficients `C`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Poly<V: Ord, C> {
    terms: BTreeMap<Monomial<V>, C>,
}

impl<V: Ord + Clone, C: Coeff> Default for Poly<V, C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<V: Ord + Clone, C: Coeff> Poly<V, C> {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn constant(c: C) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn var(v: V) -> Self {
        Self::term(C::one(), Monomial::var(v, 1))
    }

    pub fn term(c: C, m: Monomial<V>) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial<V>, &C)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial<V>, C)> {
        self.terms.into_iter()
    }

    pub fn coefficient(&self, m: &Monomial<V>) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    /// Returns the constant if the polynomial has no non-trivial monomials.
    pub fn as_constant(&self) -> Option<C> {
        match self.terms.len() {
            0 => Some(C::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    /// Returns `(c, m)` when the polynomial is a single term.
    pub fn as_single_term(&self) -> Option<(&Monomial<V>, &C)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn add_term(&mut self, m: Monomial<V>, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let sum = existing.clone() + c;
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut out = Self::zero();
        for (m, k) in &self.terms {
            out.add_term(m.clone(), k.clone() * c.clone());
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial<V>) -> Self {
        Poly { terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect() }
    }

    pub fn map_coeffs(&self, f: impl Fn(&C) -> C) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Exact partial derivative with respect to `v`.
    pub fn derivative(&self, v: &V) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm.mul_var(v.clone(), -1);
            out.add_term(dm, c.clone() * C::from_int(e as i64));
        }
        out
    }

    /// Largest exponent of `v` over all terms (0 for the zero polynomial).
    pub fn degree_in(&self, v: &V) -> i32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0).max(0)
    }

    /// Largest total degree over the given variables.
    pub fn total_degree_in(&self, vars: &[V]) -> i32 {
        self.terms
            .keys()
            .map(|m| vars.iter().map(|v| m.exponent(v)).sum::<i32>())
            .max()
            .unwrap_or(0)
    }

    /// Splits by powers of `v`: returns `k ↦ coefficient polynomial of v^k`.
    pub fn collect_in(&self, v: &V) -> BTreeMap<i32, Self> {
        let mut out: BTreeMap<i32, Self> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut rest = m.clone();
            let e = rest.take(v);
            out.entry(e).or_default().add_term(rest, c.clone());
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    pub fn variables(&self) -> Vec<V> {
        let mut vs: Vec<V> = Vec::new();
        for m in self.terms.keys() {
            for (v, _) in m.iter() {
                if !vs.contains(v) {
                    vs.push(v.clone());
                }
            }
        }
        vs.sort();
        vs
    }
}

impl<V: Ord + Clone, C: Coeff> Add for &Poly<V, C> {
    type Output = Poly<V, C>;
    fn add(self, rhs: Self) -> Poly<V, C> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<V: Ord + Clone, C: Coeff> Sub for &Poly<V, C> {
    type Output = Poly<V, C>;
    fn sub(self, rhs: Self) -> Poly<V, C> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<V: Ord + Clone, C: Coeff> Mul for &Poly<V, C> {
    type Output = Poly<V, C>;
    fn mul(self, rhs: Self) -> Poly<V, C> {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        out
    }
}

impl<V: Ord + Clone, C: Coeff> Neg for &Poly<V, C> {
    type Output = Poly<V, C>;
    fn neg(self) -> Poly<V, C> {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl<V: Ord + Clone, C: Coeff> $tr for Poly<V, C> {
            type Output = Poly<V, C>;
            fn $f(self, rhs: Self) -> Poly<V, C> {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<V: Ord + Clone, C: Coeff> Neg for Poly<V, C> {
    type Output = Poly<V, C>;
    fn neg(self) -> Poly<V, C> {
        -(&self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};

    type P = Poly<&'static str, Rational>;

    fn x() -> P {
        P::var("x")
    }
    fn y() -> P {
        P::var("y")
    }

    #[test]
    fn difference_of_squares_factors() {
        let lhs = &(&x() * &x()) - &(&y() * &y());
        let rhs = &(&x() - &y()) * &(&x() + &y());
        assert_eq!(lhs, rhs);
        assert!((&lhs - &rhs).is_zero());
    }

    #[test]
    fn derivative_of_power() {
        let p = (&x() + &P::one()).pow(3);
        let dp = p.derivative(&"x");
        let expected = (&x() + &P::one()).pow(2).scale(&Rational::from_int(3));
        assert_eq!(dp, expected);
        assert!(p.derivative(&"y").is_zero());
    }

    #[test]
    fn laurent_exponents_cancel() {
        let inv = P::term(Rational::from_int(1), Monomial::var("x", -1));
        assert_eq!(&inv * &x(), P::one());
        assert_eq!(inv.derivative(&"x"), P::term(ratio(-1, 1), Monomial::var("x", -2)));
    }

    #[test]
    fn collect_in_variable() {
        let p = &(&x() * &y()) + &(&x() + &P::constant(ratio(1, 2)));
        let parts = p.collect_in(&"x");
        assert_eq!(parts[&1], &y() + &P::one());
        assert_eq!(parts[&0], P::constant(ratio(1, 2)));
    }
}
