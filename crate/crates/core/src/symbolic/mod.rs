// SPDX-License-Identifier: Apache-2.0

//! Exact symbolic scalar expressions.
//!
//! [`Expression`] is a small expression tree over exact rationals, named
//! symbols (coordinates and formal parameters alike), sums, products,
//! integer powers, `exp` and `sqrt`. Constructors fold constants and flatten
//! nested sums/products but do not canonicalize; [`Expression::simplify`] and
//! the zero test go through the normal form in [`normal`].

mod normal;
mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Float, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Coeff, Rational};

pub use normal::{Generator, NormalForm, ZeroVerdict};
pub use parse::parse_expression;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expression {
    Const(Rational),
    Symbol(String),
    Sum(Vec<Expression>),
    Product(Vec<Expression>),
    Power(Box<Expression>, i32),
    Exp(Box<Expression>),
    Sqrt(Box<Expression>),
}

impl Expression {
    pub fn zero() -> Self {
        Expression::Const(Rational::zero())
    }

    pub fn one() -> Self {
        Expression::Const(Rational::one())
    }

    pub fn int(n: i64) -> Self {
        Expression::Const(Rational::from_int(n))
    }

    pub fn rational(r: Rational) -> Self {
        Expression::Const(r)
    }

    pub fn symbol(name: impl Into<String>) -> Self {
        Expression::Symbol(name.into())
    }

    /// Parses the plain-text grammar (see [`parse_expression`]).
    pub fn parse(text: &str) -> Result<Self> {
        parse_expression(text)
    }

    pub fn as_const(&self) -> Option<&Rational> {
        match self {
            Expression::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_literal_zero(&self) -> bool {
        matches!(self, Expression::Const(c) if c.is_zero())
    }

    /// Flattening, constant-folding sum.
    pub fn sum(items: impl IntoIterator<Item = Expression>) -> Self {
        let mut constant = Rational::zero();
        let mut rest = Vec::new();
        for item in items {
            match item {
                Expression::Const(c) => constant += c,
                Expression::Sum(inner) => {
                    for e in inner {
                        match e {
                            Expression::Const(c) => constant += c,
                            other => rest.push(other),
                        }
                    }
                }
                other => rest.push(other),
            }
        }
        if !constant.is_zero() {
            rest.insert(0, Expression::Const(constant));
        }
        match rest.len() {
            0 => Expression::zero(),
            1 => rest.pop().unwrap(),
            _ => Expression::Sum(rest),
        }
    }

    /// Flattening, constant-folding product.
    pub fn product(items: impl IntoIterator<Item = Expression>) -> Self {
        let mut constant = Rational::one();
        let mut rest = Vec::new();
        for item in items {
            match item {
                Expression::Const(c) => constant *= c,
                Expression::Product(inner) => {
                    for e in inner {
                        match e {
                            Expression::Const(c) => constant *= c,
                            other => rest.push(other),
                        }
                    }
                }
                other => rest.push(other),
            }
        }
        if constant.is_zero() {
            return Expression::zero();
        }
        if rest.is_empty() {
            return Expression::Const(constant);
        }
        if !constant.is_one() {
            rest.insert(0, Expression::Const(constant));
        }
        if rest.len() == 1 {
            rest.pop().unwrap()
        } else {
            Expression::Product(rest)
        }
    }

    pub fn pow(self, k: i32) -> Self {
        match (self, k) {
            (_, 0) => Expression::one(),
            (e, 1) => e,
            (Expression::Const(c), k) if !(c.is_zero() && k < 0) => {
                Expression::Const(num_traits::pow::Pow::pow(&c, k))
            }
            (Expression::Power(b, j), k) => b.pow(j * k),
            (e, k) => Expression::Power(Box::new(e), k),
        }
    }

    pub fn exp(self) -> Self {
        if self.is_literal_zero() {
            Expression::one()
        } else {
            Expression::Exp(Box::new(self))
        }
    }

    pub fn sqrt(self) -> Self {
        if let Expression::Const(c) = &self {
            if let Some(r) = normal::rational_sqrt(c) {
                return Expression::Const(r);
            }
        }
        Expression::Sqrt(Box::new(self))
    }

    /// All symbol names that occur in the expression.
    pub fn symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<String>) {
        match self {
            Expression::Const(_) => {}
            Expression::Symbol(s) => {
                out.insert(s.clone());
            }
            Expression::Sum(v) | Expression::Product(v) => {
                v.iter().for_each(|e| e.collect_symbols(out));
            }
            Expression::Power(b, _) => b.collect_symbols(out),
            Expression::Exp(a) | Expression::Sqrt(a) => a.collect_symbols(out),
        }
    }

    pub fn depends_on(&self, name: &str) -> bool {
        match self {
            Expression::Const(_) => false,
            Expression::Symbol(s) => s == name,
            Expression::Sum(v) | Expression::Product(v) => v.iter().any(|e| e.depends_on(name)),
            Expression::Power(b, _) => b.depends_on(name),
            Expression::Exp(a) | Expression::Sqrt(a) => a.depends_on(name),
        }
    }

    /// Exact partial derivative with respect to the symbol `var`.
    ///
    /// The result is not simplified; call [`Expression::simplify`] for a
    /// canonical form.
    pub fn differentiate(&self, var: &str) -> Expression {
        if !self.depends_on(var) {
            return Expression::zero();
        }
        match self {
            Expression::Const(_) => Expression::zero(),
            Expression::Symbol(s) => {
                if s == var {
                    Expression::one()
                } else {
                    Expression::zero()
                }
            }
            Expression::Sum(items) => Expression::sum(items.iter().map(|e| e.differentiate(var))),
            Expression::Product(items) => {
                let mut terms = Vec::with_capacity(items.len());
                for (i, factor) in items.iter().enumerate() {
                    let d = factor.differentiate(var);
                    if d.is_literal_zero() {
                        continue;
                    }
                    let mut factors: Vec<Expression> = items.clone();
                    factors[i] = d;
                    terms.push(Expression::product(factors));
                }
                Expression::sum(terms)
            }
            Expression::Power(base, k) => Expression::product([
                Expression::int(*k as i64),
                base.as_ref().clone().pow(k - 1),
                base.differentiate(var),
            ]),
            Expression::Exp(arg) => Expression::product([self.clone(), arg.differentiate(var)]),
            Expression::Sqrt(arg) => Expression::product([
                Expression::Const(crate::scalar::ratio(1, 2)),
                arg.differentiate(var),
                self.clone().pow(-1),
            ]),
        }
    }

    /// Replaces symbols by expressions, then simplifies.
    pub fn restrict(&self, bindings: &BTreeMap<String, Expression>) -> Expression {
        self.substitute(bindings).simplify()
    }

    /// Replaces symbols by expressions without simplifying.
    pub fn substitute(&self, bindings: &BTreeMap<String, Expression>) -> Expression {
        match self {
            Expression::Const(_) => self.clone(),
            Expression::Symbol(s) => bindings.get(s).cloned().unwrap_or_else(|| self.clone()),
            Expression::Sum(v) => Expression::sum(v.iter().map(|e| e.substitute(bindings))),
            Expression::Product(v) => Expression::product(v.iter().map(|e| e.substitute(bindings))),
            Expression::Power(b, k) => b.substitute(bindings).pow(*k),
            Expression::Exp(a) => a.substitute(bindings).exp(),
            Expression::Sqrt(a) => a.substitute(bindings).sqrt(),
        }
    }

    /// Numerical evaluation; every symbol must be bound by `env`.
    pub fn eval<T: Float>(&self, env: &dyn Fn(&str) -> Option<T>) -> Result<T> {
        let v = match self {
            Expression::Const(c) => rational_to_float(c)?,
            Expression::Symbol(s) => env(s).ok_or_else(|| Error::UnknownSymbol(s.clone()))?,
            Expression::Sum(items) => {
                let mut acc = T::zero();
                for e in items {
                    acc = acc + e.eval(env)?;
                }
                acc
            }
            Expression::Product(items) => {
                let mut acc = T::one();
                for e in items {
                    acc = acc * e.eval(env)?;
                }
                acc
            }
            Expression::Power(b, k) => b.eval(env)?.powi(*k),
            Expression::Exp(a) => a.eval(env)?.exp(),
            Expression::Sqrt(a) => {
                let x = a.eval(env)?;
                if x < T::zero() {
                    return Err(Error::Evaluation("square root of a negative number".into()));
                }
                x.sqrt()
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Evaluation(format!("non-finite value while evaluating `{self}`")))
        }
    }

    /// Evaluates at a point given as `(name, value)` pairs.
    pub fn eval_at(&self, point: &[(&str, f64)]) -> Result<f64> {
        self.eval(&|s: &str| point.iter().find(|(n, _)| *n == s).map(|(_, v)| *v))
    }

    pub fn normal_form(&self) -> NormalForm {
        NormalForm::from_expression(self)
    }

    /// Canonical simplification through the normal form.
    pub fn simplify(&self) -> Expression {
        self.normal_form().to_expression()
    }

    /// Structural zero test with randomized evaluation fallback.
    pub fn zero_test(&self) -> ZeroVerdict {
        self.normal_form().zero_test()
    }

    /// `true` iff the expression simplifies to zero; inconclusive tests are errors.
    pub fn is_zero(&self) -> Result<bool> {
        match self.zero_test() {
            ZeroVerdict::Inconclusive => {
                Err(Error::Inconclusive(format!("no admissible sample point for `{self}`")))
            }
            v => Ok(v.is_zero()),
        }
    }

    fn is_negative_product(&self) -> bool {
        match self {
            Expression::Const(c) => c.is_negative(),
            Expression::Product(v) => v.first().and_then(Expression::as_const).is_some_and(|c| c.is_negative()),
            _ => false,
        }
    }
}

fn rational_to_float<T: Float>(c: &Rational) -> Result<T> {
    let v = c.to_f64().ok_or_else(|| Error::Evaluation(format!("rational {c} out of range")))?;
    T::from(v).ok_or_else(|| Error::Evaluation(format!("rational {c} not representable")))
}

impl From<i64> for Expression {
    fn from(n: i64) -> Self {
        Expression::int(n)
    }
}

impl From<Rational> for Expression {
    fn from(r: Rational) -> Self {
        Expression::Const(r)
    }
}

impl From<&str> for Expression {
    fn from(name: &str) -> Self {
        Expression::symbol(name)
    }
}

impl Add for Expression {
    type Output = Expression;
    fn add(self, rhs: Expression) -> Expression {
        Expression::sum([self, rhs])
    }
}

impl Sub for Expression {
    type Output = Expression;
    fn sub(self, rhs: Expression) -> Expression {
        Expression::sum([self, -rhs])
    }
}

impl Mul for Expression {
    type Output = Expression;
    fn mul(self, rhs: Expression) -> Expression {
        Expression::product([self, rhs])
    }
}

impl Neg for Expression {
    type Output = Expression;
    fn neg(self) -> Expression {
        Expression::product([Expression::int(-1), self])
    }
}

impl<'a> Add for &'a Expression {
    type Output = Expression;
    fn add(self, rhs: &'a Expression) -> Expression {
        self.clone() + rhs.clone()
    }
}

impl<'a> Sub for &'a Expression {
    type Output = Expression;
    fn sub(self, rhs: &'a Expression) -> Expression {
        self.clone() - rhs.clone()
    }
}

impl<'a> Mul for &'a Expression {
    type Output = Expression;
    fn mul(self, rhs: &'a Expression) -> Expression {
        self.clone() * rhs.clone()
    }
}

// Printing precedence: sum < product < power/atom.
fn fmt_prec(e: &Expression, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        Expression::Const(c) => {
            let needs_parens = (prec >= 1 && c.is_negative()) || (prec >= 2 && !c.is_integer());
            if needs_parens {
                write!(f, "({c})")
            } else {
                write!(f, "{c}")
            }
        }
        Expression::Symbol(s) => write!(f, "{s}"),
        Expression::Sum(items) => {
            if prec > 0 {
                write!(f, "(")?;
            }
            for (i, item) in items.iter().enumerate() {
                if i == 0 {
                    fmt_prec(item, 0, f)?;
                } else if item.is_negative_product() {
                    write!(f, " - ")?;
                    fmt_prec(&negate_leading(item), 1, f)?;
                } else {
                    write!(f, " + ")?;
                    fmt_prec(item, 1, f)?;
                }
            }
            if prec > 0 {
                write!(f, ")")?;
            }
            Ok(())
        }
        Expression::Product(items) => {
            let mut rest: &[Expression] = items;
            let parens = prec >= 2;
            if parens {
                write!(f, "(")?;
            }
            if let Some(Expression::Const(c)) = items.first() {
                if (-c.clone()).is_one() {
                    write!(f, "-")?;
                    rest = &items[1..];
                } else if c.is_negative() {
                    write!(f, "-")?;
                    fmt_prec(&Expression::Const(-c.clone()), 1, f)?;
                    write!(f, "*")?;
                    rest = &items[1..];
                }
            }
            for (i, item) in rest.iter().enumerate() {
                if i > 0 {
                    write!(f, "*")?;
                }
                fmt_prec(item, 2, f)?;
            }
            if parens {
                write!(f, ")")?;
            }
            Ok(())
        }
        Expression::Power(b, k) => {
            fmt_prec(b, 3, f)?;
            if *k < 0 {
                write!(f, "^({k})")
            } else {
                write!(f, "^{k}")
            }
        }
        Expression::Exp(a) => {
            write!(f, "exp(")?;
            fmt_prec(a, 0, f)?;
            write!(f, ")")
        }
        Expression::Sqrt(a) => {
            write!(f, "sqrt(")?;
            fmt_prec(a, 0, f)?;
            write!(f, ")")
        }
    }
}

fn negate_leading(e: &Expression) -> Expression {
    match e {
        Expression::Const(c) => Expression::Const(-c.clone()),
        Expression::Product(items) => {
            let mut items = items.clone();
            if let Some(Expression::Const(c)) = items.first_mut() {
                *c = -c.clone();
            }
            Expression::product(items)
        }
        other => -other.clone(),
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_prec(self, 0, f)
    }
}

impl serde::Serialize for Expression {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Expression {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        Expression::parse(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn p(s: &str) -> Expression {
        Expression::parse(s).unwrap()
    }

    #[test]
    fn derivative_of_exp_is_chain_rule() {
        let d = p("exp(-z)").differentiate("z");
        assert!((d + p("exp(-z)")).is_zero().unwrap());
    }

    #[test]
    fn derivative_of_casimir_polynomial() {
        let d = p("m1^2 + m2*m3").differentiate("m1").simplify();
        assert_eq!(d, p("2*m1"));
    }

    #[test]
    fn derivative_of_sqrt() {
        let d = p("sqrt(1 + p^2)").differentiate("p");
        let expected = p("p/sqrt(1 + p^2)");
        assert!((d - expected).is_zero().unwrap());
    }

    #[test]
    fn independent_symbols_differentiate_to_zero() {
        assert!(p("exp(q)*sqrt(p)").differentiate("z").is_literal_zero());
        assert!(p("lambda*m1").differentiate("lambda").simplify() == p("m1"));
    }

    #[test]
    fn zero_test_examples() {
        assert!(p("exp(-z) - exp(-z)").is_zero().unwrap());
        assert!(p("m2^2 - m3^2 - (m2 - m3)*(m2 + m3)").is_zero().unwrap());
        assert!(!p("m1 + m2 + m3").is_zero().unwrap());
        // direct evaluation oracle for the nonzero case
        assert_eq!(p("m1 + m2 + m3").eval_at(&[("m1", 1.0), ("m2", 0.0), ("m3", 0.0)]).unwrap(), 1.0);
    }

    #[test]
    fn restrict_examples() {
        let lift = p("sqrt(m1^2 + m2^2 + m3^2)");
        let bind: BTreeMap<String, Expression> = [("m1".to_string(), Expression::one())].into();
        let restricted = lift.restrict(&bind);
        assert!((restricted - p("sqrt(1 + m2^2 + m3^2)")).is_zero().unwrap());

        let bind: BTreeMap<String, Expression> =
            [("p1".to_string(), p("-r*p")), ("r".to_string(), Expression::one())].into();
        let once = p("p1").restrict(&bind).restrict(&bind);
        assert_eq!(once, p("-p"));

        let c = Expression::Const(ratio(3, 7));
        assert_eq!(c.restrict(&bind), c);
    }

    #[test]
    fn display_is_reparseable() {
        for s in [
            "-1/2*(m1^2 + m2^2 + m3^2)",
            "(lambda - 1)*m3 - lambda*m2",
            "exp(-z)*r",
            "p*sqrt(1 + p^2)^(-1)",
            "x^3 - 3/2*hbar^2",
        ] {
            let e = p(s);
            let printed = e.to_string();
            assert_eq!(p(&printed), e, "{s} printed as {printed}");
        }
    }

    #[test]
    fn evaluation_rejects_negative_sqrt() {
        assert!(p("sqrt(x)").eval_at(&[("x", -1.0)]).is_err());
        assert!(p("x").eval_at(&[]).is_err());
    }
}
