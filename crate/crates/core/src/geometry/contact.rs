// SPDX-License-Identifier: Apache-2.0

//! Contact charts, the Jacobi bracket and contact Hamiltonian flows.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::Rational;
use crate::symbolic::Expression;

/// A coordinate chart carrying a contact form `α`, its Reeb field `R` and the
/// Jacobi bivector `Λ` (upper-triangular entries).
#[derive(Clone, Debug, PartialEq)]
pub struct ContactChart {
    coords: Vec<String>,
    alpha: Vec<Expression>,
    reeb: Vec<Expression>,
    lambda: BTreeMap<(usize, usize), Expression>,
    standard: bool,
}

/// Result of [`ContactChart::contact_nondegeneracy`].
#[derive(Clone, Debug, PartialEq)]
pub struct Nondegeneracy {
    /// Coefficient of `α∧dα` against `dx¹∧dx²∧dx³`.
    pub coefficient: Expression,
    /// Set when the coefficient is a constant.
    pub constant: Option<Rational>,
    /// Values of the coefficient at the samples, in order.
    pub values: Vec<f64>,
    pub nonzero_everywhere: bool,
}

impl ContactChart {
    /// Chart `(q, p, z)` with `α = dz − p dq`, `R = ∂_z`, `Λ^{qp} = 1`, `Λ^{pz} = −p`.
    pub fn standard() -> Self {
        let coords = vec!["q".to_string(), "p".to_string(), "z".to_string()];
        let alpha = vec![Expression::parse("-p").unwrap(), Expression::zero(), Expression::one()];
        let reeb = vec![Expression::zero(), Expression::zero(), Expression::one()];
        let mut lambda = BTreeMap::new();
        lambda.insert((0, 1), Expression::one());
        lambda.insert((1, 2), Expression::parse("-p").unwrap());
        ContactChart { coords, alpha, reeb, lambda, standard: true }
    }

    /// General chart. Checks that `α(R) = 1` and `ι_R dα = 0` symbolically.
    /// Flows are only available on [`ContactChart::standard`].
    pub fn new<S: AsRef<str>>(
        coords: &[S],
        alpha: Vec<Expression>,
        reeb: Vec<Expression>,
        lambda: impl IntoIterator<Item = (String, String, Expression)>,
    ) -> Result<Self> {
        let coords: Vec<String> = coords.iter().map(|s| s.as_ref().to_string()).collect();
        let n = coords.len();
        if n % 2 == 0 {
            return Err(Error::InvalidInput(format!("contact chart needs odd dimension, got {n}")));
        }
        for v in [&alpha, &reeb] {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: v.len() });
            }
        }
        let mut chart = ContactChart { coords, alpha, reeb, lambda: BTreeMap::new(), standard: false };
        for e in chart.alpha.iter().chain(&chart.reeb) {
            chart.check_symbols(e)?;
        }
        for (a, b, e) in lambda {
            let i = chart.index_of(&a)?;
            let j = chart.index_of(&b)?;
            chart.check_symbols(&e)?;
            if i == j {
                continue;
            }
            let (key, value) = if i < j { ((i, j), e) } else { ((j, i), -e) };
            let value = value.simplify();
            if !value.is_literal_zero() {
                chart.lambda.insert(key, value);
            }
        }
        let pairing = Expression::sum(chart.alpha.iter().zip(&chart.reeb).map(|(a, r)| a * r));
        if !(pairing - Expression::one()).is_zero()? {
            return Err(Error::InvalidInput("α(R) is not 1".into()));
        }
        for (j, contraction) in chart.reeb_contraction().into_iter().enumerate() {
            if !contraction.is_zero()? {
                return Err(Error::InvalidInput(format!(
                    "ι_R dα has nonzero component along {}",
                    chart.coords[j]
                )));
            }
        }
        Ok(chart)
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn alpha(&self) -> &[Expression] {
        &self.alpha
    }

    pub fn reeb(&self) -> &[Expression] {
        &self.reeb
    }

    pub fn lambda_entries(&self) -> impl Iterator<Item = (&str, &str, &Expression)> {
        self.lambda.iter().map(|((i, j), e)| (self.coords[*i].as_str(), self.coords[*j].as_str(), e))
    }

    pub fn is_standard(&self) -> bool {
        self.standard
    }

    fn index_of(&self, name: &str) -> Result<usize> {
        self.coords
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::ChartMismatch(format!("`{name}` is not a coordinate of {:?}", self.coords)))
    }

    fn check_symbols(&self, e: &Expression) -> Result<()> {
        for s in e.symbols() {
            self.index_of(&s)?;
        }
        Ok(())
    }

    fn d_alpha(&self, i: usize, j: usize) -> Expression {
        &self.alpha[j].differentiate(&self.coords[i]) - &self.alpha[i].differentiate(&self.coords[j])
    }

    fn reeb_contraction(&self) -> Vec<Expression> {
        let n = self.coords.len();
        (0..n)
            .map(|j| Expression::sum((0..n).map(|i| &self.reeb[i] * &self.d_alpha(i, j))))
            .collect()
    }

    /// `R(f)`.
    pub fn reeb_derivative(&self, f: &Expression) -> Result<Expression> {
        self.check_symbols(f)?;
        Ok(apply_field(&self.reeb, &self.coords, f))
    }

    /// `{f,g}_α = Λ(df,dg) + f R(g) − g R(f)`.
    pub fn jacobi_bracket(&self, f: &Expression, g: &Expression) -> Result<Expression> {
        self.check_symbols(f)?;
        self.check_symbols(g)?;
        let df: Vec<Expression> = self.coords.iter().map(|c| f.differentiate(c)).collect();
        let dg: Vec<Expression> = self.coords.iter().map(|c| g.differentiate(c)).collect();
        let mut terms = Vec::new();
        for ((i, j), l) in &self.lambda {
            terms.push(l * &(&(&df[*i] * &dg[*j]) - &(&df[*j] * &dg[*i])));
        }
        let rf = apply_field(&self.reeb, &self.coords, f);
        let rg = apply_field(&self.reeb, &self.coords, g);
        terms.push(f * &rg);
        terms.push(-(g * &rf));
        Ok(Expression::sum(terms).simplify())
    }

    /// `X_h = (−h_p, h_q + p h_z, h − p h_p)` on the standard chart.
    pub fn contact_vector_field(&self, h: &Expression) -> Result<Vec<Expression>> {
        if !self.standard {
            return Err(Error::Unsupported(
                "contact vector fields are only implemented on the standard (q,p,z) chart".into(),
            ));
        }
        self.check_symbols(h)?;
        let p = Expression::symbol("p");
        let hq = h.differentiate("q");
        let hp = h.differentiate("p");
        let hz = h.differentiate("z");
        Ok(vec![
            (-hp.clone()).simplify(),
            (hq + &p * &hz).simplify(),
            (h - &(&p * &hp)).simplify(),
        ])
    }

    /// `true` iff `{I, h}_α` is zero.
    pub fn dissipated_quantity_check(&self, h: &Expression, integral: &Expression) -> Result<bool> {
        self.jacobi_bracket(integral, h)?.is_zero()
    }

    /// Coefficient of `α∧dα` in three dimensions (`α·curl α`), with its values
    /// at the sample points (given in chart order).
    pub fn contact_nondegeneracy(&self, samples: &[Vec<f64>]) -> Result<Nondegeneracy> {
        if self.coords.len() != 3 {
            return Err(Error::Unsupported(format!(
                "nondegeneracy coefficient needs a 3-dimensional chart, got {}",
                self.coords.len()
            )));
        }
        // curl α = (dα_{12}, dα_{20}, dα_{01}) with dα_{ij} = ∂_i α_j − ∂_j α_i
        let curl = [self.d_alpha(1, 2), self.d_alpha(2, 0), self.d_alpha(0, 1)];
        let coefficient = Expression::sum(self.alpha.iter().zip(&curl).map(|(a, c)| a * c)).simplify();
        let constant = coefficient.as_const().cloned();
        let mut values = Vec::with_capacity(samples.len());
        for point in samples {
            values.push(eval_point(&coefficient, &self.coords, point)?);
        }
        let nonzero_everywhere = match &constant {
            Some(c) => !num_traits::Zero::is_zero(c),
            None => values.iter().all(|v| v.abs() > 1e-12),
        };
        Ok(Nondegeneracy { coefficient, constant, values, nonzero_everywhere })
    }
}

/// `X(f) = Σ X^i ∂_i f`, simplified.
pub fn apply_field<S: AsRef<str>>(field: &[Expression], coords: &[S], f: &Expression) -> Expression {
    Expression::sum(field.iter().zip(coords).map(|(x, c)| x * &f.differentiate(c.as_ref()))).simplify()
}

/// Evaluates `f` at a point given in chart order.
pub fn eval_point<S: AsRef<str>>(f: &Expression, coords: &[S], point: &[f64]) -> Result<f64> {
    if point.len() != coords.len() {
        return Err(Error::DimensionMismatch { expected: coords.len(), found: point.len() });
    }
    f.eval(&|s: &str| coords.iter().position(|c| c.as_ref() == s).map(|i| point[i]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn p(s: &str) -> Expression {
        Expression::parse(s).unwrap()
    }

    #[test]
    fn standard_chart_validates() {
        let c = ContactChart::standard();
        let rebuilt = ContactChart::new(
            c.coords(),
            c.alpha().to_vec(),
            c.reeb().to_vec(),
            c.lambda_entries().map(|(a, b, e)| (a.to_string(), b.to_string(), e.clone())).collect::<Vec<_>>(),
        )
        .unwrap();
        assert_eq!(rebuilt.jacobi_bracket(&p("q"), &p("p")).unwrap(), p("1"));
        let n = c.contact_nondegeneracy(&[vec![0.0, 0.0, 0.0]]).unwrap();
        assert_eq!(n.constant, Some(ratio(1, 1)));
        assert!(n.nonzero_everywhere);
    }

    #[test]
    fn wrong_reeb_field_is_rejected() {
        let r = ContactChart::new(&["q", "p", "z"], vec![p("-p"), p("0"), p("1")], vec![p("1"), p("0"), p("0")], []);
        assert!(r.is_err());
    }

    #[test]
    fn flow_matches_bracket_identity() {
        // X_h(g) = {h,g}_α + g R(h)
        let c = ContactChart::standard();
        for (h, g) in [("z - p", "q*p"), ("q^2*z + p", "z^3 - q"), ("p*z", "exp(-z)")] {
            let (h, g) = (p(h), p(g));
            let x = c.contact_vector_field(&h).unwrap();
            let lhs = apply_field(&x, c.coords(), &g);
            let rhs = c.jacobi_bracket(&h, &g).unwrap() + &g * &c.reeb_derivative(&h).unwrap();
            assert!((lhs - rhs).is_zero().unwrap());
        }
    }

    #[test]
    fn unit_brackets_give_reeb_derivative() {
        let c = ContactChart::standard();
        let f = p("q*z^2 + p");
        let rf = c.reeb_derivative(&f).unwrap();
        assert_eq!(rf, p("2*q*z"));
        assert!((c.jacobi_bracket(&f, &Expression::one()).unwrap() + rf.clone()).is_zero().unwrap());
        assert!((c.jacobi_bracket(&Expression::one(), &f).unwrap() - rf).is_zero().unwrap());
    }

    #[test]
    fn general_chart_has_no_flow() {
        let c = ContactChart::new(&["x", "y", "z"], vec![p("y"), p("-x"), p("1")], vec![p("0"), p("0"), p("1")], [])
            .unwrap();
        assert!(matches!(c.contact_vector_field(&p("z")), Err(Error::Unsupported(_))));
        let n = c.contact_nondegeneracy(&[vec![0.0, 0.0, 0.0]]).unwrap();
        assert_eq!(n.constant, Some(ratio(-2, 1)));
    }

    #[test]
    fn degenerate_form() {
        let c = ContactChart::new(&["q", "p", "z"], vec![p("0"), p("0"), p("1")], vec![p("0"), p("0"), p("1")], [])
            .unwrap();
        let n = c.contact_nondegeneracy(&[vec![1.0, 2.0, 3.0]]).unwrap();
        assert!(!n.nonzero_everywhere);
        assert!(n.coefficient.is_literal_zero());
    }

    #[test]
    fn foreign_symbols_are_chart_mismatch() {
        let c = ContactChart::standard();
        assert!(matches!(c.jacobi_bracket(&p("m1"), &p("q")), Err(Error::ChartMismatch(_))));
    }
}
