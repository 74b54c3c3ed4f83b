// SPDX-License-Identifier: Apache-2.0

//! Poisson bivectors on a coordinate chart.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Rational;
use crate::symbolic::Expression;

/// Name of the formal pencil parameter.
pub const PENCIL_PARAMETER: &str = "lambda";

/// Antisymmetric bivector `Π^{ij}` with expression entries.
///
/// Only the strictly upper-triangular, nonzero entries are stored, so
/// antisymmetry holds by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct PoissonStructure {
    coords: Vec<String>,
    params: Vec<String>,
    upper: BTreeMap<(usize, usize), Expression>,
    verified: bool,
}

/// How two bivectors are combined into a one-parameter family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PencilMode {
    /// `Π₁ − λΠ₀`
    Difference,
    /// `(1−λ)Π₀ + λΠ₁`
    Convex,
}

impl FromStr for PencilMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "difference" => Ok(PencilMode::Difference),
            "convex" => Ok(PencilMode::Convex),
            other => Err(Error::InvalidInput(format!("unknown pencil mode `{other}`"))),
        }
    }
}

impl fmt::Display for PencilMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PencilMode::Difference => "difference",
            PencilMode::Convex => "convex",
        })
    }
}

impl PoissonStructure {
    /// Builds a bivector from entries `{a, b} = e`. Entries with `a` after `b`
    /// in chart order are stored negated; repeated pairs are an error.
    pub fn new<S: AsRef<str>>(
        coords: &[S],
        params: &[S],
        entries: impl IntoIterator<Item = (String, String, Expression)>,
    ) -> Result<Self> {
        let coords: Vec<String> = coords.iter().map(|s| s.as_ref().to_string()).collect();
        let params: Vec<String> = params.iter().map(|s| s.as_ref().to_string()).collect();
        let mut seen = BTreeSet::new();
        for name in coords.iter().chain(&params) {
            if !seen.insert(name.clone()) {
                return Err(Error::InvalidInput(format!("duplicate name `{name}` in chart")));
            }
        }
        let mut out = PoissonStructure { coords, params, upper: BTreeMap::new(), verified: false };
        for (a, b, e) in entries {
            let i = out.index_of(&a).ok_or_else(|| Error::UnknownSymbol(format!("{a} in bracket {{{a},{b}}}")))?;
            let j = out.index_of(&b).ok_or_else(|| Error::UnknownSymbol(format!("{b} in bracket {{{a},{b}}}")))?;
            if let Some(s) = e.symbols().into_iter().find(|s| !out.knows(s)) {
                return Err(Error::UnknownSymbol(format!("{s} in bracket {{{a},{b}}}")));
            }
            if i == j {
                if !e.is_zero()? {
                    return Err(Error::InvalidInput(format!("diagonal entry {{{a},{a}}} must vanish")));
                }
                continue;
            }
            let (key, value) = if i < j { ((i, j), e) } else { ((j, i), -e) };
            if out.upper.contains_key(&key) {
                return Err(Error::InvalidInput(format!("bracket {{{a},{b}}} given twice")));
            }
            let value = value.simplify();
            if !value.is_literal_zero() {
                out.upper.insert(key, value);
            }
        }
        Ok(out)
    }

    /// Canonical structure `{x_k, p_k} = 1` on `(x_1..x_n, p_1..p_n)`.
    pub fn canonical<S: AsRef<str>>(positions: &[S], momenta: &[S]) -> Result<Self> {
        if positions.len() != momenta.len() {
            return Err(Error::DimensionMismatch { expected: positions.len(), found: momenta.len() });
        }
        let coords: Vec<&str> = positions.iter().chain(momenta).map(|s| s.as_ref()).collect();
        let entries = positions
            .iter()
            .zip(momenta)
            .map(|(x, p)| (x.as_ref().to_string(), p.as_ref().to_string(), Expression::one()));
        Self::new(&coords, &[], entries)
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    fn index_of(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| c == name)
    }

    fn knows(&self, name: &str) -> bool {
        self.coords.iter().chain(&self.params).any(|c| c == name)
    }

    /// `Π^{ij}` with antisymmetry applied.
    pub fn component(&self, i: usize, j: usize) -> Expression {
        use std::cmp::Ordering;
        match i.cmp(&j) {
            Ordering::Less => self.upper.get(&(i, j)).cloned().unwrap_or_else(Expression::zero),
            Ordering::Greater => self.upper.get(&(j, i)).map(|e| (-e.clone()).simplify()).unwrap_or_else(Expression::zero),
            Ordering::Equal => Expression::zero(),
        }
    }

    /// Stored nonzero entries `(a, b, Π^{ab})` with `a` before `b`.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &str, &Expression)> {
        self.upper.iter().map(|((i, j), e)| (self.coords[*i].as_str(), self.coords[*j].as_str(), e))
    }

    fn check_symbols(&self, f: &Expression) -> Result<()> {
        match f.symbols().into_iter().find(|s| !self.knows(s)) {
            Some(s) => Err(Error::UnknownSymbol(s)),
            None => Ok(()),
        }
    }

    /// `{f, g} = Σ_{i<j} Π^{ij} (∂_i f ∂_j g − ∂_j f ∂_i g)`, simplified.
    pub fn bracket(&self, f: &Expression, g: &Expression) -> Result<Expression> {
        self.check_symbols(f)?;
        self.check_symbols(g)?;
        let df: Vec<Expression> = self.coords.iter().map(|c| f.differentiate(c)).collect();
        let dg: Vec<Expression> = self.coords.iter().map(|c| g.differentiate(c)).collect();
        let mut terms = Vec::new();
        for ((i, j), pij) in &self.upper {
            let cross = &(&df[*i] * &dg[*j]) - &(&df[*j] * &dg[*i]);
            terms.push(pij * &cross);
        }
        Ok(Expression::sum(terms).simplify())
    }

    /// Cyclic sum `{f,{g,h}} + {g,{h,f}} + {h,{f,g}}`.
    pub fn jacobiator(&self, f: &Expression, g: &Expression, h: &Expression) -> Result<Expression> {
        let a = self.bracket(f, &self.bracket(g, h)?)?;
        let b = self.bracket(g, &self.bracket(h, f)?)?;
        let c = self.bracket(h, &self.bracket(f, g)?)?;
        Ok(Expression::sum([a, b, c]).simplify())
    }

    /// Jacobiators on every coordinate triple `i<j<k`, labelled by names.
    pub fn coordinate_jacobiators(&self) -> Result<Vec<((String, String, String), Expression)>> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let [a, b, c] = [i, j, k].map(|t| Expression::symbol(self.coords[t].clone()));
                    let value = self.jacobiator(&a, &b, &c)?;
                    out.push(((self.coords[i].clone(), self.coords[j].clone(), self.coords[k].clone()), value));
                }
            }
        }
        Ok(out)
    }

    /// Checks the Jacobi identity on all coordinate triples and sets the
    /// verified flag on success.
    pub fn verify(mut self) -> Result<Self> {
        for (triple, value) in self.coordinate_jacobiators()? {
            if !value.is_zero()? {
                return Err(Error::InvalidInput(format!(
                    "Jacobi identity fails on {triple:?}: {value}"
                )));
            }
        }
        self.verified = true;
        Ok(self)
    }

    /// Components `X^i = {x^i, H}` in chart order.
    pub fn hamiltonian_vector_field(&self, h: &Expression) -> Result<Vec<Expression>> {
        self.coords.iter().map(|c| self.bracket(&Expression::symbol(c.clone()), h)).collect()
    }

    /// Componentwise sum `a·self + b·other` on a shared chart.
    pub fn combine(&self, a: &Expression, other: &PoissonStructure, b: &Expression) -> Result<Self> {
        if self.coords != other.coords {
            return Err(Error::ChartMismatch(format!("{:?} vs {:?}", self.coords, other.coords)));
        }
        let mut params = self.params.clone();
        for p in other.params.iter().chain(a.symbols().iter()).chain(b.symbols().iter()) {
            if !params.contains(p) && !self.coords.contains(p) {
                params.push(p.clone());
            }
        }
        let keys: BTreeSet<(usize, usize)> = self.upper.keys().chain(other.upper.keys()).copied().collect();
        let mut upper = BTreeMap::new();
        for key in keys {
            let lhs = self.upper.get(&key).cloned().unwrap_or_else(Expression::zero);
            let rhs = other.upper.get(&key).cloned().unwrap_or_else(Expression::zero);
            let value = (a * &lhs + b * &rhs).simplify();
            if !value.is_literal_zero() {
                upper.insert(key, value);
            }
        }
        Ok(PoissonStructure { coords: self.coords.clone(), params, upper, verified: false })
    }

    /// Pencil of `self = Π₀` and `p1 = Π₁` with the formal parameter `lambda`.
    pub fn build_pencil(&self, p1: &PoissonStructure, mode: PencilMode) -> Result<Self> {
        let lambda = Expression::symbol(PENCIL_PARAMETER);
        match mode {
            PencilMode::Difference => p1.combine(&Expression::one(), self, &(-lambda)),
            PencilMode::Convex => self.combine(&(Expression::one() - lambda.clone()), p1, &lambda),
        }
    }

    /// Substitutes values for parameters in every component.
    pub fn substitute_params(&self, bindings: &BTreeMap<String, Expression>) -> Self {
        let upper = self
            .upper
            .iter()
            .map(|(k, e)| (*k, e.restrict(bindings)))
            .filter(|(_, e)| !e.is_literal_zero())
            .collect();
        let params = self.params.iter().filter(|p| !bindings.contains_key(*p)).cloned().collect();
        PoissonStructure { coords: self.coords.clone(), params, upper, verified: false }
    }

    /// Componentwise difference, for structural comparisons.
    pub fn difference(&self, other: &PoissonStructure) -> Result<Vec<Expression>> {
        let d = self.combine(&Expression::one(), other, &Expression::int(-1))?;
        Ok(d.upper.into_values().collect())
    }

    /// `Π^{ij}` with every entry scaled by a rational.
    pub fn scaled(&self, c: &Rational) -> Self {
        let k = Expression::rational(c.clone());
        let upper = self
            .upper
            .iter()
            .map(|(key, e)| (*key, (&k * e).simplify()))
            .filter(|(_, e)| !e.is_literal_zero())
            .collect();
        PoissonStructure { coords: self.coords.clone(), params: self.params.clone(), upper, verified: false }
    }
}

impl fmt::Display for PoissonStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries().map(|(a, b, e)| format!("{{{a},{b}}} = {e}")).collect();
        write!(f, "{}", parts.join(", "))
    }
}
