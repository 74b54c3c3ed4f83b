// SPDX-License-Identifier: Apache-2.0

//! Chart-bound symbolic geometry: Poisson pencils, homogeneity, contact
//! brackets and the symplectization correspondence.

mod contact;
mod poisson;

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use contact::{apply_field, eval_point, ContactChart, Nondegeneracy};
pub use poisson::{PencilMode, PoissonStructure, PENCIL_PARAMETER};

use crate::error::{Error, Result};
use crate::scalar::Rational;
use crate::symbolic::Expression;

/// Singular values above this count towards the rank of a Jacobian.
pub const RANK_THRESHOLD: f64 = 1e-10;

/// Name of the radial coordinate of the symplectization.
pub const RADIAL: &str = "r";

/// Sign of the 1-homogeneous lift `f ↦ ±r·f`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LiftSign {
    #[default]
    Positive,
    Negative,
}

/// `±r·f`.
pub fn homogeneous_lift(f: &Expression, sign: LiftSign) -> Expression {
    let r = Expression::symbol(RADIAL);
    match sign {
        LiftSign::Positive => (r * f.clone()).simplify(),
        LiftSign::Negative => (-(r * f.clone())).simplify(),
    }
}

/// Poisson structure on `(q, p, z, r)` whose bracket of lifts restricts to
/// the Jacobi bracket of the standard chart: `{r f, r g} = r {f, g}_α`.
///
/// Nonzero entries: `{q,p} = 1/r`, `{p,z} = −p/r`, `{z,r} = −1`. For the
/// negative lift every entry changes sign.
pub fn symplectization(sign: LiftSign) -> PoissonStructure {
    let s = match sign {
        LiftSign::Positive => 1,
        LiftSign::Negative => -1,
    };
    let e = |text: &str| Expression::product([Expression::int(s), Expression::parse(text).unwrap()]);
    PoissonStructure::new(
        &["q", "p", "z", RADIAL],
        &[],
        [
            ("q".into(), "p".into(), e("r^(-1)")),
            ("p".into(), "z".into(), e("-p*r^(-1)")),
            ("z".into(), RADIAL.into(), e("-1")),
        ],
    )
    .expect("static structure is well formed")
}

/// `{f^Σ, g^Σ}|_{r=1} − ({f, g}_α)^Σ|_{r=1}` on the standard chart, simplified.
pub fn correspondence_residual(f: &Expression, g: &Expression, sign: LiftSign) -> Result<Expression> {
    let chart = ContactChart::standard();
    let omega = symplectization(sign);
    let lifted = omega.bracket(&homogeneous_lift(f, sign), &homogeneous_lift(g, sign))?;
    let expected = homogeneous_lift(&chart.jacobi_bracket(f, g)?, sign);
    let at_one: BTreeMap<String, Expression> = [(RADIAL.to_string(), Expression::one())].into();
    Ok((lifted - expected).restrict(&at_one))
}

/// Substitutes and simplifies; thin wrapper over [`Expression::restrict`].
pub fn restrict(f: &Expression, bindings: &[(&str, Expression)]) -> Expression {
    let map: BTreeMap<String, Expression> = bindings.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
    f.restrict(&map)
}

/// Rational `w` with `Δ(f) = w·f`, if one exists.
///
/// The candidate comes from matching the coefficient of one term of `f`; when
/// the normal forms do not line up (square roots of sums, reciprocals) it is
/// read off numerically and rounded to a small-denominator rational. Either
/// way the identity is confirmed by the zero test.
pub fn homogeneity_degree<S: AsRef<str>>(delta: &[Expression], coords: &[S], f: &Expression) -> Option<Rational> {
    let nf = f.normal_form();
    if nf.is_zero() || delta.len() != coords.len() {
        return None;
    }
    let df = apply_field(delta, coords, f);
    let confirm = |w: &Rational| {
        let residual = &df - &(&Expression::rational(w.clone()) * f);
        matches!(residual.is_zero(), Ok(true))
    };
    let dnf = df.normal_form();
    if let Some((m, c)) = nf.poly().terms().next() {
        let w = dnf.poly().coefficient(m) / c.clone();
        if confirm(&w) {
            return Some(w);
        }
    }
    let w = numeric_ratio(&df, f)?;
    confirm(&w).then_some(w)
}

fn numeric_ratio(num: &Expression, den: &Expression) -> Option<Rational> {
    let names: Vec<String> = num.symbols().union(&den.symbols()).cloned().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x686f_6d6f);
    for _ in 0..64 {
        let values: Vec<f64> = names.iter().map(|_| rng.gen_range(1..=40) as f64 / 8.0).collect();
        let env = |s: &str| names.iter().position(|n| n == s).map(|i| values[i]);
        let (Ok(a), Ok(b)) = (num.eval(&env), den.eval(&env)) else {
            continue;
        };
        if b.abs() < 1e-6 {
            continue;
        }
        return small_rational(a / b, 1000);
    }
    None
}

/// Best rational approximation with denominator at most `max_den`, accepted
/// only within `1e-9`.
fn small_rational(x: f64, max_den: i64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1, mut k0, mut k1) = (0i64, 1i64, 1i64, 0i64);
    let mut y = x;
    for _ in 0..32 {
        let a = y.floor();
        let ai = a.to_i64()?;
        let h2 = ai.checked_mul(h1)?.checked_add(h0)?;
        let k2 = ai.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if ((h1 as f64) / (k1 as f64) - x).abs() < 1e-9 {
            return Some(Rational::new(BigInt::from(h1), BigInt::from(k1)));
        }
        let frac = y - a;
        if frac.abs() < 1e-15 {
            break;
        }
        y = 1.0 / frac;
    }
    (k1 != 0 && ((h1 as f64) / (k1 as f64) - x).abs() < 1e-9).then(|| Rational::new(BigInt::from(h1), BigInt::from(k1)))
}

/// Largest numerical rank of the Jacobian `∂f_a/∂x^i` over the samples.
///
/// Samples outside an expression's domain are skipped; it is an error when
/// none remain.
pub fn rank_of_differentials<S: AsRef<str>>(fs: &[Expression], coords: &[S], samples: &[Vec<f64>]) -> Result<usize> {
    let grads: Vec<Vec<Expression>> = fs
        .iter()
        .map(|f| coords.iter().map(|c| f.differentiate(c.as_ref()).simplify()).collect())
        .collect();
    let mut best: Option<usize> = None;
    for point in samples {
        let mut entries = Vec::with_capacity(fs.len() * coords.len());
        let mut ok = true;
        for row in &grads {
            for g in row {
                match eval_point(g, coords, point) {
                    Ok(v) => entries.push(v),
                    Err(Error::DimensionMismatch { expected, found }) => {
                        return Err(Error::DimensionMismatch { expected, found })
                    }
                    Err(_) => {
                        ok = false;
                        break;
                    }
                }
            }
        }
        if !ok {
            continue;
        }
        let jac = DMatrix::from_row_slice(fs.len(), coords.len(), &entries);
        let rank = jac.singular_values().iter().filter(|s| **s > RANK_THRESHOLD).count();
        best = Some(best.map_or(rank, |b| b.max(rank)));
    }
    best.ok_or_else(|| Error::Evaluation("no sample point lies in the domain of every differential".into()))
}

/// Outcome of [`bihamiltonian_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct BiHamiltonian {
    pub holds: bool,
    /// `π₀♯dH₀` in chart order.
    pub field: Vec<Expression>,
    /// `π₀♯dH₀ − π₁♯dH₁`, simplified.
    pub residual: Vec<Expression>,
}

/// Checks `π₀♯dH₀ = π₁♯dH₁` componentwise; each Hamiltonian is paired with
/// the structure listed next to it.
pub fn bihamiltonian_check(
    p0: &PoissonStructure,
    h0: &Expression,
    p1: &PoissonStructure,
    h1: &Expression,
) -> Result<BiHamiltonian> {
    if p0.coords() != p1.coords() {
        return Err(Error::ChartMismatch(format!("{:?} vs {:?}", p0.coords(), p1.coords())));
    }
    let x0 = p0.hamiltonian_vector_field(h0)?;
    let x1 = p1.hamiltonian_vector_field(h1)?;
    let residual: Vec<Expression> = x0.iter().zip(&x1).map(|(a, b)| (a - b).simplify()).collect();
    let mut holds = true;
    for r in &residual {
        holds &= r.is_zero()?;
    }
    Ok(BiHamiltonian { holds, field: x0, residual })
}

/// `true` when every expression in the list is zero.
pub fn all_zero(items: &[Expression]) -> Result<bool> {
    for e in items {
        if !e.is_zero()? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `Σ_i x^i ∂_i` on the given coordinates.
pub fn euler_field<S: AsRef<str>>(coords: &[S], scaled: &[S]) -> Vec<Expression> {
    coords
        .iter()
        .map(|c| {
            if scaled.iter().any(|s| s.as_ref() == c.as_ref()) {
                Expression::symbol(c.as_ref())
            } else {
                Expression::zero()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn p(s: &str) -> Expression {
        Expression::parse(s).unwrap()
    }

    #[test]
    fn lift_examples() {
        assert_eq!(homogeneous_lift(&p("z - p"), LiftSign::Positive), p("r*(z - p)").simplify());
        assert_eq!(homogeneous_lift(&Expression::one(), LiftSign::Positive), p("r"));
        assert_eq!(homogeneous_lift(&p("exp(-z)"), LiftSign::Negative), p("-r*exp(-z)").simplify());
        let delta = euler_field(&["q", "p", "z", "r"], &["r"]);
        let lift = homogeneous_lift(&p("q*exp(-z) + sqrt(1 + p^2)"), LiftSign::Positive);
        assert_eq!(homogeneity_degree(&delta, &["q", "p", "z", "r"], &lift), Some(ratio(1, 1)));
    }

    #[test]
    fn symplectization_is_poisson_and_matches_jacobi_bracket() {
        for sign in [LiftSign::Positive, LiftSign::Negative] {
            assert!(symplectization(sign).verify().is_ok());
            for (f, g) in [("q", "p"), ("z - p", "exp(-z)"), ("q*p^2", "z^2 + q"), ("1", "q*z")] {
                assert!(correspondence_residual(&p(f), &p(g), sign).unwrap().is_literal_zero(), "{f}, {g}");
            }
        }
    }

    #[test]
    fn homogeneity_examples() {
        let m = ["m1", "m2", "m3"];
        let delta = euler_field(&m, &m);
        assert_eq!(homogeneity_degree(&delta, &m, &p("m1^2 + m2*m3")), Some(ratio(2, 1)));
        assert_eq!(homogeneity_degree(&delta, &m, &p("m1 + m2^2")), None);
        assert_eq!(homogeneity_degree(&delta, &m, &p("sqrt(m1^2 + m2^2 + m3^2)")), Some(ratio(1, 1)));
        assert_eq!(homogeneity_degree(&delta, &m, &p("m1*m2^(-1)")), Some(ratio(0, 1)));
        let c = ["x1", "x2", "p1", "p2"];
        let delta = euler_field(&c, &["p1", "p2"]);
        assert_eq!(homogeneity_degree(&delta, &c, &p("p1")), Some(ratio(1, 1)));
        assert_eq!(homogeneity_degree(&delta, &c, &p("p1 + p2*x2")), Some(ratio(1, 1)));
    }

    #[test]
    fn rank_examples() {
        let c = ["q", "p", "z"];
        let origin = vec![vec![0.0, 0.0, 0.0]];
        assert_eq!(rank_of_differentials(&[p("z - p"), p("p"), p("z")], &c, &origin).unwrap(), 2);
        assert_eq!(rank_of_differentials(&[p("z - p"), p("exp(-z)")], &c, &origin).unwrap(), 2);
        assert_eq!(rank_of_differentials(&[p("q*p"), p("q*p")], &c, &[vec![1.0, 2.0, 0.0]]).unwrap(), 1);
        assert!(rank_of_differentials(&[p("sqrt(q)")], &c, &[vec![-1.0, 0.0, 0.0]]).is_err());
    }

    #[test]
    fn small_rationals() {
        assert_eq!(small_rational(0.5, 1000), Some(ratio(1, 2)));
        assert_eq!(small_rational(-2.0, 1000), Some(ratio(-2, 1)));
        assert_eq!(small_rational(1.0 / 3.0, 1000), Some(ratio(1, 3)));
        assert_eq!(small_rational(std::f64::consts::PI, 10), None);
    }
}
