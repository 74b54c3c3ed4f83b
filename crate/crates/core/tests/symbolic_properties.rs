// SPDX-License-Identifier: Apache-2.0

use bilindblad_core::symbolic::ZeroVerdict;
use bilindblad_core::Expression;
use proptest::prelude::*;

const VARS: [&str; 3] = ["a", "b", "c"];

fn leaf() -> impl Strategy<Value = Expression> {
    prop_oneof![
        (-4i64..=4).prop_map(Expression::int),
        (0usize..VARS.len()).prop_map(|k| Expression::symbol(VARS[k])),
    ]
}

/// Random expression tree over sums, products, small powers, `exp` and `sqrt`.
fn expression() -> impl Strategy<Value = Expression> {
    leaf().prop_recursive(3, 16, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Expression::sum),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Expression::product),
            (inner.clone(), 1i32..=3).prop_map(|(e, k)| e.pow(k)),
            inner.clone().prop_map(Expression::exp),
            inner.prop_map(|e| (Expression::one() + e.clone() * e).sqrt()),
        ]
    })
}

fn same(a: &Expression, b: &Expression) -> bool {
    (a - b).zero_test().is_zero()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn display_parses_back_to_an_equal_expression(e in expression()) {
        let text = e.to_string();
        let back = Expression::parse(&text).unwrap();
        prop_assert!(same(&back, &e), "{}", text);
        prop_assert_eq!(back.to_string(), Expression::parse(&back.to_string()).unwrap().to_string());
    }

    #[test]
    fn simplification_preserves_value(e in expression()) {
        prop_assert!(same(&e.simplify(), &e));
    }

    #[test]
    fn expression_minus_itself_is_exactly_zero(e in expression()) {
        prop_assert_eq!((&e - &e).zero_test(), ZeroVerdict::Zero);
    }

    #[test]
    fn derivative_obeys_product_rule(f in expression(), g in expression()) {
        for v in VARS {
            let lhs = (&f * &g).differentiate(v);
            let rhs = &(&f.differentiate(v) * &g) + &(&f * &g.differentiate(v));
            prop_assert!(same(&lhs, &rhs));
        }
    }

    #[test]
    fn binomial_square_expands(f in expression(), g in expression()) {
        let lhs = (&f + &g).pow(2);
        let rhs = Expression::sum([f.clone().pow(2), Expression::int(2) * (&f * &g), g.clone().pow(2)]);
        prop_assert!(same(&lhs, &rhs));
    }

    #[test]
    fn nonzero_constants_are_not_zero(n in 1i64..1000, e in expression()) {
        let shifted = &(&e - &e) + &Expression::int(n);
        prop_assert_eq!(shifted.zero_test(), ZeroVerdict::NonZero);
    }
}

#[test]
fn exponential_and_root_identities() {
    let cases = [
        ("exp(a)*exp(-a)", "1"),
        ("exp(a)^2", "exp(2*a)"),
        ("sqrt(1 + a^2)^2", "1 + a^2"),
        ("(a + b)^3", "a^3 + 3*a^2*b + 3*a*b^2 + b^3"),
        ("1/a * a", "1"),
    ];
    for (l, r) in cases {
        let (l, r) = (Expression::parse(l).unwrap(), Expression::parse(r).unwrap());
        assert!(same(&l, &r), "{l} vs {r}");
    }
    assert!(!same(&Expression::parse("exp(-z)").unwrap(), &Expression::parse("1 - z").unwrap()));
}
