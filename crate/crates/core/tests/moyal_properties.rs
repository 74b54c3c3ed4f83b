// SPDX-License-Identifier: Apache-2.0

use bilindblad_core::gksl::Gksl;
use bilindblad_core::linalg::{anticommutator, c, commutator, hs_norm, identity, is_hermitian};
use bilindblad_core::moyal::{
    dirac_residual, dissipator_symbol_residual, moyal_bracket, star_product, weyl_quantize, PhaseSymbol,
};
use bilindblad_core::scalar::{ratio, GaussianRational};
use proptest::prelude::*;

fn monomial(re: i64, im: i64, a: u32, b: u32, h: u32) -> PhaseSymbol {
    let mut m = PhaseSymbol::constant(GaussianRational::new(ratio(re, 1), ratio(im, 2)));
    for _ in 0..a {
        m = &m * &PhaseSymbol::x();
    }
    for _ in 0..b {
        m = &m * &PhaseSymbol::xi();
    }
    for _ in 0..h {
        m = &m * &PhaseSymbol::hbar();
    }
    m
}

/// Complex polynomial symbol of phase degree at most `max_degree`.
fn symbol(max_degree: u32, with_hbar: bool) -> impl Strategy<Value = PhaseSymbol> {
    let h: u32 = if with_hbar { 1 } else { 0 };
    prop::collection::vec((-3i64..=3, -2i64..=2, 0..=max_degree, 0..=max_degree, 0..=h), 1..=3).prop_map(move |terms| {
        terms.into_iter().filter(|t| t.2 + t.3 <= max_degree).fold(PhaseSymbol::zero(), |acc, (re, im, a, b, h)| {
            &acc + &monomial(re, im, a, b, h)
        })
    })
}

fn real_symbol(max_degree: u32) -> impl Strategy<Value = PhaseSymbol> {
    symbol(max_degree, false).prop_map(|s| {
        let half = GaussianRational::real(ratio(1, 2));
        (&s + &s.conj()).scale(&half)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn star_product_is_associative(a in symbol(4, true), b in symbol(4, true), c in symbol(4, true)) {
        let left = star_product(&star_product(&a, &b), &c);
        let right = star_product(&a, &star_product(&b, &c));
        prop_assert!((&left - &right).is_zero());
    }

    #[test]
    fn moyal_bracket_is_antisymmetric(a in symbol(4, true), b in symbol(4, true)) {
        prop_assert!((&moyal_bracket(&a, &b) + &moyal_bracket(&b, &a)).is_zero());
    }

    #[test]
    fn dirac_residual_starts_at_second_order(a in symbol(4, true), b in symbol(4, true)) {
        let r = dirac_residual(&a, &b);
        prop_assert!(r.hbar_coefficient(0).is_zero());
        prop_assert!(r.hbar_coefficient(1).is_zero());
    }

    #[test]
    fn dissipator_symbol_has_no_classical_part(l in symbol(3, true), f in symbol(3, true)) {
        let (d0, _) = dissipator_symbol_residual(&l, &f);
        prop_assert!(d0.is_zero());
    }

    #[test]
    fn symbol_display_parses_back(a in symbol(4, true)) {
        let text = a.to_string();
        let back = PhaseSymbol::parse(&text).unwrap();
        prop_assert_eq!(&back, &a, "{}", text);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn real_symbols_quantize_to_hermitian(a in real_symbol(4), hbar in 0.05f64..1.0) {
        let q = weyl_quantize(&a, 16, hbar).unwrap();
        prop_assert!(is_hermitian(&q.matrix, 1e-12 * (1.0 + hs_norm(&q.matrix))));
    }

    #[test]
    fn quantization_is_multiplicative_on_the_interior(a in symbol(2, false), b in symbol(2, false), hbar in 0.1f64..1.0) {
        let n = 20;
        let qa = weyl_quantize(&a, n, hbar).unwrap().matrix;
        let qb = weyl_quantize(&b, n, hbar).unwrap().matrix;
        let qab = weyl_quantize(&star_product(&a, &b), n, hbar).unwrap().interior();
        let prod = &qa * &qb;
        let k = qab.nrows().min(n - 4);
        let diff = prod.view((0, 0), (k, k)) - qab.view((0, 0), (k, k));
        prop_assert!(diff.norm() < 1e-10 * (1.0 + prod.norm()));
    }

    #[test]
    fn adjoint_of_quantized_data_matches_direct_formula(h in real_symbol(2), l in symbol(2, false), f in symbol(2, false), hbar in 0.1f64..1.0) {
        let n = 16;
        let q = |s: &PhaseSymbol| weyl_quantize(s, n, hbar).unwrap().matrix;
        let (qh, ql, qf) = (q(&h), q(&l), q(&f));
        let g = Gksl::new(hbar, qh.clone(), vec![ql.clone()]).unwrap();
        let lhs = g.heisenberg_apply(&qf).unwrap();
        let ldag = ql.adjoint();
        let direct = commutator(&qh, &qf) * c::<f64>(0.0, 1.0 / hbar) + &ldag * &qf * &ql
            - anticommutator(&(&ldag * &ql), &qf) * c::<f64>(0.5, 0.0);
        prop_assert!(hs_norm(&(lhs - &direct)) < 1e-12 * (1.0 + hs_norm(&direct)));
    }
}

#[test]
fn unit_symbol_quantizes_to_identity() {
    for hbar in [1.0, 0.5, 0.125] {
        let q = weyl_quantize(&PhaseSymbol::one(), 12, hbar).unwrap();
        assert_eq!(q.matrix, identity(12));
    }
}

#[test]
fn low_degree_pairs_satisfy_dirac_exactly() {
    let basis = ["1", "x", "xi", "x^2", "x*xi", "xi^2"];
    for a in basis {
        for b in basis {
            let (a, b) = (PhaseSymbol::parse(a).unwrap(), PhaseSymbol::parse(b).unwrap());
            assert!(dirac_residual(&a, &b).is_zero(), "{a}, {b}");
        }
    }
}
