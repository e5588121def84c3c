use proptest::prelude::*;

use qmlab::brackets::{jacobi_check, rc1, serre_derivative};
use qmlab::qm::{modular_monomials_of_weight, monomials_of_weight};
use qmlab::rational::{ratio, Rational};
use qmlab::structure::{decompose, decompose_linear, recompose};
use qmlab::uea::{parse_word, pbw_reduce, rewrite_word, Letter};
use qmlab::{QSeries, QmPolynomial, UeaElement, WeightedForm};

fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| ratio(n, d))
}

/// Random homogeneous form of the given weight over all monomials.
fn form_of_weight(k: u32, modular_only: bool) -> BoxedStrategy<WeightedForm> {
    let basis = if modular_only { modular_monomials_of_weight(k) } else { monomials_of_weight(k) };
    let n = basis.len();
    proptest::collection::vec(small_rational(), n)
        .prop_map(move |cs| {
            let p = QmPolynomial::from_terms(basis.iter().copied().zip(cs));
            WeightedForm::new(p, k).unwrap()
        })
        .boxed()
}

fn any_form(max_weight: u32) -> impl Strategy<Value = WeightedForm> {
    (0..=max_weight / 2).prop_flat_map(|h| form_of_weight(2 * h, false))
}

fn nonzero_modular(min_weight: u32, max_weight: u32) -> impl Strategy<Value = WeightedForm> {
    (min_weight / 2..=max_weight / 2)
        .prop_flat_map(|h| form_of_weight(2 * h, true))
        .prop_filter("nonzero", |f| !f.is_zero())
}

/// Inhomogeneous polynomial, for ring axioms.
fn any_poly() -> impl Strategy<Value = QmPolynomial> {
    proptest::collection::vec(((0u32..3, 0u32..3, 0u32..3), small_rational()), 0..5)
        .prop_map(|ts| QmPolynomial::from_terms(ts.into_iter().map(|((a, b, c), x)| ([a, b, c], x))))
}

fn any_series(max_len: usize) -> impl Strategy<Value = QSeries> {
    proptest::collection::vec(small_rational(), 1..=max_len).prop_map(QSeries::new)
}

fn any_word(max_len: usize) -> impl Strategy<Value = Vec<Letter>> {
    proptest::collection::vec(prop_oneof![Just(Letter::D), Just(Letter::H), Just(Letter::Delta)], 0..=max_len)
}

fn word_grading(w: &[Letter]) -> i64 {
    w.iter().map(|l| l.grading()).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polynomial_ring_axioms(a in any_poly(), b in any_poly(), c in any_poly()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &QmPolynomial::one(), a.clone());
    }

    #[test]
    fn series_product_and_precision(a in any_series(12), b in any_series(12)) {
        let n = a.precision().min(b.precision());
        prop_assert_eq!((&a + &b).precision(), n);
        prop_assert_eq!((&a * &b).precision(), n);
        prop_assert_eq!(&a * &b, &b * &a);
        // Truncating inputs first does not change the known coefficients.
        prop_assert_eq!(&a.truncate(n) * &b.truncate(n), &a * &b);
    }

    #[test]
    fn theta_is_a_derivation(a in any_series(15), b in any_series(15)) {
        let lhs = (&a * &b).theta();
        let rhs = &(&a.theta() * &b) + &(&a * &b.theta());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn qexpansion_is_a_ring_map(f in any_form(10), g in any_form(10)) {
        let n = 25;
        let prod = (&f * &g).qexpansion(n);
        prop_assert_eq!(prod, &f.qexpansion(n) * &g.qexpansion(n));
    }

    #[test]
    fn d_matches_theta_on_expansions(f in any_form(14)) {
        let n = 30;
        prop_assert_eq!(f.apply_d().qexpansion(n), f.qexpansion(n).theta());
    }

    #[test]
    fn lowering_operator_is_a_derivation(f in any_form(12), g in any_form(12)) {
        let (p, q) = (f.poly(), g.poly());
        let lhs = (p * q).apply_delta();
        let rhs = &(&p.apply_delta() * q) + &(p * &q.apply_delta());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn sl2_commutators(f in any_form(16)) {
        let p = f.poly();
        // [δ, D] = H
        let c1 = &p.apply_d().apply_delta() - &p.apply_delta().apply_d();
        prop_assert_eq!(c1, p.apply_h());
        // [H, D] = 2D
        let c2 = &p.apply_d().apply_h() - &p.apply_h().apply_d();
        prop_assert_eq!(c2, p.apply_d().scale(&ratio(2, 1)));
        // [H, δ] = -2δ
        let c3 = &p.apply_delta().apply_h() - &p.apply_h().apply_delta();
        prop_assert_eq!(c3, p.apply_delta().scale(&ratio(-2, 1)));
    }

    #[test]
    fn rewriting_is_confluent(w in any_word(7), picks in proptest::collection::vec(any::<usize>(), 64)) {
        let reference = pbw_reduce(&w);
        let mut i = 0;
        let chosen = rewrite_word(&w, |redexes| {
            let r = redexes[picks[i % picks.len()] % redexes.len()];
            i += 1;
            r
        });
        prop_assert_eq!(&chosen, &reference);
        let leftmost = rewrite_word(&w, |r| r[0]);
        let rightmost = rewrite_word(&w, |r| *r.last().unwrap());
        prop_assert_eq!(&leftmost, &reference);
        prop_assert_eq!(&rightmost, &reference);
    }

    #[test]
    fn pbw_forms_respect_the_grading(w in any_word(8)) {
        let u = pbw_reduce(&w);
        let g = word_grading(&w);
        for (e, _) in u.terms() {
            prop_assert_eq!(2 * (e[0] as i64 - e[2] as i64), g);
        }
    }

    #[test]
    fn pbw_action_matches_sequential_application(w in any_word(6), f in any_form(12)) {
        let mut direct = f.poly().clone();
        for l in w.iter().rev() {
            direct = match l {
                Letter::D => direct.apply_d(),
                Letter::H => direct.apply_h(),
                Letter::Delta => direct.apply_delta(),
            };
        }
        prop_assert_eq!(pbw_reduce(&w).act(f.poly()), direct);
    }

    #[test]
    fn delta_squared_d_squared_oracle(f in any_form(16)) {
        let u = pbw_reduce(&parse_word("ddDD").unwrap());
        let direct = f.poly().apply_d_n(2).apply_delta_n(2);
        prop_assert_eq!(u.act(f.poly()), direct);
    }

    #[test]
    fn enveloping_product_is_compatible_with_action(a in any_word(4), b in any_word(4), f in any_form(10)) {
        let (ua, ub): (UeaElement, UeaElement) = (pbw_reduce(&a), pbw_reduce(&b));
        let mut ab = a.clone();
        ab.extend_from_slice(&b);
        prop_assert_eq!(&ua * &ub, pbw_reduce(&ab));
        prop_assert_eq!((&ua * &ub).act(f.poly()), ua.act(&ub.act(f.poly())));
    }

    #[test]
    fn decomposition_round_trip(f in any_form(30)) {
        let d = decompose(&f);
        prop_assert_eq!(recompose(&d), f.clone());
        prop_assert_eq!(Some(d), decompose_linear(&f));
    }

    #[test]
    fn decomposition_json_round_trip(f in any_form(16)) {
        let d = decompose(&f);
        let s = serde_json::to_string(&d).unwrap();
        let back: qmlab::structure::Decomposition = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, d);
    }

    #[test]
    fn brackets_are_modular_and_antisymmetric(f in nonzero_modular(4, 16), g in nonzero_modular(4, 16)) {
        let fg = rc1(&f, &g).unwrap();
        prop_assert!(fg.is_modular() || fg.is_zero());
        prop_assert_eq!(fg.weight(), f.weight() + g.weight() + 2);
        prop_assert_eq!(fg.scale(&ratio(-1, 1)), rc1(&g, &f).unwrap());
    }

    #[test]
    fn jacobi_on_random_triples(
        f in nonzero_modular(4, 12),
        g in nonzero_modular(4, 12),
        h in nonzero_modular(4, 12),
    ) {
        prop_assert!(jacobi_check(&f, &g, &h).unwrap());
    }

    #[test]
    fn serre_derivative_is_a_derivation(f in any_form(12), g in any_form(12)) {
        let lhs = serre_derivative(&(&f * &g));
        let rhs = &(&serre_derivative(&f) * &g) + &(&f * &serre_derivative(&g));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn serre_derivative_preserves_modularity(f in nonzero_modular(4, 20)) {
        let g = serre_derivative(&f);
        prop_assert!(g.is_zero() || g.is_modular());
    }
}
