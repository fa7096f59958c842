//! Randomized invariants of the exact-arithmetic core: ring laws,
//! exact division, adjugate identities and order promotion, all at 1000
//! cases per property.

use proptest::prelude::*;
use std::sync::Arc;

use saito_forge::exactalg::cyc::{rat, CycNum};
use saito_forge::exactalg::mat::Mat;
use saito_forge::exactalg::mpoly::{MPoly, Vars};

fn arb_cyc() -> impl Strategy<Value = CycNum> {
    let orders = prop_oneof![
        Just(1u32),
        Just(3u32),
        Just(4u32),
        Just(5u32),
        Just(8u32),
        Just(12u32)
    ];
    (orders, proptest::collection::vec((-6i64..7, 1i64..5), 1..5)).prop_map(|(order, parts)| {
        let mut acc = CycNum::zero();
        for (k, (n, d)) in parts.into_iter().enumerate() {
            let term = CycNum::zeta_pow(order, k as i64).scale(&rat(n, d));
            acc = acc + term;
        }
        acc
    })
}

fn uv() -> Arc<Vars> {
    Vars::new(&[("u", 1), ("v", 1)])
}

fn arb_mpoly() -> impl Strategy<Value = MPoly> {
    proptest::collection::vec(((0u32..4, 0u32..4), arb_cyc()), 0..4).prop_map(|terms| {
        let vars = uv();
        MPoly::from_terms(
            &vars,
            terms
                .into_iter()
                .map(|((i, j), c)| (vec![i, j], c))
                .collect(),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn cyc_ring_laws(a in arb_cyc(), b in arb_cyc(), c in arb_cyc()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, CycNum::zero());
    }

    #[test]
    fn cyc_inverse(a in arb_cyc()) {
        if !a.is_zero() {
            let inv = a.inv().unwrap();
            prop_assert_eq!(&a * &inv, CycNum::one());
        } else {
            prop_assert!(a.inv().is_err());
        }
    }

    #[test]
    fn cyc_promotion_commutes(a in arb_cyc(), b in arb_cyc()) {
        let m = 120; // all sampled orders divide 120
        let (pa, pb) = (a.to_order(m), b.to_order(m));
        prop_assert_eq!(&a + &b, &pa + &pb);
        prop_assert_eq!(&a * &b, &pa * &pb);
    }

    #[test]
    fn mpoly_ring_laws(a in arb_mpoly(), b in arb_mpoly(), c in arb_mpoly()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn mpoly_exact_division(a in arb_mpoly(), b in arb_mpoly()) {
        if !b.is_zero() {
            let prod = &a * &b;
            let q = prod.exact_div(&b).unwrap();
            prop_assert_eq!(q, a);
        }
    }

    #[test]
    fn adjugate_law(
        e00 in arb_mpoly(), e01 in arb_mpoly(),
        e10 in arb_mpoly(), e11 in arb_mpoly(),
    ) {
        let m = Mat::from_rows(vec![vec![e00, e01], vec![e10, e11]]);
        let det = m.det();
        let prod = m.adjugate().mul(&m);
        let vars = uv();
        let expect: Mat<MPoly> = Mat::identity(2, &MPoly::one(&vars)).map(|p| p * det.clone());
        prop_assert_eq!(prod, expect);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn adjugate_law_3x3(entries in proptest::collection::vec(arb_mpoly(), 9)) {
        let m = Mat { n: 3, entries };
        let det = m.det();
        let prod = m.adjugate().mul(&m);
        let vars = uv();
        let expect: Mat<MPoly> = Mat::identity(3, &MPoly::one(&vars)).map(|p| p * det.clone());
        prop_assert_eq!(prod, expect);
    }
}
