use std::sync::{Arc, OnceLock};

use parahecke::bundled::bundled;
use parahecke::{GroupAlgElt, HeckeAlgebra, HeckeElt, LatticeElt, LaurentPoly};
use proptest::prelude::*;

fn a2() -> &'static HeckeAlgebra {
    static H: OnceLock<HeckeAlgebra> = OnceLock::new();
    H.get_or_init(|| HeckeAlgebra::from_json_str(bundled("a2").unwrap()).unwrap())
}

fn torsion() -> &'static (HeckeAlgebra, HeckeAlgebra) {
    static H: OnceLock<(HeckeAlgebra, HeckeAlgebra)> = OnceLock::new();
    H.get_or_init(|| {
        let h = HeckeAlgebra::from_json_str(bundled("a1_torsion2").unwrap()).unwrap();
        let t = HeckeAlgebra::new(Arc::new(h.datum.quotient(&[2]).unwrap()));
        (h, t)
    })
}

fn poly() -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((-4i32..5, -3i64..4), 0..4)
        .prop_map(|ts| ts.into_iter().fold(LaurentPoly::zero(), |acc, (k, c)| &acc + &LaurentPoly::monomial(c, k)))
}

type Word = Vec<u8>;

fn term(ngens: u8, omega: Vec<i64>) -> impl Strategy<Value = (Word, Vec<i64>, LaurentPoly)> {
    let om = prop::sample::select(omega);
    (prop::collection::vec(0..ngens, 0..5), prop::collection::vec(om, 0..1), poly())
}

fn build(h: &HeckeAlgebra, terms: &[(Word, Vec<i64>, LaurentPoly)], shift: impl Fn(i64) -> LatticeElt) -> HeckeElt {
    let d = &h.datum;
    let mut e = HeckeElt::default();
    for (w, om, c) in terms {
        let mut x = d.product_of_word(w);
        for k in om {
            x = d.compose(&x, &d.translation(&shift(*k)));
        }
        e.add_term(x, c);
    }
    e
}

fn a2_elt() -> impl Strategy<Value = HeckeElt> {
    prop::collection::vec(term(3, vec![0]), 1..3).prop_map(|ts| build(a2(), &ts, |_| a2().datum.zero()))
}

fn torsion_elt() -> impl Strategy<Value = HeckeElt> {
    prop::collection::vec(term(2, vec![0, 1]), 1..3)
        .prop_map(|ts| build(&torsion().0, &ts, |k| LatticeElt::new(&[0], &[k as u32])))
}

fn group_elt() -> impl Strategy<Value = GroupAlgElt> {
    prop::collection::vec((-2i64..3, -2i64..3, poly()), 0..4).prop_map(|ts| {
        let mut r = GroupAlgElt::default();
        for (a, b, c) in ts {
            r.add_term(a2().datum.from_free(&[a, b]), &c);
        }
        r
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn laurent_ring_axioms(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
        if !b.is_zero() {
            prop_assert_eq!((&a * &b).exact_div(&b).unwrap(), a);
        }
    }

    #[test]
    fn hecke_associative(a in a2_elt(), b in a2_elt(), c in a2_elt()) {
        let h = a2();
        prop_assert_eq!(h.im_mul(&h.im_mul(&a, &b), &c), h.im_mul(&a, &h.im_mul(&b, &c)));
    }

    #[test]
    fn vee_reverses_products(a in a2_elt(), b in a2_elt()) {
        let h = a2();
        prop_assert_eq!(h.vee(&h.im_mul(&a, &b)), h.im_mul(&h.vee(&b), &h.vee(&a)));
        prop_assert_eq!(h.vee(&h.vee(&a)), a);
    }

    #[test]
    fn degree_multiplicative(a in a2_elt(), b in a2_elt()) {
        let h = a2();
        prop_assert_eq!(h.degree(&h.im_mul(&a, &b)), &h.degree(&a) * &h.degree(&b));
    }

    #[test]
    fn pushforward_multiplicative(a in torsion_elt(), b in torsion_elt()) {
        let (h, t) = torsion();
        let lhs = h.pushforward_quotient(&h.im_mul(&a, &b), t);
        let rhs = t.im_mul(&h.pushforward_quotient(&a, t), &h.pushforward_quotient(&b, t));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn dot_action_is_involutive(r in group_elt(), i in 0usize..2) {
        let d = &a2().datum;
        let s = d.simple_reflection(i);
        prop_assert_eq!(d.dot_act(s, &d.dot_act(s, &r)), r);
    }
}
