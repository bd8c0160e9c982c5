use ffbundle::bundle::{HNBundle, SlopeFilter};
use ffbundle::criteria::{
    is_quotient, is_subbundle, rank_condition, slopewise_dominates, strip_common_slopes,
};
use ffbundle::degree::{c_value, deg_nonneg, deg_nonneg_oracle, nonneg_degree};
use ffbundle::Rational;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn slope() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4)
        .prop_map(|(p, q)| Rational::new(BigInt::from(p), BigInt::from(q)).unwrap())
}

fn raw_summands() -> impl Strategy<Value = Vec<(Rational, u64)>> {
    prop::collection::vec((slope(), 1u64..=3), 0..4)
}

fn bundle() -> impl Strategy<Value = HNBundle> {
    raw_summands().prop_map(HNBundle::canonicalize)
}

fn int_bundle() -> impl Strategy<Value = HNBundle> {
    prop::collection::vec((-3i64..=3, 1u64..=2), 0..3)
        .prop_map(|v| HNBundle::canonicalize(v.into_iter().map(|(s, m)| (Rational::from(s), m))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn canonicalize_idempotent_and_order_insensitive(mut raw in raw_summands()) {
        let v = HNBundle::canonicalize(raw.clone());
        let again = HNBundle::canonicalize(v.summands().iter().map(|s| (s.slope.clone(), s.mult)));
        prop_assert_eq!(&again, &v);
        raw.reverse();
        prop_assert_eq!(HNBundle::canonicalize(raw), v);
    }

    #[test]
    fn rank_and_degree_additive(v in bundle(), w in bundle()) {
        let s = v.direct_sum(&w);
        prop_assert_eq!(s.rank(), v.rank() + w.rank());
        prop_assert_eq!(s.degree(), v.degree() + w.degree());
        prop_assert_eq!(v.dual().rank(), v.rank());
        prop_assert_eq!(v.dual().degree(), -v.degree());
        prop_assert_eq!(v.dual().dual(), v);
    }

    #[test]
    fn filtration_duality(v in bundle(), mu in slope()) {
        let lhs = v.filter(&mu, SlopeFilter::AtLeast).rank();
        let rhs = v.dual().filter(&-&mu, SlopeFilter::AtMost).rank();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn unit_slopes_non_increasing(v in bundle()) {
        let r = v.rank();
        let mut i = BigInt::from(2);
        while i <= r {
            let prev = v.unit_slope(&(&i - 1)).unwrap();
            prop_assert!(v.unit_slope(&i).unwrap() <= prev);
            i += 1;
        }
    }

    #[test]
    fn polygon_reconstruction(v in bundle()) {
        prop_assert_eq!(HNBundle::from_polygon(&v.polygon()).unwrap(), v);
    }

    #[test]
    fn text_and_json_round_trip(v in bundle()) {
        prop_assert_eq!(v.to_string().parse::<HNBundle>().unwrap(), v.clone());
        let json = serde_json::to_string(&v).unwrap();
        prop_assert_eq!(serde_json::from_str::<HNBundle>(&json).unwrap(), v);
    }

    #[test]
    fn tensor_laws(a in int_bundle(), b in bundle(), c in int_bundle()) {
        prop_assert_eq!(a.tensor(&b), b.tensor(&a));
        prop_assert_eq!(a.tensor(&b).tensor(&c), a.tensor(&b.tensor(&c)));
        let ab = a.tensor(&b);
        prop_assert_eq!(ab.rank(), a.rank() * b.rank());
        prop_assert_eq!(ab.degree(), a.rank() * b.degree() + a.degree() * b.rank());
    }

    #[test]
    fn twist_and_stretch_compose(v in bundle(), a in -5i64..=5, x in 1i64..=4, y in 1i64..=4) {
        let a = BigInt::from(a);
        prop_assert_eq!(v.twist_by(&a).twist_by(&-&a), v.clone());
        let (x, y) = (BigInt::from(x), BigInt::from(y));
        let twice = v.vertical_stretch(&x).unwrap().vertical_stretch(&y).unwrap();
        prop_assert_eq!(twice, v.vertical_stretch(&(&x * &y)).unwrap());
    }

    #[test]
    fn deg_nonneg_laws(v in bundle(), w in bundle(), k in 2i64..=4, t in -3i64..=3) {
        let d = deg_nonneg(&v, &w);
        prop_assert!(!d.is_negative());
        prop_assert_eq!(&d, &deg_nonneg_oracle(&v, &w));
        if let (Ok(lo), Ok(hi)) = (v.mu_min(), w.mu_max()) {
            if lo >= hi {
                prop_assert!(d.is_zero());
            }
        }
        let k = BigInt::from(k);
        let stretched = deg_nonneg(&v.vertical_stretch(&k).unwrap(), &w.vertical_stretch(&k).unwrap());
        prop_assert_eq!(stretched, &d * &k);
        let t = BigInt::from(t);
        prop_assert_eq!(deg_nonneg(&v.twist_by(&t), &w.twist_by(&t)), d);
    }

    #[test]
    fn c_value_laws(e in bundle(), f in bundle(), q in bundle(), k in 2i64..=4, t in -3i64..=3) {
        let c = c_value(&e, &f, &q);
        let k = BigInt::from(k);
        let s = |v: &HNBundle| v.vertical_stretch(&k).unwrap();
        prop_assert_eq!(c_value(&s(&e), &s(&f), &s(&q)), &c * &k);
        let t = BigInt::from(t);
        prop_assert_eq!(c_value(&e.twist_by(&t), &f.twist_by(&t), &q.twist_by(&t)), c);
        prop_assert!(c_value(&e, &f, &e).is_zero());
    }

    #[test]
    fn dominance_bounds_nonneg_degree(e in bundle(), f in bundle()) {
        if slopewise_dominates(&f, &e) {
            prop_assert!(nonneg_degree(&f) >= nonneg_degree(&e));
        }
    }

    #[test]
    fn rank_condition_matches_dominance(e in bundle(), f in bundle()) {
        prop_assert_eq!(rank_condition(&e, &f), slopewise_dominates(&f, &e));
    }

    #[test]
    fn dominance_dualizes_at_equal_rank(e in bundle(), f in bundle()) {
        if e.rank() == f.rank() && slopewise_dominates(&f, &e) {
            prop_assert!(slopewise_dominates(&e.dual(), &f.dual()));
        }
        prop_assert_eq!(is_subbundle(&e, &f), is_quotient(&e.dual(), &f.dual()));
    }

    #[test]
    fn stripping_common_slopes_preserves_embedding(e in bundle(), f in bundle()) {
        let split = strip_common_slopes(&e, &f);
        prop_assert_eq!(is_subbundle(&e, &f), is_subbundle(&split.e_rest, &split.f_rest));
    }

    #[test]
    fn dominance_is_a_partial_order(a in bundle(), b in bundle(), c in bundle()) {
        prop_assert!(slopewise_dominates(&a, &a));
        if slopewise_dominates(&a, &b) && slopewise_dominates(&b, &a) {
            prop_assert_eq!(&a, &b);
        }
        if slopewise_dominates(&a, &b) && slopewise_dominates(&b, &c) {
            prop_assert!(slopewise_dominates(&a, &c));
        }
    }
}
