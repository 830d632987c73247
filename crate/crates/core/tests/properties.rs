use jetg_core::algebroid::{bracket_trivial, TrivialSection};
use jetg_core::finite_groupoid::GroupoidTable;
use jetg_core::flows::{exp_trivial, FlowConfig, TrivialElement};
use jetg_core::groups::FiniteGroup;
use jetg_core::json::{parse, FromJson, ToJson};
use jetg_core::linear_groupoid::{apply, commutator, commutator_applied, symbol_check};
use jetg_core::multijet::{jet_compose, jet_of_polynomial, TruncatedJet};
use jetg_core::poly::{MatrixPoly, MultiIndex, Poly, PolyVectorField};
use jetg_core::random;
use jetg_core::scalar::{format_rational, parse_rational, q, qi, Q};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Q> {
    (-20i64..=20, 1i64..=12).prop_map(|(n, d)| q(n, d))
}

fn poly(n: usize, deg: u32) -> impl Strategy<Value = Poly> {
    let monos = MultiIndex::all_up_to(n, deg);
    prop::collection::vec((0..monos.len(), rational()), 0..5)
        .prop_map(move |ts| Poly::from_terms(n, ts.into_iter().map(|(i, c)| (monos[i].clone(), c))))
}

fn field(n: usize, deg: u32) -> impl Strategy<Value = PolyVectorField> {
    prop::collection::vec(poly(n, deg), n).prop_map(PolyVectorField::new)
}

fn matrix(n: usize, m: usize, deg: u32) -> impl Strategy<Value = MatrixPoly> {
    prop::collection::vec(poly(n, deg), m * m).prop_map(move |e| MatrixPoly::new(n, m, e))
}

fn section(n: usize, m: usize) -> impl Strategy<Value = TrivialSection> {
    (field(n, 2), matrix(n, m, 2)).prop_map(|(t, h)| TrivialSection::new(t, h).unwrap())
}

fn round_trips<T: ToJson + FromJson + PartialEq + std::fmt::Debug>(x: &T) -> bool {
    let text = serde_json::to_string(&x.to_json()).unwrap();
    parse::<T>(&text).as_ref() == Ok(x)
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(64) })]

    #[test]
    fn rational_text_round_trips(x in rational()) {
        prop_assert_eq!(parse_rational(&format_rational(&x)), Some(x));
    }

    #[test]
    fn polynomial_artifacts_round_trip(p in poly(2, 3), s in section(2, 2)) {
        prop_assert!(round_trips(&p));
        prop_assert!(round_trips(&s));
    }

    #[test]
    fn jets_round_trip(seed in any::<u64>(), k in 1u32..=3) {
        let mut rng = random::rng(seed);
        let n = 1 + (seed % 3) as usize;
        let x = random::point(&mut rng, n, 5);
        let g = random::jet_arrow_at(&mut rng, x, k, 5);
        prop_assert!(round_trips(&g));
        prop_assert!(round_trips(g.jet()));
        prop_assert!(round_trips(&g.map(jetg_core::scalar::Scalar::to_float)));
    }

    #[test]
    fn float_elements_round_trip(a in -1e3f64..1e3, b in -1e-3f64..1e-3) {
        let e = TrivialElement {
            target: vec![a, b],
            g: jetg_core::linalg::Mat::from_vec(1, 1, vec![a * b]),
            source: vec![b, a],
        };
        prop_assert!(round_trips(&e));
    }

    #[test]
    fn jet_of_product_is_product_of_jets(p in poly(2, 3), r in poly(2, 3), x in (rational(), rational()), k in 0u32..=3) {
        let base = vec![x.0, x.1];
        let jp = jet_of_polynomial(std::slice::from_ref(&p), &base, k).unwrap();
        let jr = jet_of_polynomial(std::slice::from_ref(&r), &base, k).unwrap();
        let jpr = jet_of_polynomial(&[p.mul(&r)], &base, k).unwrap();
        prop_assert_eq!(jp.mul(&jr).unwrap(), jpr);
    }

    #[test]
    fn composition_with_identity_is_neutral(seed in any::<u64>(), k in 1u32..=4) {
        let mut rng = random::rng(seed);
        let n = 1 + (seed % 3) as usize;
        let x = random::point(&mut rng, n, 5);
        let g = random::jet_arrow_at(&mut rng, x.clone(), k, 5);
        let left = TruncatedJet::identity(g.target(), k);
        prop_assert_eq!(jet_compose(&left, g.jet()).unwrap(), g.jet().clone());
        prop_assert_eq!(jet_compose(g.jet(), &TruncatedJet::identity(x, k)).unwrap(), g.jet().clone());
    }

    #[test]
    fn trivial_bracket_is_antisymmetric_and_anchored(a in section(2, 2), b in section(2, 2)) {
        let ab = bracket_trivial(&a, &b).unwrap();
        let ba = bracket_trivial(&b, &a).unwrap();
        prop_assert_eq!(ab.clone(), ba.scale(&qi(-1)));
        prop_assert_eq!(ab.anchor(), a.anchor().bracket(&b.anchor()));
    }

    #[test]
    fn operator_commutator_is_composition_commutator(a in section(1, 2), b in section(1, 2), s in prop::collection::vec(poly(1, 3), 2), f in poly(1, 2)) {
        let oa = jetg_core::linear_groupoid::operator_from_section(&a);
        let ob = jetg_core::linear_groupoid::operator_from_section(&b);
        let s = jetg_core::linear_groupoid::VectorSection::new(1, s).unwrap();
        let c = commutator(&oa, &ob).unwrap();
        prop_assert_eq!(apply(&c, &s).unwrap(), commutator_applied(&oa, &ob, &s).unwrap());
        prop_assert!(symbol_check(&oa, &f, &s).unwrap());
    }

    #[test]
    fn exp_at_zero_is_the_unit(s in section(2, 2), x in (-2.0f64..2.0, -2.0f64..2.0)) {
        let p = [x.0, x.1];
        let e = exp_trivial(&s, &p, 0.0, &FlowConfig::default()).unwrap();
        prop_assert_eq!(e, TrivialElement::unit(&p, 2));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(24) })]

    #[test]
    fn quotients_by_normal_subgroupoids_are_groupoids(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let r = random::trivial_groupoid(&mut rng);
        let s = r.table.subgroupoid(&r.subgroup_ids(&r.normal)).unwrap();
        let quotient = r.table.quotient(&s).unwrap();
        prop_assert!(quotient.check_axioms().is_ok());
        prop_assert_eq!(quotient.len(), r.m * r.m * r.group.order() / r.normal.len());
        prop_assert!(round_trips(&quotient));
    }

    #[test]
    fn cosets_partition_the_arrows(m in 1usize..=3, which in 0usize..4) {
        let group = random::test_groups().swap_remove(which);
        let t = GroupoidTable::trivial(m, &group);
        for sub in group.subgroups() {
            let sub: Vec<usize> = sub.into_iter().collect();
            let ids: Vec<u64> = (0..m)
                .flat_map(|y| sub.iter().flat_map(move |&h| (0..m).map(move |x| (y, h, x))))
                .map(|(y, h, x)| GroupoidTable::trivial_id(m, group.order(), y, h, x))
                .collect();
            let s = t.subgroupoid(&ids).unwrap();
            let p = t.cosets(&s);
            prop_assert!(p.partitions(t.ids()));
            prop_assert!(p.blocks.iter().all(|b| b.len() == sub.len()));
        }
    }
}

#[test]
fn s3_has_one_proper_nontrivial_normal_subgroup() {
    let g = FiniteGroup::symmetric3();
    let proper: Vec<_> = g
        .normal_subgroups()
        .into_iter()
        .filter(|s| s.len() > 1 && s.len() < g.order())
        .collect();
    assert_eq!(proper.len(), 1);
    assert_eq!(proper[0].len(), 3);
}
