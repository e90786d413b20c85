use cubicjac::algebra::gcd::gcd;
use cubicjac::algebra::{compose_maps, Field, PolyMap, Polynomial};
use cubicjac::classifier::{classify_rank_le2, CaseTag};
use cubicjac::corpus::Corpus;
use cubicjac::keller::{conjugate, invert_keller, keller_normal_form};
use cubicjac::text::{format_map, parse_map, MapKind};
use proptest::prelude::*;

fn poly(field: &Field, nvars: usize, terms: &[(Vec<u32>, i64)]) -> Polynomial {
    let mut p = Polynomial::zero(field, nvars);
    for (e, c) in terms {
        p = &p + &Polynomial::monomial(field, field.from_i64(*c), e.clone());
    }
    p
}

fn terms(
    nvars: usize,
    max_deg: u32,
    max_terms: usize,
) -> impl Strategy<Value = Vec<(Vec<u32>, i64)>> {
    terms_between(nvars, 0, max_deg, max_terms)
}

fn terms_between(
    nvars: usize,
    min_deg: u32,
    max_deg: u32,
    max_terms: usize,
) -> impl Strategy<Value = Vec<(Vec<u32>, i64)>> {
    prop::collection::vec(
        (prop::collection::vec(0..=max_deg, nvars), -9i64..=9),
        0..=max_terms,
    )
    .prop_map(move |ts| {
        ts.into_iter()
            .filter(|(e, _)| (min_deg..=max_deg).contains(&e.iter().sum::<u32>()))
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gcd_divides_and_contains_common_factor(
        a in terms(3, 2, 4),
        b in terms(3, 2, 4),
        c in terms(3, 2, 3),
    ) {
        let q = Field::rational();
        let (a, b, c) = (poly(&q, 3, &a), poly(&q, 3, &b), poly(&q, 3, &c));
        prop_assume!(!c.is_zero());
        let (x, y) = (&a * &c, &b * &c);
        let g = gcd(&x, &y);
        if x.is_zero() && y.is_zero() {
            prop_assert!(g.is_zero());
        } else {
            prop_assert!(x.div_exact(&g).is_some());
            prop_assert!(y.div_exact(&g).is_some());
            prop_assert!(g.div_exact(&c.monic()).is_some());
        }
    }

    #[test]
    fn gcd_over_prime_field(a in terms(2, 3, 4), b in terms(2, 3, 4), c in terms(2, 2, 3)) {
        let f = Field::prime(101).unwrap();
        let (a, b, c) = (poly(&f, 2, &a), poly(&f, 2, &b), poly(&f, 2, &c));
        prop_assume!(!c.is_zero() && !(&a * &c).is_zero() && !(&b * &c).is_zero());
        let g = gcd(&(&a * &c), &(&b * &c));
        prop_assert!(g.div_exact(&c.monic()).is_some());
        prop_assert!((&a * &c).div_exact(&g).is_some());
    }

    #[test]
    fn composition_is_associative(
        f in prop::collection::vec(terms(2, 2, 3), 2),
        g in prop::collection::vec(terms(2, 2, 3), 2),
        h in prop::collection::vec(terms(2, 2, 3), 2),
    ) {
        let q = Field::rational();
        let map = |ts: &Vec<Vec<(Vec<u32>, i64)>>| {
            PolyMap::new(&q, 2, ts.iter().map(|t| poly(&q, 2, t)).collect()).unwrap()
        };
        let (f, g, h) = (map(&f), map(&g), map(&h));
        let left = compose_maps(&compose_maps(&f, &g).unwrap(), &h).unwrap();
        let right = compose_maps(&f, &compose_maps(&g, &h).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        prop_assert_eq!(compose_maps(&f, &PolyMap::identity(&q, 2)).unwrap(), f);
    }

    #[test]
    fn text_round_trip(comps in prop::collection::vec(terms(3, 3, 5), 1..4), prime in prop::bool::ANY) {
        let field = if prime { Field::prime(7).unwrap() } else { Field::rational() };
        let h = PolyMap::new(&field, 3, comps.iter().map(|t| poly(&field, 3, t)).collect()).unwrap();
        let text = format_map(&h, MapKind::Components);
        let back = parse_map(&text, None).unwrap();
        prop_assert_eq!(back.field, field);
        let back = back.map.embed_vars(3);
        prop_assert_eq!(&back.components()[..h.ncomponents()], h.components());
    }

    #[test]
    fn triangular_maps_invert(f in terms_between(1, 2, 3, 3), g in terms_between(2, 2, 3, 4)) {
        let q = Field::rational();
        let zero = Polynomial::zero(&q, 3);
        let h = PolyMap::new(
            &q,
            3,
            vec![zero, poly(&q, 1, &f).embed(3, 0), poly(&q, 2, &g).embed(3, 0)],
        )
        .unwrap();
        let f = h.plus_identity().unwrap();
        let inv = invert_keller(&f, None).unwrap();
        let x = PolyMap::identity(&q, 3);
        prop_assert_eq!(compose_maps(&f, &inv).unwrap(), x.clone());
        prop_assert_eq!(compose_maps(&inv, &f).unwrap(), x);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn classification_survives_scrambling(seed in any::<u64>(), which in 0usize..3) {
        let tag = [CaseTag::ZeroTail, CaseTag::TwoVariables, CaseTag::X3Quadric][which];
        let mut corpus = Corpus::new(seed);
        let h = corpus.classification_instance(tag).unwrap();
        let c = classify_rank_le2(&h).unwrap();
        prop_assert_eq!(c.case_tag, tag);
        prop_assert!(c.verify(&h).unwrap());
        prop_assert_eq!(c.round_trip().unwrap(), h);
    }

    #[test]
    fn conjugation_round_trips(seed in any::<u64>()) {
        let mut corpus = Corpus::new(seed);
        let h = corpus.form_ii_scramble(4).unwrap();
        let t = corpus.gl_matrix(4);
        let there = conjugate(&h, &t).unwrap();
        prop_assert_eq!(conjugate(&there, &t.inverse()).unwrap(), h.clone());
        let nf = keller_normal_form(&there).unwrap();
        prop_assert!(nf.verify(&there).unwrap());
    }
}
