use proptest::prelude::*;
use subfactor_core::marked::MarkedGraphRecord;
use subfactor_core::projection::omega_data;
use subfactor_core::sample::{random_automorphism, random_free_factor, random_marked_graph, rng};
use subfactor_core::{FactorClass, Immersion, MarkedGraph, Word};

fn w(s: &str) -> Word {
    Word::parse(3, s).unwrap()
}

#[test]
fn rejects_markings_that_are_not_bases() {
    assert!(MarkedGraph::rose_with_marking(vec![w("a"), w("a"), w("c")]).is_err());
    assert!(MarkedGraph::rose_with_marking(vec![w("aa"), w("b"), w("c")]).is_err());
    assert!(MarkedGraph::rose_with_marking(vec![w("ab"), w("b"), w("cA")]).is_ok());
}

#[test]
fn cover_of_a_sub_rose_embeds() {
    let g = MarkedGraph::rose(3);
    let h = Immersion::cover_core(&FactorClass::parse(3, "a,b").unwrap(), &g).unwrap();
    assert!(h.is_embedding());
    let h = Immersion::cover_core(&FactorClass::parse(3, "ab,aB").unwrap(), &g).unwrap();
    assert!(!h.is_embedding());
}

#[test]
fn omega_example() {
    // in the cover for ⟨ab, aB⟩ the b-petal lifts to two edges between the
    // same two vertices, so Ω̃ is a cycle
    let d = omega_data(&FactorClass::parse(3, "ab,aB").unwrap(), &MarkedGraph::rose(3), None).unwrap();
    assert_eq!(d.summary().omega, vec![1]);
    assert!(!d.is_nearly_embedded());
}

#[test]
fn records_round_trip() {
    let g = MarkedGraph::rose_with_marking(vec![w("ab"), w("c"), w("b")]).unwrap();
    let g = g.blow_up(0, &[(0, true), (0, false)]).unwrap();
    let text = serde_json::to_string(&g.to_record()).unwrap();
    let r: MarkedGraphRecord = serde_json::from_str(&text).unwrap();
    let h = r.to_graph().unwrap();
    assert_eq!(h.marking(), g.marking());
    assert_eq!(h.edges(), g.edges());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn translation_length_is_a_class_function(seed in 0u64..1000, u in "[abcABC]{1,8}", c in "[abcABC]{0,5}") {
        let g = random_marked_graph(3, 4, 2, &mut rng(seed));
        let u = w(&u);
        prop_assume!(!u.is_identity());
        let c = w(&c);
        prop_assert_eq!(g.translation_length(&u), g.translation_length(&u.conjugate_by(&c)));
    }

    #[test]
    fn covers_are_equivariant(seed in 0u64..1000) {
        let mut r = rng(seed);
        let a = random_free_factor(3, 2, 3, &mut r);
        let g = random_marked_graph(3, 3, 1, &mut r);
        let phi = random_automorphism(3, 3, &mut r);
        let h0 = Immersion::cover_core(&a, &g).unwrap();
        let h1 = Immersion::cover_core(&a.apply(&phi).unwrap(), &g.act(&phi).unwrap()).unwrap();
        prop_assert_eq!(h0.num_edges(), h1.num_edges());
        prop_assert_eq!(h0.multiplicity(g.num_edges()), h1.multiplicity(g.num_edges()));
    }
}
