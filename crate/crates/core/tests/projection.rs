use std::collections::BTreeSet;

use proptest::prelude::*;
use subfactor_core::projection::{
    adjacent, behrstock_check, classify_pair, farey_distance, farey_distance_vectors, normalize, overlap_obstruction,
    project_factor, project_graph, Classification, ClassifyBudget, OverlapReason, SamplingConfig,
};
use subfactor_core::sample::{random_automorphism, random_free_factor, random_marked_graph, rng};
use subfactor_core::suites::farey_bfs_table;
use subfactor_core::{FactorClass, MarkedGraph};

fn fc(rank: usize, s: &str) -> FactorClass {
    FactorClass::parse(rank, s).unwrap()
}

#[test]
fn farey_examples() {
    assert_eq!(farey_distance(&fc(2, "a"), &fc(2, "b")).unwrap(), 1);
    assert_eq!(farey_distance(&fc(2, "a"), &fc(2, "aB")).unwrap(), 1);
    assert_eq!(farey_distance(&fc(2, "a"), &fc(2, "abb")).unwrap(), 2);
    assert_eq!(farey_distance_vectors((1, 0), (1, 0)).unwrap(), 0);
    assert!(adjacent((2, 3), (1, 1)));
    assert_eq!(normalize((-2, 3)), normalize((2, -3)));
}

#[test]
fn classification_examples() {
    let b = ClassifyBudget::default();
    let c = classify_pair(&fc(3, "a,b"), &fc(3, "ab,c"), &b).unwrap();
    assert!(matches!(c, Classification::Overlap { reason: OverlapReason::RankSum }));
    assert!(classify_pair(&fc(3, "a,b"), &fc(3, "c"), &b).unwrap().is_disjoint());
    assert!(matches!(classify_pair(&fc(2, "a"), &fc(2, "a,b"), &b).unwrap(), Classification::ContainedIn));
    assert!(matches!(classify_pair(&fc(2, "a,b"), &fc(2, "bab"), &b).unwrap(), Classification::Contains));
    // mod-2 colors of ⟨ab⟩ and ⟨aB⟩ coincide
    assert_eq!(overlap_obstruction(&fc(3, "ab"), &fc(3, "aB")), Some(OverlapReason::Mod2Color));
    assert!(classify_pair(&fc(3, "a,b"), &fc(3, "a"), &b).is_ok());
    assert!(classify_pair(&fc(3, "a,b"), &fc(2, "a"), &b).is_err());
}

#[test]
fn worked_projection() {
    let g = MarkedGraph::rose_with_marking(
        ["ab", "c", "b"].iter().map(|s| subfactor_core::Word::parse(3, s).unwrap()).collect(),
    )
    .unwrap();
    let p = project_graph(&fc(3, "a,b"), &g).unwrap();
    assert_eq!(p.members, BTreeSet::from([fc(2, "ab"), fc(2, "b")]));
    assert_eq!(p.diameter().unwrap().upper, Some(1));
    let cfg = SamplingConfig { samples: 1, ..Default::default() };
    let p = project_factor(&fc(3, "a,b"), &fc(3, "ab,c"), &cfg).unwrap();
    assert_eq!(p.diameter().unwrap().upper, Some(1));
}

#[test]
fn behrstock_worked_example() {
    let r = behrstock_check(&fc(3, "a,b"), &fc(3, "b,c"), &MarkedGraph::rose(3), &SamplingConfig::default()).unwrap();
    assert!(r.min_upper.unwrap() <= 2, "{r:?}");
}

#[test]
fn farey_distance_matches_bfs_on_a_small_box() {
    let (vs, table) = farey_bfs_table(8);
    for i in 0..vs.len() {
        for j in 0..vs.len() {
            assert_eq!(farey_distance_vectors(vs[i], vs[j]).unwrap(), table[i][j] as u64);
        }
    }
}

fn slope() -> impl Strategy<Value = (i64, i64)> {
    use num_integer::Integer;
    (-40i64..40, -40i64..40)
        .prop_filter("nonzero", |v| *v != (0, 0))
        .prop_map(|(x, y)| {
            let g = x.gcd(&y);
            (x / g, y / g)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn farey_triangle_inequality(p in slope(), q in slope(), r in slope()) {
        let d = |x, y| farey_distance_vectors(x, y).unwrap();
        prop_assert!(d(p, r) <= d(p, q) + d(q, r));
        prop_assert_eq!(d(p, q), d(q, p));
    }

    #[test]
    fn projection_is_equivariant(seed in 0u64..2000) {
        let mut r = rng(seed);
        let a = random_free_factor(3, 2, 3, &mut r);
        let g = random_marked_graph(3, 3, 1, &mut r);
        let phi = random_automorphism(3, 4, &mut r);
        let pa = FactorClass::new(a.gens().iter().map(|w| phi.apply(w).unwrap()).collect()).unwrap();
        let p0 = project_graph(&a, &g).unwrap();
        let p1 = project_graph(&pa, &g.act(&phi).unwrap()).unwrap();
        prop_assert_eq!(p0.members, p1.members);
    }

    #[test]
    fn verdicts_are_exclusive(seed in 0u64..2000) {
        let mut r = rng(seed);
        let a = random_free_factor(3, 1 + (seed % 2) as usize, 3, &mut r);
        let b = random_free_factor(3, 1, 3, &mut r);
        let c = classify_pair(&a, &b, &ClassifyBudget::default()).unwrap();
        let contained = a.is_contained_in(&b) || b.is_contained_in(&a);
        let obstructed = overlap_obstruction(&a, &b).is_some();
        match c {
            Classification::ContainedIn | Classification::Contains => prop_assert!(contained),
            Classification::Disjoint { .. } => prop_assert!(!contained && !obstructed),
            Classification::Overlap { .. } => prop_assert!(!contained && obstructed),
            Classification::Unknown { .. } => prop_assert!(!contained && !obstructed),
        }
    }
}
