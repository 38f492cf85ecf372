use proptest::prelude::*;
use subfactor_core::stallings::{contained_up_to_conjugacy, subgroup_graph};
use subfactor_core::{FactorClass, Word};

fn w(rank: usize, s: &str) -> Word {
    Word::parse(rank, s).unwrap()
}

fn word(rank: usize, max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((1..=rank as i32, any::<bool>()).prop_map(|(i, s)| if s { i } else { -i }), 1..max)
        .prop_map(move |l| Word::reduce(rank, &l).unwrap())
        .prop_filter("nontrivial", |x| !x.is_identity())
}

#[test]
fn folding_examples() {
    // ⟨ab, aB⟩ folds to two vertices
    let g = subgroup_graph(&[w(2, "ab"), w(2, "aB")]).unwrap();
    assert!(g.is_folded());
    assert_eq!(g.rank(), 2);
    assert_eq!(g.num_vertices(), 2);
    // ⟨a, aba⁻¹⟩ is ⟨a, b⟩
    let g = subgroup_graph(&[w(2, "a"), w(2, "abA")]).unwrap();
    assert_eq!(g.num_vertices(), 1);
    assert!(g.contains_element(&w(2, "bab")));
}

#[test]
fn membership_and_rewriting() {
    let g = subgroup_graph(&[w(3, "ab"), w(3, "cA")]).unwrap();
    assert!(g.contains_element(&w(3, "abcA")));
    assert!(!g.contains_element(&w(3, "a")));
    let x = g.rewrite(&w(3, "abcAcA")).unwrap();
    assert_eq!(x.to_string(), "abb");
}

#[test]
fn conjugacy_classes_of_subgroups() {
    let a = FactorClass::parse(3, "a,b").unwrap();
    let b = FactorClass::parse(3, "caC,cbC").unwrap();
    assert_eq!(a, b);
    assert_eq!(a.code(), b.code());
    let c = FactorClass::parse(3, "ab").unwrap();
    assert!(contained_up_to_conjugacy(c.core(), a.core()));
    assert!(!contained_up_to_conjugacy(a.core(), c.core()));
}

proptest! {
    #[test]
    fn generators_are_members(gens in prop::collection::vec(word(3, 8), 1..4)) {
        let g = subgroup_graph(&gens).unwrap();
        prop_assert!(g.is_folded());
        for x in &gens {
            prop_assert!(g.contains_element(x));
        }
        // the spanning-tree basis generates the same subgroup
        let h = subgroup_graph(&g.basis()).unwrap();
        prop_assert_eq!(h.based_code(), g.based_code());
    }

    #[test]
    fn canonical_code_ignores_conjugation(gens in prop::collection::vec(word(3, 6), 1..3), c in word(3, 5)) {
        let a = FactorClass::new(gens.clone()).unwrap();
        let b = FactorClass::new(gens.iter().map(|x| x.conjugate_by(&c)).collect()).unwrap();
        prop_assert_eq!(a.code(), b.code());
    }

    #[test]
    fn rewriting_recovers_elements(gens in prop::collection::vec(word(3, 6), 1..3), idx in prop::collection::vec(0usize..6, 0..6)) {
        let g = subgroup_graph(&gens).unwrap();
        let basis = g.basis();
        let mut x = Word::identity(3);
        for i in idx {
            x = x.mul(&basis[i % basis.len()]);
        }
        let coords = g.rewrite(&x).unwrap();
        let back = coords.letters().iter().fold(Word::identity(3), |acc, &l| {
            let b = &basis[l.unsigned_abs() as usize - 1];
            acc.mul(&if l > 0 { b.clone() } else { b.inverse() })
        });
        prop_assert_eq!(back, x);
    }
}
