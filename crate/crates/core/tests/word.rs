use proptest::prelude::*;
use subfactor_core::word::reduce_letters;
use subfactor_core::{Automorphism, Word};

fn letters(rank: i32, max: usize) -> impl Strategy<Value = Vec<i32>> {
    prop::collection::vec((1..=rank, any::<bool>()).prop_map(|(i, s)| if s { i } else { -i }), 0..max)
}

fn word(rank: usize, max: usize) -> impl Strategy<Value = Word> {
    letters(rank as i32, max).prop_map(move |l| Word::reduce(rank, &l).unwrap())
}

#[test]
fn parse_and_display() {
    let w = Word::parse(3, "abCaaB").unwrap();
    assert_eq!(w.letters(), &[1, 2, -3, 1, 1, -2]);
    assert_eq!(w.to_string(), "abCaaB");
    assert_eq!(Word::parse(2, "aA").unwrap().len(), 0);
    assert!(Word::parse(2, "c").is_err());
    assert!(Word::parse(2, "a1").is_err());
    assert_eq!(Word::parse_list(3, "a, bc").unwrap().len(), 2);
}

#[test]
fn cyclic_reduction_example() {
    let w = Word::parse(3, "bacB").unwrap();
    let (core, conj) = w.cyclic_reduce();
    assert_eq!(core.to_string(), "ac");
    assert_eq!(core.conjugate_by(&conj), w);
    assert_eq!(w.cyclic_len(), 2);
}

#[test]
fn automorphism_examples() {
    let f = Automorphism::parse("b,ab").unwrap();
    let w = Word::parse(2, "ab").unwrap();
    assert_eq!(f.apply(&w).unwrap().to_string(), "bab");
    let g = f.inverse().unwrap();
    assert!(f.compose(&g).is_identity());
    assert_eq!(f.abelian_matrix(), vec![vec![0, 1], vec![1, 1]]);
    assert!(Automorphism::parse("a,a").is_err());
}

proptest! {
    #[test]
    fn reduction_is_idempotent(l in letters(3, 30)) {
        let r = reduce_letters(l.iter().copied());
        prop_assert_eq!(reduce_letters(r.iter().copied()), r.clone());
        prop_assert!(r.windows(2).all(|p| p[0] != -p[1]));
    }

    #[test]
    fn group_laws(u in word(3, 12), v in word(3, 12), w in word(3, 12)) {
        prop_assert_eq!(u.mul(&v).mul(&w), u.mul(&v.mul(&w)));
        prop_assert!(u.mul(&u.inverse()).is_identity());
        prop_assert_eq!(u.mul(&v).inverse(), v.inverse().mul(&u.inverse()));
    }

    #[test]
    fn abelianization_is_a_homomorphism(u in word(3, 12), v in word(3, 12)) {
        let sum: Vec<i64> = u.abelianize().iter().zip(v.abelianize()).map(|(x, y)| x + y).collect();
        prop_assert_eq!(u.mul(&v).abelianize(), sum);
    }

    #[test]
    fn cyclic_key_is_a_conjugacy_invariant(u in word(3, 12), g in word(3, 8)) {
        prop_assert_eq!(u.conjugate_by(&g).cyclic_class_key(), u.cyclic_class_key());
    }

    #[test]
    fn display_round_trips(u in word(4, 20)) {
        prop_assert_eq!(Word::parse(4, &u.to_string()).unwrap(), u);
    }

    #[test]
    fn automorphisms_are_homomorphisms(u in word(3, 10), v in word(3, 10), seed in 0u64..500) {
        let phi = subfactor_core::sample::random_automorphism(3, 4, &mut subfactor_core::sample::rng(seed));
        prop_assert_eq!(phi.apply(&u.mul(&v)).unwrap(), phi.apply(&u).unwrap().mul(&phi.apply(&v).unwrap()));
        let inv = phi.inverse().unwrap();
        prop_assert_eq!(inv.apply(&phi.apply(&u).unwrap()).unwrap(), u);
    }
}
