use num_rational::Ratio;
use proptest::prelude::*;
use subfactor_core::irreducible::{
    choose_power, cyclic_syllable_length, fill_check, pingpong_word, restriction, shipped_pair, syllable_power,
    translation_estimate, EvidenceConfig, PingPongSpec,
};
use subfactor_core::{Automorphism, Error, FactorClass};

fn fc(s: &str) -> FactorClass {
    FactorClass::parse(3, s).unwrap()
}

#[test]
fn non_filling_pair_has_witness() {
    let r = fill_check(&fc("a,b"), &fc("b,c"), 3).unwrap();
    assert!(r.witnesses().iter().any(|v| v.code == fc("cA").code()));
}

#[test]
fn restriction_composes() {
    let a = fc("a,b");
    let f = Automorphism::parse("b,ab,c").unwrap();
    let g = Automorphism::parse("ab,b,cb").unwrap();
    let lhs = restriction(&f.compose(&g), &a).unwrap();
    let rhs = restriction(&f, &a).unwrap().compose(&restriction(&g, &a).unwrap());
    assert_eq!(lhs.abelian_matrix(), rhs.abelian_matrix());
}

#[test]
fn translation_of_fibonacci_power() {
    let fib = Automorphism::parse("b,ab").unwrap();
    let t1 = translation_estimate(&fib, 8).unwrap();
    let t2 = translation_estimate(&fib.pow(2).unwrap(), 8).unwrap();
    assert!(t1 > Ratio::from_integer(0));
    assert!(t2 >= t1);
}

#[test]
fn shipped_pair_power() {
    let (f, g, a, b) = shipped_pair().unwrap();
    let spec = PingPongSpec::new(f, g, a, b, 1).unwrap();
    let (fa, gb) = spec.restrictions().unwrap();
    let (n, tf, tg) = choose_power(&fa, &gb, 2, 2, 8).unwrap();
    assert_eq!((tf, tg), (Ratio::from_integer(1), Ratio::from_integer(1)));
    assert_eq!(n, 16);
}

#[test]
fn pingpong_rejects_bad_syllables() {
    let (f, g, a, b) = shipped_pair().unwrap();
    let spec = PingPongSpec::new(f, g, a, b, 1).unwrap();
    let cfg = EvidenceConfig { bound: 3, ..Default::default() };
    assert!(matches!(pingpong_word(&spec, &[1], &cfg), Err(Error::BadSyllables(_))));
    assert!(matches!(pingpong_word(&spec, &[1, 0], &cfg), Err(Error::BadSyllables(_))));
}

#[test]
fn spec_requires_invariant_factors() {
    let f = Automorphism::parse("b,ab,c").unwrap();
    let g = Automorphism::parse("a,c,bc").unwrap();
    assert!(PingPongSpec::new(f.clone(), g.clone(), fc("a,b"), fc("b,c"), 1).is_ok());
    assert!(PingPongSpec::new(g, f, fc("a,b"), fc("b,c"), 1).is_err());
}

proptest! {
    #[test]
    fn syllable_length_is_multiplicative(half in prop::collection::vec((1i64..4, any::<bool>()), 1..4), m in 1usize..5) {
        let e: Vec<i64> = half.iter().flat_map(|&(x, s)| [if s { x } else { -x }, x]).collect();
        prop_assert_eq!(cyclic_syllable_length(&syllable_power(&e, m)), m * cyclic_syllable_length(&e));
    }
}
