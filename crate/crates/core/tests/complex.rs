use subfactor_core::complex::{
    chain_progress_verify, cn_distance_bounds, cyclic_classes, is_cn_edge, is_primitive, x_set, BoundedCn, CVertex,
    Chain, EdgeTest,
};
use subfactor_core::projection::SamplingConfig;
use subfactor_core::{Error, FactorClass, Word};

fn v(s: &str) -> CVertex {
    CVertex::parse(3, s).unwrap()
}

#[test]
fn primitivity() {
    for (s, p) in [("a", true), ("abC", true), ("aa", false), ("abAB", false), ("abab", false), ("aab", true)] {
        assert_eq!(is_primitive(&Word::parse(3, s).unwrap()).unwrap(), p, "{s}");
    }
    assert!(CVertex::parse(3, "aa").is_err());
}

#[test]
fn edges_of_c3() {
    assert!(is_cn_edge(&v("a"), &v("b")).unwrap().is_edge());
    assert!(is_cn_edge(&v("a"), &v("bc")).unwrap().is_edge());
    // ⟨ab⟩ and ⟨aB⟩ have the same mod-2 class
    assert!(matches!(is_cn_edge(&v("ab"), &v("aB")).unwrap(), EdgeTest::NotEdge { .. }));
    assert_eq!(is_cn_edge(&v("a"), &v("a")).unwrap_err(), Error::SameVertex);
}

#[test]
fn distances() {
    let d = cn_distance_bounds(&v("a"), &v("b"), 3).unwrap();
    assert_eq!((d.lower, d.upper), (1, Some(1)));
    let d = cn_distance_bounds(&v("ab"), &v("aB"), 3).unwrap();
    assert_eq!((d.lower, d.upper), (2, Some(2)));
    assert_eq!(d.path.len(), 3);
}

#[test]
fn cyclic_class_counts() {
    // cyclic words of length 1 and 2 in F_2 up to inversion: a, b; aa, bb, ab, aB
    assert_eq!(cyclic_classes(2, 2).len(), 6);
    let all = cyclic_classes(3, 4);
    assert!(all.windows(2).all(|p| p[0].len() <= p[1].len()));
}

#[test]
fn x_set_small_bound() {
    let a = FactorClass::parse(3, "a,b").unwrap();
    let x = x_set(&a, 3).unwrap();
    assert!(x.contains(&v("c")));
    assert!(x.contains(&v("cA")));
    assert!(!x.contains(&v("ab")));
    let mut g = BoundedCn::new(3, 3).unwrap();
    let d = x.diameter_bound(&mut g).unwrap();
    assert_eq!(d.max_upper, Some(2));
    assert!(x_set(&FactorClass::parse(3, "a").unwrap(), 3).is_err());
}

#[test]
fn factor_chain_hypotheses() {
    let chain = Chain::Factors(vec![
        FactorClass::parse(3, "a,b").unwrap(),
        FactorClass::parse(3, "b,c").unwrap(),
        FactorClass::parse(3, "a,b").unwrap(),
    ]);
    // X_{⟨a,b⟩} and X_{⟨b,c⟩} share ⟨cA⟩, so the progress condition fails
    let r = chain_progress_verify(&chain, 3, 2, &SamplingConfig::default());
    match r {
        Ok(r) => assert!(!r.passed),
        Err(e) => assert!(matches!(e, Error::ChainHypothesis { .. })),
    }
}
