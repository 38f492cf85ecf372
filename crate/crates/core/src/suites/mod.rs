//! Verification suites: seeded experiments with machine-readable metrics.

mod pingpong;
mod sampling;

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::Serialize;

use crate::automorphism::Automorphism;
use crate::complex::{cyclic_classes, x_set, BoundedCn, DEFAULT_BOUND};
use crate::error::{Error, Result};
use crate::factor::{is_free_factor, FactorClass, ReductionBudget};
use crate::projection::{farey_distance_vectors, normalize, FareyVertex};
use crate::word::Word;

pub use pingpong::{pingpong_suite, progress_suite, PingPongConstants};
pub use sampling::{
    behrstock_suite, bgit_suite, diameter_suite, equivariance_suite, joint_embedding_suite, near_embedded_suite,
    trichotomy_suite,
};

pub const SUITES: [&str; 10] = [
    "farey-oracle",
    "trichotomy",
    "diameter",
    "behrstock",
    "bgit",
    "near-embedded",
    "joint-embedding",
    "equivariance",
    "xset",
    "progress",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Metric {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl From<usize> for Metric {
    fn from(x: usize) -> Self {
        Metric::Int(x as i64)
    }
}
impl From<u64> for Metric {
    fn from(x: u64) -> Self {
        Metric::Int(x as i64)
    }
}
impl From<bool> for Metric {
    fn from(x: bool) -> Self {
        Metric::Bool(x)
    }
}
impl From<f64> for Metric {
    fn from(x: f64) -> Self {
        Metric::Float(x)
    }
}
impl From<String> for Metric {
    fn from(x: String) -> Self {
        Metric::Text(x)
    }
}
impl From<&str> for Metric {
    fn from(x: &str) -> Self {
        Metric::Text(x.to_string())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub samples: usize,
    pub seed: u64,
    pub metrics: BTreeMap<String, Metric>,
    /// First few failing cases, for diagnosis.
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub(crate) fn new(suite: &str, samples: usize, seed: u64) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            passed: true,
            samples,
            seed,
            metrics: BTreeMap::new(),
            failures: Vec::new(),
        }
    }

    pub(crate) fn metric(&mut self, key: &str, v: impl Into<Metric>) {
        self.metrics.insert(key.to_string(), v.into());
    }

    pub(crate) fn fail(&mut self, msg: String) {
        self.passed = false;
        if self.failures.len() < 10 {
            self.failures.push(msg);
        }
    }

    pub fn int(&self, key: &str) -> Option<i64> {
        match self.metrics.get(key) {
            Some(Metric::Int(x)) => Some(*x),
            _ => None,
        }
    }
}

/// Options shared by the suites.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SuiteOptions {
    pub samples: Option<usize>,
    pub seed: u64,
}

/// Runs a suite by name with its default sample count unless overridden.
pub fn run_suite(name: &str, opts: SuiteOptions) -> Result<SuiteReport> {
    let n = |d: usize| opts.samples.unwrap_or(d);
    let seed = opts.seed;
    match name {
        "farey-oracle" => farey_oracle_suite(30),
        "trichotomy" => trichotomy_suite(n(50), seed),
        "diameter" => diameter_suite(n(50), seed, 10),
        "behrstock" => behrstock_suite(n(200), seed, None),
        "bgit" => bgit_suite(n(50), seed, 4, None),
        "near-embedded" => near_embedded_suite(n(200), seed),
        "joint-embedding" => joint_embedding_suite(n(100), seed),
        "equivariance" => equivariance_suite(n(100), n(50), seed),
        "xset" => xset_suite(DEFAULT_BOUND),
        "whitehead" => whitehead_suite(6),
        "progress" => progress_suite(PingPongConstants::default()),
        other => Err(Error::Unsupported(format!("unknown suite {other}"))),
    }
}

/// Farey distances by BFS on the Farey graph restricted to primitive
/// vectors with coordinates bounded by `r`. Geodesics between two such
/// vertices only pass through Stern–Brocot ancestors of the endpoints, so the
/// restriction is harmless.
pub fn farey_bfs_table(r: i64) -> (Vec<FareyVertex>, Vec<Vec<u32>>) {
    let mut vs: Vec<FareyVertex> = Vec::new();
    for p in 0..=r {
        for q in -r..=r {
            let v = (p, q);
            if v == (0, 0) || num_integer::Integer::gcd(&p, &q) != 1 || normalize(v) != v {
                continue;
            }
            vs.push(v);
        }
    }
    let index: HashMap<FareyVertex, usize> = vs.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    // neighbours by mediants and their inverses: u ~ v iff |det| = 1
    let adj: Vec<Vec<usize>> = vs
        .iter()
        .map(|&u| {
            vs.iter()
                .filter(|&&v| (u.0 * v.1 - u.1 * v.0).abs() == 1)
                .map(|v| index[v])
                .collect()
        })
        .collect();
    let mut table = vec![vec![u32::MAX; vs.len()]; vs.len()];
    for s in 0..vs.len() {
        let row = &mut table[s];
        row[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(x) = q.pop_front() {
            for &y in &adj[x] {
                if row[y] == u32::MAX {
                    row[y] = row[x] + 1;
                    q.push_back(y);
                }
            }
        }
    }
    (vs, table)
}

/// Compares the continued-fraction distance with BFS for all pairs of
/// slopes with `|p|, |q| ≤ r`.
pub fn farey_oracle_suite(r: i64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("farey-oracle", 0, 0);
    let (vs, table) = farey_bfs_table(r);
    let mut pairs = 0usize;
    let mut mismatches = 0usize;
    let mut max_d = 0u32;
    for i in 0..vs.len() {
        for j in i..vs.len() {
            pairs += 1;
            let d = farey_distance_vectors(vs[i], vs[j])?;
            max_d = max_d.max(table[i][j]);
            if d != table[i][j] as u64 {
                mismatches += 1;
                rep.fail(format!("{:?} {:?}: {} vs bfs {}", vs[i], vs[j], d, table[i][j]));
            }
        }
    }
    rep.samples = pairs;
    rep.metric("vertices", vs.len());
    rep.metric("pairs", pairs);
    rep.metric("mismatches", mismatches);
    rep.metric("max_distance", max_d as u64);
    Ok(rep)
}

/// The primitive class of `F_2` with abelianization `±v`, built by the
/// Euclidean algorithm. Primitive classes of `F_2` are determined by their
/// abelianization up to inversion.
pub fn primitive_with_abelianization(v: FareyVertex) -> Option<Word> {
    let (mut p, mut q) = v;
    if num_integer::Integer::gcd(&p, &q) != 1 {
        return None;
    }
    // build φ with φ(a) ↦ (p, q) from elementary moves, in reverse
    let mut moves: Vec<Automorphism> = Vec::new();
    let parse = |s: &str| Automorphism::parse(s).expect("valid");
    if p < 0 {
        p = -p;
        moves.push(parse("A,b"));
    }
    if q < 0 {
        q = -q;
        moves.push(parse("a,B"));
    }
    // now p, q ≥ 0; reduce (p, q) to (1, 0) or (0, 1)
    let mut steps: Vec<Automorphism> = Vec::new();
    while p > 0 && q > 0 {
        if p >= q {
            // (p, q) = image of (p - q, q) under a ↦ a, b ↦ ab
            steps.push(parse("a,ab"));
            p -= q;
        } else {
            steps.push(parse("ab,b"));
            q -= p;
        }
    }
    let start = if p == 1 { Word::parse(2, "a").ok()? } else { Word::parse(2, "b").ok()? };
    let mut w = start;
    for s in steps.iter().rev() {
        w = s.apply(&w).ok()?;
    }
    for m in moves.iter().rev() {
        w = m.apply(&w).ok()?;
    }
    Some(w)
}

/// `is_free_factor(⟨w⟩)` against the abelianization oracle for every
/// cyclic class of length `≤ max_len` in `F_2`.
pub fn whitehead_suite(max_len: usize) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("whitehead", 0, 0);
    let mut checked = 0usize;
    let mut primitive = 0usize;
    for w in cyclic_classes(2, max_len) {
        checked += 1;
        let ab = w.abelianize();
        let oracle = match primitive_with_abelianization((ab[0], ab[1])) {
            None => false,
            Some(u) => {
                let k = w.cyclic_class_key();
                k == u.cyclic_class_key() || k == u.inverse().cyclic_class_key()
            }
        };
        let verdict = is_free_factor(&FactorClass::new(vec![w.clone()])?, ReductionBudget::default())?;
        if verdict.is_free_factor() {
            primitive += 1;
        }
        if verdict.is_free_factor() != oracle {
            rep.fail(format!("{w}: verdict {verdict:?}, oracle {oracle}"));
        }
    }
    for s in ["a,baB", "aa,b"] {
        let v = is_free_factor(&FactorClass::parse(2, s)?, ReductionBudget::default())?;
        if v.is_free_factor() {
            rep.fail(format!("⟨{s}⟩ accepted"));
        }
    }
    rep.samples = checked;
    rep.metric("classes", checked);
    rep.metric("primitive", primitive);
    Ok(rep)
}

/// `X_A` for `A = ⟨a, b⟩ < F_3` and the pairwise distance bound.
pub fn xset_suite(bound: usize) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("xset", 0, 0);
    let a = FactorClass::parse(3, "a,b")?;
    let x = x_set(&a, bound)?;
    let mut g = BoundedCn::new(3, bound.min(4))?;
    let d = x.diameter_bound(&mut g)?;
    rep.samples = d.members;
    rep.metric("bound", bound);
    rep.metric("members", d.members);
    rep.metric("pairs", d.pairs);
    rep.metric("unhubbed", d.unhubbed.len());
    match d.max_upper {
        Some(m) => {
            rep.metric("max_upper", m);
            if m > 2 {
                rep.fail(format!("diameter upper bound {m} > 2"));
            }
        }
        None => rep.fail("some pair has no certified path".into()),
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_farey_oracle() {
        let r = farey_oracle_suite(6).unwrap();
        assert!(r.passed, "{:?}", r.failures);
    }

    #[test]
    fn primitive_words_by_abelianization() {
        let w = primitive_with_abelianization((2, 3)).unwrap();
        assert_eq!(w.abelianize(), vec![2, 3]);
        let w = primitive_with_abelianization((-1, 2)).unwrap();
        assert_eq!(w.abelianize(), vec![-1, 2]);
        assert!(primitive_with_abelianization((2, 2)).is_none());
    }

    #[test]
    fn small_whitehead_suite() {
        let r = whitehead_suite(4).unwrap();
        assert!(r.passed, "{:?}", r.failures);
    }
}
