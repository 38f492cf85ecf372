//! Ping-pong construction of outer automorphisms from a pair of filling
//! factors, with bounded evidence of full irreducibility.

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::automorphism::Automorphism;
use crate::complex::{
    act_farey, chain_progress_verify, cyclic_classes, mat2_pow, primitive_vertices, CVertex, CVertexRecord, Chain,
    ChainReport, TranslatedChain,
};
use crate::error::{Error, Result};
use crate::factor::{disjoint_reduction, FactorClass, FactorRecord, ReductionBudget};
use crate::projection::{farey_distance_vectors, overlap_obstruction, SamplingConfig};
use crate::stallings::{conjugator_between, subgroup_graph};
use crate::word::Word;

/// Outcome of the bounded search for a rank-1 factor disjoint from both.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "result")]
pub enum FillResult {
    /// All witnesses of the least size found; `A` and `B` do not fill.
    Witnesses { size: usize, witnesses: Vec<CVertexRecord> },
    /// Nothing of size `≤ bound`; inconclusive beyond it.
    NoWitnessFound {
        bound: usize,
        searched: usize,
        /// Candidates excluded by homology alone.
        obstructed: usize,
    },
}

impl FillResult {
    pub fn witnesses(&self) -> &[CVertexRecord] {
        match self {
            FillResult::Witnesses { witnesses, .. } => witnesses,
            FillResult::NoWitnessFound { .. } => &[],
        }
    }
    pub fn found_none(&self) -> bool {
        matches!(self, FillResult::NoWitnessFound { .. })
    }
}

/// Searches rank-1 factors of size `≤ bound` disjoint from both `A` and `B`.
pub fn fill_check(a: &FactorClass, b: &FactorClass, bound: usize) -> Result<FillResult> {
    let n = a.ambient_rank();
    let mut searched = 0;
    let mut obstructed = 0;
    let mut found: Vec<CVertexRecord> = Vec::new();
    let mut found_size = None;
    for w in cyclic_classes(n, bound) {
        if found_size.is_some_and(|s| w.len() > s) {
            break;
        }
        searched += 1;
        let c = FactorClass::new(vec![w.clone()])?;
        if overlap_obstruction(a, &c).is_some() || overlap_obstruction(b, &c).is_some() {
            obstructed += 1;
            continue;
        }
        let budget = ReductionBudget::default();
        if disjoint_reduction(a, &c, budget)?.is_some() && disjoint_reduction(b, &c, budget)?.is_some() {
            found.push(CVertex::new(w.clone())?.record());
            found_size = Some(w.len());
        }
    }
    Ok(match found_size {
        Some(size) => FillResult::Witnesses { size, witnesses: found },
        None => FillResult::NoWitnessFound {
            bound,
            searched,
            obstructed,
        },
    })
}

/// `f|_A` in the basis `gens(A)`, after conjugating `f(A)` onto `A`.
pub fn restriction(f: &Automorphism, a: &FactorClass) -> Result<Automorphism> {
    if a.apply(f)? != *a {
        return Err(Error::NoConjugator(format!("f does not preserve {a}")));
    }
    let images: Vec<Word> = a.gens().iter().map(|w| f.apply(w)).collect::<Result<_>>()?;
    let h1 = subgroup_graph(&images)?;
    let c = conjugator_between(&h1, a.based())
        .ok_or_else(|| Error::NoConjugator(format!("f(A) and A are not conjugate for {a}")))?;
    let local: Vec<Word> = images
        .iter()
        .map(|w| a.coordinates(&w.conjugate_by(&c)))
        .collect::<Result<_>>()?;
    Automorphism::new(local)
}

/// Lower bound on the Farey translation length of a rank-2 automorphism:
/// the best `d(v, h^k v) / k` over `k ≤ k_max` and seeds `⟨a⟩, ⟨b⟩, ⟨ab⟩`.
pub fn translation_estimate(h: &Automorphism, k_max: u32) -> Result<Ratio<i64>> {
    if h.rank() != 2 {
        return Err(Error::RankMismatch {
            expected: 2,
            found: h.rank(),
        });
    }
    let m = h.abelian_matrix();
    let m = [[m[0][0] as i128, m[0][1] as i128], [m[1][0] as i128, m[1][1] as i128]];
    let mut best = Ratio::from_integer(0);
    for k in 1..=k_max {
        let mk = mat2_pow(&m, k as i64)?;
        for v in [(1, 0), (0, 1), (1, 1)] {
            let d = farey_distance_vectors(v, act_farey(&mk, v)?)?;
            best = best.max(Ratio::new(d as i64, k as i64));
        }
    }
    Ok(best)
}

/// Length in syllables of the cyclic reduction of an alternating word.
pub fn cyclic_syllable_length(exponents: &[i64]) -> usize {
    let k = exponents.len();
    if k > 1 && k % 2 == 1 {
        k - 1
    } else {
        k
    }
}

/// Syllable exponents of `w^m`, merging adjacent syllables of the same
/// letter.
pub fn syllable_power(exponents: &[i64], m: usize) -> Vec<i64> {
    let mut out: Vec<(usize, i64)> = Vec::new();
    for _ in 0..m {
        for (i, &e) in exponents.iter().enumerate() {
            let letter = i % 2;
            match out.last_mut() {
                Some((l, x)) if *l == letter => {
                    *x += e;
                    if *x == 0 {
                        out.pop();
                    }
                }
                _ => out.push((letter, e)),
            }
        }
    }
    out.into_iter().map(|(_, e)| e).collect()
}

/// Hypotheses of the ping-pong construction.
#[derive(Clone, Debug)]
pub struct PingPongSpec {
    pub f: Automorphism,
    pub g: Automorphism,
    pub a: FactorClass,
    pub b: FactorClass,
    pub n: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct PingPongSpecRecord {
    pub f: String,
    pub g: String,
    pub a: FactorRecord,
    pub b: FactorRecord,
    pub n: u32,
}

impl PingPongSpec {
    pub fn new(f: Automorphism, g: Automorphism, a: FactorClass, b: FactorClass, n: u32) -> Result<Self> {
        if a.rank() < 2 || b.rank() < 2 {
            return Err(Error::Unsupported("ping-pong factors need rank ≥ 2".into()));
        }
        if a.apply(&f)? != a {
            return Err(Error::NoConjugator("f(A) ≠ A".into()));
        }
        if b.apply(&g)? != b {
            return Err(Error::NoConjugator("g(B) ≠ B".into()));
        }
        Ok(PingPongSpec { f, g, a, b, n })
    }

    pub fn record(&self) -> PingPongSpecRecord {
        PingPongSpecRecord {
            f: self.f.to_string(),
            g: self.g.to_string(),
            a: (&self.a).into(),
            b: (&self.b).into(),
            n: self.n,
        }
    }

    pub fn restrictions(&self) -> Result<(Automorphism, Automorphism)> {
        Ok((restriction(&self.f, &self.a)?, restriction(&self.g, &self.b)?))
    }
}

/// The filling pair shipped with the crate: `A = ⟨a, b⟩` and `B = ψ(A)`
/// with `ψ = (a ↦ b, b ↦ aCCaCCC, c ↦ aCCC)`, together with
/// `f = (a ↦ b, b ↦ ab, c ↦ c)` and `g = ψ f ψ⁻¹`. No rank-1 factor is
/// disjoint from both: the homology of `B` has normal vector `(5, 0, 2)`.
pub fn shipped_pair() -> Result<(Automorphism, Automorphism, FactorClass, FactorClass)> {
    let psi = Automorphism::parse("b,aCCaCCC,aCCC")?;
    let f = Automorphism::parse("b,ab,c")?;
    let g = psi.compose(&f).compose(&psi.inverse()?);
    let a = FactorClass::parse(3, "a,b")?;
    let b = a.apply(&psi)?;
    Ok((f, g, a, b))
}

/// Smallest power of two `N` with `τ · N > 2M + 4D` for both restrictions.
pub fn choose_power(f_a: &Automorphism, g_b: &Automorphism, m_emp: u64, d_emp: u64, k_max: u32) -> Result<(u32, Ratio<i64>, Ratio<i64>)> {
    let tf = translation_estimate(f_a, k_max)?;
    let tg = translation_estimate(g_b, k_max)?;
    let tau = tf.min(tg);
    if tau <= Ratio::from_integer(0) {
        return Err(Error::Unsupported("a restriction has no translation on the Farey graph".into()));
    }
    let target = Ratio::from_integer((2 * m_emp + 4 * d_emp) as i64);
    let mut n = 1u32;
    while tau * Ratio::from_integer(n as i64) <= target {
        n *= 2;
    }
    Ok((n, tf, tg))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EvidenceConfig {
    /// Powers `p ≤ P` searched for invariant factors.
    pub powers: usize,
    /// Core size `S` of candidate factors.
    pub factor_size: usize,
    /// Complexity bound for `X`-sets and fill checks.
    pub bound: usize,
    pub m_emp: u64,
    pub sampling: SamplingConfig,
    /// Largest total image length for which `w` is expanded.
    pub expand_limit: usize,
}

impl Default for EvidenceConfig {
    fn default() -> Self {
        EvidenceConfig {
            powers: 6,
            factor_size: 8,
            bound: 8,
            m_emp: 2,
            sampling: SamplingConfig::default(),
            expand_limit: 20_000,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantFactor {
    pub factor: FactorRecord,
    pub power: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantSearch {
    pub powers: usize,
    pub factor_size: usize,
    /// Powers at which `det(M^p ∓ I) ≠ 0` rules out invariant proper
    /// factors of every size (rank 3 only).
    pub excluded_by_homology: Vec<usize>,
    /// Powers at which no short homology class is compatible with an
    /// invariant proper factor of core size `≤ factor_size`.
    pub excluded_at_size: Vec<usize>,
    pub candidates_checked: usize,
    /// Candidates passing the homology test that could not be decided.
    pub undecided: usize,
    pub found: Option<InvariantFactor>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthRow {
    pub syllables: usize,
    /// Lower bound on `d_{C_n}` certified by the prefix chain.
    pub chain_lower_bound: u64,
    /// Projection distance at the last interior index of the prefix chain.
    pub projection: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IrreducibilityEvidence {
    /// Syllable exponents, already multiplied by `N`.
    pub word: Vec<i64>,
    pub invariant_search: InvariantSearch,
    pub growth_table: Vec<GrowthRow>,
    pub chain: ChainReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct PingPongReport {
    pub spec: PingPongSpecRecord,
    pub fill: FillResult,
    pub translation_f: String,
    pub translation_g: String,
    /// `w` itself when small enough to expand.
    pub automorphism: Option<String>,
    /// Abelianization of `w`, entries in decimal.
    pub abelian: Vec<Vec<String>>,
    pub evidence: IrreducibilityEvidence,
}

type BigMat = Vec<Vec<BigInt>>;

fn big(m: &[Vec<i64>]) -> BigMat {
    m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

fn big_identity(n: usize) -> BigMat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

fn big_mul(x: &BigMat, y: &BigMat) -> BigMat {
    let n = x.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(BigInt::zero(), |acc, k| acc + &x[i][k] * &y[k][j]))
                .collect()
        })
        .collect()
}

fn big_pow(m: &BigMat, e: u64) -> BigMat {
    let mut out = big_identity(m.len());
    let mut base = m.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            out = big_mul(&out, &base);
        }
        base = big_mul(&base, &base);
        e >>= 1;
    }
    out
}

/// Bareiss determinant.
fn big_det(mut m: BigMat) -> BigInt {
    let n = m.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n.saturating_sub(1) {
        if m[k][k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

fn shifted(m: &BigMat, s: i64) -> BigMat {
    let mut out = m.clone();
    for (i, row) in out.iter_mut().enumerate() {
        row[i] -= s;
    }
    out
}

/// Abelianization of the syllable word, in the ambient basis.
fn word_abelian(f: &Automorphism, g: &Automorphism, exponents: &[i64]) -> Result<BigMat> {
    let (fm, gm) = (big(&f.abelian_matrix()), big(&g.abelian_matrix()));
    let (fi, gi) = (big(&f.inverse()?.abelian_matrix()), big(&g.inverse()?.abelian_matrix()));
    let mut out = big_identity(f.rank());
    for (i, &e) in exponents.iter().enumerate() {
        let base = match (i % 2 == 0, e >= 0) {
            (true, true) => &fm,
            (true, false) => &fi,
            (false, true) => &gm,
            (false, false) => &gi,
        };
        out = big_mul(&out, &big_pow(base, e.unsigned_abs()));
    }
    Ok(out)
}

/// `w` as an automorphism, or `None` past the size limit.
fn expand(f: &Automorphism, g: &Automorphism, exponents: &[i64], limit: usize) -> Result<Option<Automorphism>> {
    let (fi, gi) = (f.inverse()?, g.inverse()?);
    let mut out = Automorphism::identity(f.rank());
    for (i, &e) in exponents.iter().enumerate() {
        let base = match (i % 2 == 0, e >= 0) {
            (true, true) => f,
            (true, false) => &fi,
            (false, true) => g,
            (false, false) => &gi,
        };
        for _ in 0..e.unsigned_abs() {
            out = out.compose(base);
            if out.size() > limit {
                return Ok(None);
            }
        }
    }
    Ok(Some(out))
}

/// Nonzero integer vectors of `L¹` norm at most `s`, up to sign.
fn short_vectors(n: usize, s: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = vec![0i64; n];
    fn rec(i: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if i == cur.len() {
            let first = cur.iter().find(|&&x| x != 0);
            if first.is_some_and(|&x| x > 0) {
                out.push(cur.clone());
            }
            return;
        }
        for x in -left..=left {
            cur[i] = x;
            rec(i + 1, left - x.abs(), cur, out);
        }
        cur[i] = 0;
    }
    rec(0, s as i64, &mut cur, &mut out);
    out
}

fn apply_big(m: &BigMat, x: &[i64]) -> Vec<BigInt> {
    m.iter()
        .map(|row| row.iter().zip(x).fold(BigInt::zero(), |acc, (a, &b)| acc + a * b))
        .collect()
}

fn det3(x: &[BigInt], y: &[BigInt], z: &[BigInt]) -> BigInt {
    &x[0] * (&y[1] * &z[2] - &y[2] * &z[1]) - &x[1] * (&y[0] * &z[2] - &y[2] * &z[0]) + &x[2] * (&y[0] * &z[1] - &y[1] * &z[0])
}

/// Homology candidates for a `w^p`-invariant proper factor of core size
/// `≤ s`. A rank-1 factor `⟨u⟩` needs `M^p x = ±x` for `x = [u]`, with
/// `|x|₁ ≤ s`. A rank-2 factor spans an `M^p`-invariant plane with a basis of
/// loops of length `≤ s`, hence by two independent short vectors.
fn homology_candidates(mp: &BigMat, s: usize) -> (Vec<Vec<i64>>, usize) {
    let n = mp.len();
    let xs = short_vectors(n, s);
    let big = |x: &[i64]| x.iter().map(|&t| BigInt::from(t)).collect::<Vec<_>>();
    let images: Vec<Vec<BigInt>> = xs.iter().map(|x| apply_big(mp, x)).collect();
    let mut rank1 = Vec::new();
    for (x, y) in xs.iter().zip(&images) {
        let bx = big(x);
        if *y == bx || y.iter().zip(&bx).all(|(a, b)| *a == -b) {
            rank1.push(x.clone());
        }
    }
    let mut planes = 0;
    if n == 3 {
        let bxs: Vec<Vec<BigInt>> = xs.iter().map(|x| big(x)).collect();
        for i in 0..xs.len() {
            for j in i + 1..xs.len() {
                let (x, y) = (&bxs[i], &bxs[j]);
                let cross_zero = (0..3).all(|k| {
                    let (a, b) = ((k + 1) % 3, (k + 2) % 3);
                    (&x[a] * &y[b] - &x[b] * &y[a]).is_zero()
                });
                if cross_zero {
                    continue;
                }
                if det3(x, y, &images[i]).is_zero() && det3(x, y, &images[j]).is_zero() {
                    planes += 1;
                }
            }
        }
    }
    (rank1, planes)
}

fn invariant_search(w: Option<&Automorphism>, abel: &BigMat, cfg: &EvidenceConfig) -> Result<InvariantSearch> {
    let n = abel.len();
    let mut report = InvariantSearch {
        powers: cfg.powers,
        factor_size: cfg.factor_size,
        excluded_by_homology: Vec::new(),
        excluded_at_size: Vec::new(),
        candidates_checked: 0,
        undecided: 0,
        found: None,
    };
    let mut vertices: Option<Vec<CVertex>> = None;
    for p in 1..=cfg.powers {
        let mp = big_pow(abel, p as u64);
        // in rank 3 every proper factor has rank or corank 1, so invariance
        // forces an eigenvalue ±1
        if n == 3 && !big_det(shifted(&mp, 1)).is_zero() && !big_det(shifted(&mp, -1)).is_zero() {
            report.excluded_by_homology.push(p);
            continue;
        }
        let (rank1, planes) = homology_candidates(&mp, cfg.factor_size);
        if n == 3 && rank1.is_empty() && planes == 0 {
            report.excluded_at_size.push(p);
            continue;
        }
        // rank-2 candidates are not enumerated at the group level
        if n != 3 || planes > 0 {
            report.undecided += 1;
        }
        if rank1.is_empty() {
            continue;
        }
        let wp = match w {
            Some(w) => w.pow(p as i64).ok().filter(|x| x.size() <= cfg.expand_limit),
            None => None,
        };
        let vs = match &mut vertices {
            Some(vs) => vs,
            None => vertices.insert(primitive_vertices(n, cfg.factor_size)?),
        };
        for v in vs.iter() {
            let x = v.word().abelianize();
            let neg: Vec<i64> = x.iter().map(|t| -t).collect();
            if !rank1.iter().any(|r| *r == x || *r == neg) {
                continue;
            }
            report.candidates_checked += 1;
            let Some(wp) = &wp else {
                report.undecided += 1;
                continue;
            };
            if v.factor().apply(wp)? == *v.factor() {
                report.found = Some(InvariantFactor {
                    factor: v.factor().into(),
                    power: p,
                });
                return Ok(report);
            }
        }
    }
    Ok(report)
}

/// Builds `w = f^{N e_1} g^{N e_2} ⋯` and collects evidence of full
/// irreducibility.
pub fn pingpong_word(spec: &PingPongSpec, syllables: &[i64], cfg: &EvidenceConfig) -> Result<PingPongReport> {
    if syllables.len() < 2 {
        return Err(Error::BadSyllables("need at least one power of each of f and g".into()));
    }
    if syllables.contains(&0) {
        return Err(Error::BadSyllables("zero exponent".into()));
    }
    let exps: Vec<i64> = syllables.iter().map(|&e| e * spec.n as i64).collect();
    let (f_a, g_b) = spec.restrictions()?;
    let fill = fill_check(&spec.a, &spec.b, cfg.bound)?;
    let abel = word_abelian(&spec.f, &spec.g, &exps)?;
    let w = expand(&spec.f, &spec.g, &exps, cfg.expand_limit)?;
    let search = invariant_search(w.as_ref(), &abel, cfg)?;
    let chain = chain_progress_verify(
        &Chain::Translated(Box::new(TranslatedChain {
            a: spec.a.clone(),
            b: spec.b.clone(),
            f_a: f_a.clone(),
            g_b: g_b.clone(),
            exponents: exps.clone(),
        })),
        cfg.bound,
        cfg.m_emp,
        &cfg.sampling,
    )?;
    let mut growth = Vec::new();
    for j in 1..=exps.len() {
        // the prefix chain has j + 1 factors and j - 1 interior indices
        let ok = chain.passed || chain.failure.as_ref().is_some_and(|(i, _)| *i >= j);
        growth.push(GrowthRow {
            syllables: j,
            chain_lower_bound: if ok { j as u64 } else { 0 },
            projection: if j >= 2 { chain.projections.get(j - 2).map(|d| d.lower) } else { None },
        });
    }
    Ok(PingPongReport {
        spec: spec.record(),
        fill,
        translation_f: translation_estimate(&f_a, 8)?.to_string(),
        translation_g: translation_estimate(&g_b, 8)?.to_string(),
        automorphism: w.map(|w| w.to_string()),
        abelian: abel.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect(),
        evidence: IrreducibilityEvidence {
            word: exps,
            invariant_search: search,
            growth_table: growth,
            chain,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fc(rank: usize, s: &str) -> FactorClass {
        FactorClass::parse(rank, s).unwrap()
    }

    #[test]
    fn fill_witness_example() {
        let r = fill_check(&fc(3, "a,b"), &fc(3, "b,c"), 3).unwrap();
        let ws: Vec<&str> = r.witnesses().iter().map(|v| v.code.as_str()).collect();
        assert!(ws.contains(&fc(3, "cA").code()), "{r:?}");
        let r = fill_check(&fc(3, "a,b"), &fc(3, "a,b"), 2).unwrap();
        assert!(r.witnesses().iter().any(|v| v.code == fc(3, "c").code()));
    }

    #[test]
    fn restriction_examples() {
        let f = Automorphism::parse("b,ab,c").unwrap();
        let r = restriction(&f, &fc(3, "a,b")).unwrap();
        assert_eq!(r, Automorphism::parse("b,ab").unwrap());
        let id = Automorphism::identity(3);
        assert!(restriction(&id, &fc(3, "a,b")).unwrap().is_identity());
        assert!(restriction(&f, &fc(3, "a,c")).is_err());
    }

    #[test]
    fn translation_examples() {
        let fib = Automorphism::parse("b,ab").unwrap();
        assert!(translation_estimate(&fib, 6).unwrap() > Ratio::from_integer(0));
        assert_eq!(translation_estimate(&Automorphism::identity(2), 6).unwrap(), Ratio::from_integer(0));
        let conj = Automorphism::parse("baB,b").unwrap();
        assert_eq!(translation_estimate(&conj, 6).unwrap(), Ratio::from_integer(0));
    }

    #[test]
    fn syllable_lengths() {
        for e in [vec![1, 1], vec![2, -1, 3, 1]] {
            for m in 1..=4 {
                let p = syllable_power(&e, m);
                assert_eq!(cyclic_syllable_length(&p), m * cyclic_syllable_length(&e));
            }
        }
    }

    #[test]
    fn shipped_pair_hypotheses() {
        let (f, g, a, b) = shipped_pair().unwrap();
        let spec = PingPongSpec::new(f, g, a, b, 1).unwrap();
        let (fa, gb) = spec.restrictions().unwrap();
        assert!(fa.is_basis() && gb.is_basis());
        let r = fill_check(&spec.a, &spec.b, 5).unwrap();
        assert!(r.found_none());
    }
}
