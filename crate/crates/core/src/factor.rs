//! Conjugacy classes of subgroups (free factors) and the Whitehead–Gersten
//! reduction used to recognise free factors and disjoint pairs.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::automorphism::{whitehead_cached, Automorphism};
use crate::error::{Error, Result};
use crate::stallings::{contained_up_to_conjugacy, subgroup_graph, StallingsGraph};
use crate::word::{gen_index, Word};

/// Conjugacy class of a finitely generated subgroup, with a fixed free basis
/// used as coordinates on the subgroup.
#[derive(Clone, Debug)]
pub struct FactorClass {
    gens: Vec<Word>,
    based: StallingsGraph,
    core: StallingsGraph,
    code: String,
}

impl FactorClass {
    /// Builds the class of `⟨gens⟩`. If `gens` is not a free basis, the
    /// spanning-tree basis of its Stallings graph is used instead.
    pub fn new(gens: Vec<Word>) -> Result<Self> {
        let mut based = subgroup_graph(&gens)?;
        let mut gens: Vec<Word> = gens.into_iter().filter(|w| !w.is_identity()).collect();
        if based.rank() != gens.len() {
            gens = based.basis();
            based = subgroup_graph(&gens)?;
        }
        let core = based.core();
        let code = core.canonical_code();
        Ok(FactorClass {
            gens,
            based,
            core,
            code,
        })
    }

    pub fn parse(rank: usize, text: &str) -> Result<Self> {
        FactorClass::new(Word::parse_list(rank, text)?)
    }

    pub fn ambient_rank(&self) -> usize {
        self.based.rank_ambient()
    }
    pub fn rank(&self) -> usize {
        self.gens.len()
    }
    pub fn gens(&self) -> &[Word] {
        &self.gens
    }
    pub fn code(&self) -> &str {
        &self.code
    }
    pub fn core(&self) -> &StallingsGraph {
        &self.core
    }
    /// Based Stallings graph of `⟨gens⟩` with transcripts in `gens`.
    pub fn based(&self) -> &StallingsGraph {
        &self.based
    }

    /// `self ⊂ other` up to conjugacy.
    pub fn is_contained_in(&self, other: &FactorClass) -> bool {
        contained_up_to_conjugacy(&self.core, &other.core)
    }

    /// Image class `φ(self)`, with basis `φ(gens)`.
    pub fn apply(&self, phi: &Automorphism) -> Result<FactorClass> {
        let gens = self
            .gens
            .iter()
            .map(|w| phi.apply(w))
            .collect::<Result<Vec<_>>>()?;
        FactorClass::new(gens)
    }

    /// Generator of a rank-1 class.
    pub fn generator(&self) -> Option<&Word> {
        (self.gens.len() == 1).then(|| &self.gens[0])
    }

    /// Rewrites an element of the subgroup in the basis `gens`.
    pub fn coordinates(&self, w: &Word) -> Result<Word> {
        self.based.express(w.letters())
    }

    /// Cyclically reduced generator of a rank-1 class.
    pub fn cyclic_generator(&self) -> Option<Word> {
        self.generator().map(|w| w.cyclic_reduce().0)
    }

    pub fn abelian_vectors(&self) -> Vec<Vec<i64>> {
        self.gens.iter().map(Word::abelianize).collect()
    }

    /// `H₁(A; Z/2)` as a reduced row-echelon basis of bit masks.
    pub fn mod2_color(&self) -> Mod2Subspace {
        Mod2Subspace::span(self.ambient_rank(), self.abelian_vectors().iter().map(|v| mod2_mask(v)))
    }

    /// Core graph size (edges), the complexity bound used for enumeration.
    pub fn size(&self) -> usize {
        self.core.num_edges()
    }
}

impl PartialEq for FactorClass {
    fn eq(&self, other: &Self) -> bool {
        self.code == other.code
    }
}
impl Eq for FactorClass {}
impl Hash for FactorClass {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.code.hash(state);
    }
}
impl PartialOrd for FactorClass {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for FactorClass {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.size(), &self.code).cmp(&(other.size(), &other.code))
    }
}

impl fmt::Display for FactorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.gens.iter().map(|w| w.to_string()).collect();
        write!(f, "⟨{}⟩", parts.join(","))
    }
}

/// Serialized form of a class: its basis on input, plus the canonical code
/// on output.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FactorRecord {
    pub gens: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code: Option<String>,
}

impl From<&FactorClass> for FactorRecord {
    fn from(a: &FactorClass) -> Self {
        FactorRecord {
            gens: a.gens.iter().map(|w| w.to_string()).collect(),
            code: Some(a.code.clone()),
        }
    }
}

impl FactorRecord {
    pub fn to_class(&self, rank: usize) -> Result<FactorClass> {
        FactorClass::new(
            self.gens
                .iter()
                .map(|s| Word::parse(rank, s))
                .collect::<Result<Vec<_>>>()?,
        )
    }
}

pub(crate) fn mod2_mask(v: &[i64]) -> u64 {
    v.iter()
        .enumerate()
        .fold(0u64, |m, (i, &x)| if x.rem_euclid(2) == 1 { m | 1 << i } else { m })
}

/// Subspace of `(Z/2)^n` in reduced row-echelon form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mod2Subspace {
    pub dim_ambient: usize,
    pub basis: Vec<u64>,
}

impl Mod2Subspace {
    pub fn span(n: usize, vectors: impl IntoIterator<Item = u64>) -> Self {
        let mut rows: Vec<u64> = Vec::new();
        for mut v in vectors {
            for &r in &rows {
                let pivot = 63 - r.leading_zeros();
                if v >> pivot & 1 == 1 {
                    v ^= r;
                }
            }
            if v != 0 {
                let pivot = 63 - v.leading_zeros();
                for r in rows.iter_mut() {
                    if *r >> pivot & 1 == 1 {
                        *r ^= v;
                    }
                }
                rows.push(v);
            }
        }
        rows.sort_unstable_by(|a, b| b.cmp(a));
        Mod2Subspace {
            dim_ambient: n,
            basis: rows,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, v: u64) -> bool {
        Mod2Subspace::span(self.dim_ambient, self.basis.iter().copied().chain([v])).dim() == self.dim()
    }

    pub fn sum(&self, other: &Mod2Subspace) -> Mod2Subspace {
        Mod2Subspace::span(
            self.dim_ambient,
            self.basis.iter().chain(&other.basis).copied(),
        )
    }

    /// Basis vectors as 0/1 coordinate lists.
    pub fn vectors(&self) -> Vec<Vec<u8>> {
        self.basis
            .iter()
            .map(|&m| (0..self.dim_ambient).map(|i| (m >> i & 1) as u8).collect())
            .collect()
    }
}

/// Certified reasons a subgroup is not a free factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Obstruction {
    /// `dim H₁(A; Z/2) < rank(A)`.
    Mod2Rank,
    /// The abelianization of `A` is not a direct summand of `Z^n`.
    NotDirectSummand,
    /// `rank(A) > n`, or `rank(A) = n` with `A ≠ F_n`.
    Rank,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FreeFactorVerdict {
    /// `witness` maps `A` onto `⟨x_1, …, x_k⟩` up to conjugacy.
    FreeFactor { witness: Automorphism },
    NotFreeFactor { obstruction: Obstruction },
    /// Reduction stopped at a local minimum that is not a sub-rose.
    NotReduced { complexity: usize },
}

impl FreeFactorVerdict {
    pub fn is_free_factor(&self) -> bool {
        matches!(self, FreeFactorVerdict::FreeFactor { .. })
    }
    pub fn witness(&self) -> Option<&Automorphism> {
        match self {
            FreeFactorVerdict::FreeFactor { witness } => Some(witness),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionBudget {
    /// Depth of the sideways search at a local minimum.
    pub plateau_depth: usize,
    /// Cap on the number of states visited by one sideways search.
    pub plateau_states: usize,
}

impl Default for ReductionBudget {
    fn default() -> Self {
        ReductionBudget {
            plateau_depth: 2,
            plateau_states: 4000,
        }
    }
}

/// One entry of a tuple being reduced: a subgroup given by generators.
#[derive(Clone, Debug)]
struct Member {
    gens: Vec<Word>,
    complexity: usize,
    core: Option<StallingsGraph>,
}

impl Member {
    fn new(gens: Vec<Word>) -> Result<Self> {
        if gens.len() == 1 {
            let (c, _) = gens[0].cyclic_reduce();
            if c.is_identity() {
                return Err(Error::TrivialSubgroup);
            }
            return Ok(Member {
                complexity: c.len(),
                gens: vec![c],
                core: None,
            });
        }
        let g = subgroup_graph(&gens)?;
        let core = g.core();
        let mut rooted = core.clone();
        rooted = with_basepoint(rooted, 0);
        let gens = rooted.basis();
        Ok(Member {
            complexity: core.num_edges(),
            gens,
            core: Some(core),
        })
    }

    fn apply(&self, phi: &Automorphism) -> Result<Self> {
        Member::new(self.gens.iter().map(|w| phi.apply_letters(w.letters())).collect())
    }

    /// Labels of a one-vertex core, if it is one.
    fn rose_labels(&self) -> Option<BTreeSet<usize>> {
        let rank = self.gens.len();
        if self.complexity != rank {
            return None;
        }
        let labels: BTreeSet<usize> = self
            .gens
            .iter()
            .flat_map(|w| w.letters().iter().map(|&l| gen_index(l)))
            .collect();
        (labels.len() == rank).then_some(labels)
    }
}

fn with_basepoint(g: StallingsGraph, v: usize) -> StallingsGraph {
    let edges = g.edges().to_vec();
    StallingsGraph::from_edges(g.rank_ambient(), g.num_vertices(), edges, Some(v))
        .expect("valid graph")
}

/// Outcome of reducing a tuple of subgroup classes.
#[derive(Clone, Debug)]
pub struct Reduction {
    /// Composite of the applied Whitehead automorphisms.
    pub automorphism: Automorphism,
    /// Generators of the reduced classes.
    pub classes: Vec<Vec<Word>>,
    pub complexity: usize,
    pub steps: usize,
}

impl Member {
    fn key(&self) -> String {
        match &self.core {
            Some(core) => core.canonical_code(),
            None => format!("{:?}", self.gens[0].cyclic_class_key()),
        }
    }
}

fn tuple_key(ms: &[Member]) -> String {
    ms.iter().map(Member::key).collect::<Vec<_>>().join("|")
}

fn total(ms: &[Member]) -> usize {
    ms.iter().map(|m| m.complexity).sum()
}

fn apply_all(ms: &[Member], phi: &Automorphism) -> Result<Vec<Member>> {
    ms.iter().map(|m| m.apply(phi)).collect()
}

/// Greedy Whitehead reduction of a tuple of subgroup classes (total core
/// size), with a bounded sideways search at local minima that do not satisfy
/// `done`.
pub fn whitehead_reduce(
    rank: usize,
    tuple: &[Vec<Word>],
    budget: ReductionBudget,
    done: &dyn Fn(&[Vec<Word>]) -> bool,
) -> Result<Reduction> {
    let whitehead = whitehead_cached(rank);
    let mut cur: Vec<Member> = tuple
        .iter()
        .map(|g| Member::new(g.clone()))
        .collect::<Result<_>>()?;
    let mut phi = Automorphism::identity(rank);
    let mut steps = 0;
    let gens_of = |ms: &[Member]| ms.iter().map(|m| m.gens.clone()).collect::<Vec<_>>();
    loop {
        let c = total(&cur);
        let mut best: Option<(usize, Vec<Member>, &Automorphism)> = None;
        for w in whitehead {
            let next = apply_all(&cur, w)?;
            let t = total(&next);
            if t < c && best.as_ref().is_none_or(|(bt, _, _)| t < *bt) {
                best = Some((t, next, w));
            }
        }
        if let Some((_, next, w)) = best {
            cur = next;
            phi = w.compose(&phi);
            steps += 1;
            continue;
        }
        if done(&gens_of(&cur)) || budget.plateau_depth == 0 {
            break;
        }
        // sideways search at constant complexity
        match plateau_escape(&cur, whitehead, budget) {
            Some((next, path)) => {
                for w in path {
                    phi = w.compose(&phi);
                    steps += 1;
                }
                cur = next;
            }
            None => break,
        }
    }
    Ok(Reduction {
        automorphism: phi,
        complexity: total(&cur),
        classes: gens_of(&cur),
        steps,
    })
}

fn plateau_escape(
    start: &[Member],
    whitehead: &[Automorphism],
    budget: ReductionBudget,
) -> Option<(Vec<Member>, Vec<Automorphism>)> {
    let c = total(start);
    let mut seen: HashSet<String> = HashSet::from([tuple_key(start)]);
    let mut q: VecDeque<(Vec<Member>, Vec<Automorphism>)> = VecDeque::from([(start.to_vec(), Vec::new())]);
    while let Some((ms, path)) = q.pop_front() {
        if path.len() >= budget.plateau_depth {
            continue;
        }
        for w in whitehead {
            let Ok(next) = apply_all(&ms, w) else { continue };
            let t = total(&next);
            if t > c {
                continue;
            }
            let mut p = path.clone();
            p.push(w.clone());
            if t < c {
                return Some((next, p));
            }
            if seen.len() < budget.plateau_states && seen.insert(tuple_key(&next)) {
                q.push_back((next, p));
            }
        }
    }
    None
}

/// Permutation sending the generators in `labels` (in order) to the first
/// `labels.len()` generators.
pub(crate) fn front_permutation(rank: usize, labels: &[usize]) -> Automorphism {
    let mut perm = vec![usize::MAX; rank];
    for (j, &l) in labels.iter().enumerate() {
        perm[l] = j;
    }
    let mut next = labels.len();
    for p in perm.iter_mut() {
        if *p == usize::MAX {
            *p = next;
            next += 1;
        }
    }
    Automorphism::permutation(&perm, &vec![false; rank])
}

/// True when the tuple sits above the least possible complexity. Peak
/// reduction then forbids reaching sub-roses without a strict decrease, so a
/// sideways search is pointless.
fn above_floor(gens: &[Vec<Word>]) -> bool {
    let floor: usize = gens.iter().map(|g| g.len()).sum();
    let c: usize = gens.iter().filter_map(|g| Member::new(g.clone()).ok()).map(|m| m.complexity).sum();
    c > floor
}

fn all_roses(gens: &[Vec<Word>]) -> bool {
    gens.iter().all(|g| {
        Member::new(g.clone())
            .ok()
            .and_then(|m| m.rose_labels())
            .is_some()
    })
}

/// Homology obstructions to being a free factor.
pub fn free_factor_obstruction(a: &FactorClass) -> Option<Obstruction> {
    let n = a.ambient_rank();
    let k = a.rank();
    if k > n {
        return Some(Obstruction::Rank);
    }
    if a.mod2_color().dim() < k {
        return Some(Obstruction::Mod2Rank);
    }
    if minors_gcd(&a.abelian_vectors()) != 1 {
        return Some(Obstruction::NotDirectSummand);
    }
    None
}

/// gcd of the maximal minors of the matrix with the given rows.
pub(crate) fn minors_gcd(rows: &[Vec<i64>]) -> i128 {
    let k = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    if k == 0 || k > n {
        return 0;
    }
    let mut g: i128 = 0;
    let mut cols: Vec<usize> = (0..k).collect();
    loop {
        let m: Vec<Vec<i128>> = rows
            .iter()
            .map(|r| cols.iter().map(|&c| r[c] as i128).collect())
            .collect();
        g = num_integer::Integer::gcd(&g, &det(m));
        if g == 1 {
            return 1;
        }
        // next combination
        let mut i = k;
        loop {
            if i == 0 {
                return g;
            }
            i -= 1;
            if cols[i] < n - k + i {
                cols[i] += 1;
                for j in i + 1..k {
                    cols[j] = cols[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Fraction-free (Bareiss) determinant.
pub(crate) fn det(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&r| m[r][k] != 0) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Decides whether `A` is a free factor of `F_n`: certified obstructions
/// first, then Whitehead reduction toward a sub-rose.
pub fn is_free_factor(a: &FactorClass, budget: ReductionBudget) -> Result<FreeFactorVerdict> {
    if let Some(obstruction) = free_factor_obstruction(a) {
        return Ok(FreeFactorVerdict::NotFreeFactor { obstruction });
    }
    let n = a.ambient_rank();
    let red = whitehead_reduce(n, &[a.gens().to_vec()], budget, &|g| all_roses(g) || above_floor(g))?;
    let m = Member::new(red.classes[0].clone())?;
    match m.rose_labels() {
        Some(labels) => {
            let labels: Vec<usize> = labels.into_iter().collect();
            let witness = front_permutation(n, &labels).compose(&red.automorphism);
            Ok(FreeFactorVerdict::FreeFactor { witness })
        }
        None => Ok(FreeFactorVerdict::NotReduced {
            complexity: red.complexity,
        }),
    }
}

/// Whitehead reduction of the pair `(A, B)` toward sub-roses on disjoint
/// generator sets. On success returns `φ` with `φ(A) ~ ⟨x_1..x_k⟩` and
/// `φ(B) ~ ⟨x_{k+1}..x_{k+l}⟩`.
pub fn disjoint_reduction(a: &FactorClass, b: &FactorClass, budget: ReductionBudget) -> Result<Option<Automorphism>> {
    let n = a.ambient_rank();
    if a.rank() + b.rank() > n {
        return Ok(None);
    }
    let target = |gens: &[Vec<Word>]| -> bool {
        let labels: Vec<Option<BTreeSet<usize>>> = gens
            .iter()
            .map(|g| Member::new(g.clone()).ok().and_then(|m| m.rose_labels()))
            .collect();
        match (&labels[0], &labels[1]) {
            (Some(x), Some(y)) => x.is_disjoint(y),
            _ => false,
        }
    };
    let red = whitehead_reduce(n, &[a.gens().to_vec(), b.gens().to_vec()], budget, &|g| target(g) || above_floor(g))?;
    if !target(&red.classes) {
        return Ok(None);
    }
    let la: Vec<usize> = Member::new(red.classes[0].clone())?.rose_labels().unwrap().into_iter().collect();
    let lb: Vec<usize> = Member::new(red.classes[1].clone())?.rose_labels().unwrap().into_iter().collect();
    let order: Vec<usize> = la.iter().chain(&lb).copied().collect();
    Ok(Some(front_permutation(n, &order).compose(&red.automorphism)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fc(rank: usize, s: &str) -> FactorClass {
        FactorClass::parse(rank, s).unwrap()
    }

    fn ff(rank: usize, s: &str) -> FreeFactorVerdict {
        is_free_factor(&fc(rank, s), ReductionBudget::default()).unwrap()
    }

    #[test]
    fn free_factor_examples() {
        let v = ff(2, "ab");
        let w = v.witness().expect("⟨ab⟩ is a free factor");
        let img = fc(2, "ab").apply(w).unwrap();
        assert_eq!(img, fc(2, "a"));
        assert!(!ff(2, "a,baB").is_free_factor());
        assert_eq!(
            ff(2, "aa"),
            FreeFactorVerdict::NotFreeFactor {
                obstruction: Obstruction::Mod2Rank
            }
        );
        assert!(ff(3, "ab,c").is_free_factor());
        assert!(ff(3, "bac,Cb").is_free_factor());
    }

    #[test]
    fn witness_maps_to_standard_subrose() {
        for s in ["abAc", "ab,bc", "baB,cac"] {
            let a = fc(3, s);
            if let FreeFactorVerdict::FreeFactor { witness } = is_free_factor(&a, ReductionBudget::default()).unwrap() {
                let std: Vec<Word> = (0..a.rank()).map(|i| Word::generator(3, i)).collect();
                assert_eq!(a.apply(&witness).unwrap(), FactorClass::new(std).unwrap(), "{s}");
            }
        }
    }

    #[test]
    fn class_equality_is_conjugacy() {
        assert_eq!(fc(2, "ab"), fc(2, "ba"));
        assert_ne!(fc(2, "a"), fc(2, "b"));
        assert_eq!(fc(3, "a,b"), fc(3, "ab,b"));
    }

    #[test]
    fn non_basis_gens_are_replaced() {
        let a = fc(2, "a,b,ab");
        assert_eq!(a.rank(), 2);
    }

    #[test]
    fn mod2_colors() {
        assert_eq!(fc(3, "a,b").mod2_color().vectors(), vec![vec![0, 1, 0], vec![1, 0, 0]]);
        let c = fc(3, "ab,c").mod2_color();
        assert_eq!(c.dim(), 2);
        assert!(c.contains(0b011) && c.contains(0b100) && !c.contains(0b001));
    }

    #[test]
    fn minors_gcd_examples() {
        assert_eq!(minors_gcd(&[vec![2, 0]]), 2);
        assert_eq!(minors_gcd(&[vec![1, 1, 0], vec![0, 0, 1]]), 1);
        assert_eq!(minors_gcd(&[vec![1, 1, 0], vec![1, -1, 0]]), 2);
    }

    #[test]
    fn disjoint_pairs() {
        let b = ReductionBudget::default();
        assert!(disjoint_reduction(&fc(3, "a,b"), &fc(3, "c"), b).unwrap().is_some());
        assert!(disjoint_reduction(&fc(3, "a,b"), &fc(3, "cA"), b).unwrap().is_some());
        assert!(disjoint_reduction(&fc(3, "b,c"), &fc(3, "cbC"), b).unwrap().is_none());
    }
}
