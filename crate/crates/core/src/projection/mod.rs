//! Subfactor projections `π_A(G)` and `π_A(B)`, distances in `F(A)`, the
//! containment/disjoint/overlap trichotomy and the Behrstock check.

mod farey;
mod omega;

use std::collections::BTreeSet;

use rand::Rng;
use serde::Serialize;

use crate::automorphism::Automorphism;
use crate::error::{Error, Result};
use crate::factor::{disjoint_reduction, minors_gcd, FactorClass, FactorRecord, Mod2Subspace, ReductionBudget};
use crate::marked::{one_edge_collapse_factors, Immersion, MarkedGraph};
use crate::sample::{random_blow_up, random_stabilizing_automorphism, rng};
use crate::word::Word;

pub use farey::{adjacent, farey_distance, farey_distance_vectors, farey_vertex, is_primitive, normalize, FareyVertex};
pub use omega::{disjointly_embedded, joint_embedding, omega_data, OmegaData, OmegaSummary};

/// `H₁(A; Z/2)` inside `H₁(F_n; Z/2)`.
pub fn mod2_color(a: &FactorClass) -> Mod2Subspace {
    a.mod2_color()
}

/// A set of factor classes of `A`, written in the basis `gens(A)`.
#[derive(Clone, Debug)]
pub struct ProjectionSet {
    pub target: FactorClass,
    pub members: BTreeSet<FactorClass>,
    /// Number of marked graphs the set was collected from.
    pub samples: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjectionRecord {
    pub target: FactorRecord,
    pub members: Vec<FactorRecord>,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub farey: Option<Vec<FareyVertex>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diameter: Option<DistanceBounds>,
}

impl ProjectionSet {
    pub fn empty(target: &FactorClass) -> Self {
        ProjectionSet {
            target: target.clone(),
            members: BTreeSet::new(),
            samples: 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn extend(&mut self, other: ProjectionSet) {
        self.members.extend(other.members);
        self.samples += other.samples;
    }

    /// Diameter in `F(A)`; exact for rank-2 targets.
    pub fn diameter(&self) -> Result<DistanceBounds> {
        factor_distance(&self.target, &self.members, &self.members)
    }

    /// Image under an automorphism of `A`'s free group.
    pub fn transport(&self, phi: &Automorphism) -> Result<BTreeSet<FactorClass>> {
        self.members.iter().map(|m| m.apply(phi)).collect()
    }

    pub fn record(&self) -> ProjectionRecord {
        let farey = (self.target.rank() == 2)
            .then(|| self.members.iter().map(farey_vertex).collect::<Result<Vec<_>>>().ok())
            .flatten();
        ProjectionRecord {
            target: (&self.target).into(),
            members: self.members.iter().map(Into::into).collect(),
            samples: self.samples,
            farey,
            diameter: if self.is_empty() { None } else { self.diameter().ok() },
        }
    }
}

/// `π_A(G)`: vertex groups of the one-edge collapses of `A|G`.
pub fn project_graph(a: &FactorClass, g: &MarkedGraph) -> Result<ProjectionSet> {
    if a.rank() < 2 {
        return Err(Error::ProjectionUndefined("the target factor has rank < 2".into()));
    }
    let h = Immersion::cover_core(a, g)?;
    Ok(ProjectionSet {
        target: a.clone(),
        members: one_edge_collapse_factors(&h)?,
        samples: 1,
    })
}

/// Union of `π_A(G)` over the given graphs.
pub fn project_on_samples(a: &FactorClass, samples: &[MarkedGraph]) -> Result<ProjectionSet> {
    let mut out = ProjectionSet::empty(a);
    for g in samples {
        out.extend(project_graph(a, g)?);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SamplingConfig {
    /// Number of marked graphs `k`.
    pub samples: usize,
    pub seed: u64,
    /// Maximal Whitehead length of the automorphisms fixing `B`'s sub-rose.
    pub max_whitehead: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            samples: 8,
            seed: 0,
            max_whitehead: 3,
        }
    }
}

/// Marked graphs in which `B` is embedded: the adapted rose of `B`, then
/// roses re-marked by random automorphisms preserving `B`'s sub-rose, some
/// of them blown up. A prefix of a longer sample is the shorter sample.
pub fn splitting_samples(b: &FactorClass, cfg: &SamplingConfig) -> Result<Vec<MarkedGraph>> {
    let base = MarkedGraph::adapted_rose(b)?;
    let n = b.ambient_rank();
    let psi = Automorphism::from_images_unchecked(base.marking().to_vec());
    let mut r = rng(cfg.seed);
    let mut out = vec![base];
    while out.len() < cfg.samples {
        let len = r.gen_range(1..=cfg.max_whitehead.max(1));
        let theta = random_stabilizing_automorphism(n, b.rank(), len, &mut r);
        let mut g = MarkedGraph::rose_with_marking(psi.compose(&theta).images().to_vec())?;
        if r.gen_bool(0.5) {
            if let Some(h) = random_blow_up(&g, &mut r) {
                if Immersion::cover_core(b, &h)?.is_embedding() {
                    g = h;
                }
            }
        }
        out.push(g);
    }
    out.truncate(cfg.samples.max(1));
    Ok(out)
}

/// `π_A(B)` sampled over `cfg.samples` splittings with `B` embedded. Empty
/// when one factor contains the other or a disjointness certificate is
/// found.
pub fn project_factor(a: &FactorClass, b: &FactorClass, cfg: &SamplingConfig) -> Result<ProjectionSet> {
    if a.is_contained_in(b) || b.is_contained_in(a) {
        return Ok(ProjectionSet::empty(a));
    }
    if overlap_obstruction(a, b).is_none() {
        let budget = ClassifyBudget {
            sampling: *cfg,
            ..Default::default()
        };
        if find_disjoint_certificate(a, b, &budget)?.is_some() {
            return Ok(ProjectionSet::empty(a));
        }
    }
    project_on_samples(a, &splitting_samples(b, cfg)?)
}

/// A rank-1 class `⟨u⟩` contained in `A`, rewritten in the basis `gens(A)`.
pub fn rank_one_in(a: &FactorClass, c: &FactorClass) -> Result<Option<FactorClass>> {
    let Some(u) = c.cyclic_generator() else {
        return Err(Error::NotARankOneFactor(c.to_string()));
    };
    let g = a.based();
    let Some(base) = g.basepoint() else { return Ok(None) };
    for v in 0..g.num_vertices() {
        if g.trace_from(v, u.letters()) != Some(v) {
            continue;
        }
        let Some(p) = g.path_word(base, v) else { continue };
        let p = Word::reduce(u.rank(), &p)?;
        let x = a.coordinates(&u.conjugate_by(&p))?;
        return Ok(Some(FactorClass::new(vec![x])?));
    }
    Ok(None)
}

/// Distance bounds in `F(A)`; `upper` is `None` when no path was certified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DistanceBounds {
    pub lower: u64,
    pub upper: Option<u64>,
}

impl DistanceBounds {
    pub fn exact(d: u64) -> Self {
        DistanceBounds {
            lower: d,
            upper: Some(d),
        }
    }
    pub fn is_exact(&self) -> bool {
        self.upper == Some(self.lower)
    }
}

/// `d_A(X, Y) = diam(X ∪ Y)` in `F(A)`. Exact (Farey graph) for rank-2
/// `A`; for higher rank, an upper bound from containments (distance 1) and
/// rank-1 pairs spanning a rank-2 free factor (distance ≤ 2).
pub fn factor_distance(a: &FactorClass, x: &BTreeSet<FactorClass>, y: &BTreeSet<FactorClass>) -> Result<DistanceBounds> {
    let all: Vec<&FactorClass> = x.union(y).collect();
    if all.is_empty() {
        return Err(Error::Empty("projection sets".into()));
    }
    if a.rank() == 2 {
        let vs = all.iter().map(|f| farey_vertex(f)).collect::<Result<Vec<_>>>()?;
        let mut d = 0;
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                d = d.max(farey_distance_vectors(vs[i], vs[j])?);
            }
        }
        return Ok(DistanceBounds::exact(d));
    }
    let m = all.len();
    const INF: u64 = u64::MAX / 4;
    let mut dist = vec![vec![INF; m]; m];
    for i in 0..m {
        dist[i][i] = 0;
        for j in i + 1..m {
            let w = if all[i].is_contained_in(all[j]) || all[j].is_contained_in(all[i]) {
                1
            } else if all[i].rank() == 1
                && all[j].rank() == 1
                && a.rank() > 2
                && disjoint_reduction(all[i], all[j], ReductionBudget::default())?.is_some()
            {
                2
            } else {
                INF
            };
            dist[i][j] = w;
            dist[j][i] = w;
        }
    }
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                let via = dist[i][k] + dist[k][j];
                if via < dist[i][j] {
                    dist[i][j] = via;
                }
            }
        }
    }
    let diam = dist.iter().flatten().copied().max().unwrap();
    Ok(DistanceBounds {
        lower: (m > 1) as u64,
        upper: (diam < INF).then_some(diam),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OverlapReason {
    /// `rank(A) + rank(B) > n`.
    RankSum,
    /// `dim(c(A) + c(B)) < rank(A) + rank(B)`.
    Mod2Color,
    /// The joint abelianization is not a direct summand of `Z^n`.
    Abelianization,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DisjointMethod {
    /// Joint embedding built from a splitting with `B` embedded.
    JointEmbedding,
    /// Joint embedding built from a splitting with `A` embedded.
    JointEmbeddingSwapped,
    /// Simultaneous Whitehead reduction to disjoint sub-roses.
    WhiteheadPair,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict")]
pub enum Classification {
    ContainedIn,
    Contains,
    Disjoint {
        method: DisjointMethod,
        certificate: MarkedGraph,
    },
    Overlap {
        reason: OverlapReason,
    },
    Unknown {
        samples: usize,
        plateau_depth: usize,
    },
}

impl Classification {
    pub fn name(&self) -> &'static str {
        match self {
            Classification::ContainedIn => "ContainedIn",
            Classification::Contains => "Contains",
            Classification::Disjoint { .. } => "Disjoint",
            Classification::Overlap { .. } => "Overlap",
            Classification::Unknown { .. } => "Unknown",
        }
    }
    pub fn is_decided(&self) -> bool {
        !matches!(self, Classification::Unknown { .. })
    }
    pub fn is_overlap(&self) -> bool {
        matches!(self, Classification::Overlap { .. })
    }
    pub fn is_disjoint(&self) -> bool {
        matches!(self, Classification::Disjoint { .. })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClassifyBudget {
    pub sampling: SamplingConfig,
    pub reduction: ReductionBudget,
}

/// Certified reasons `A` and `B` cannot be disjoint.
pub fn overlap_obstruction(a: &FactorClass, b: &FactorClass) -> Option<OverlapReason> {
    let n = a.ambient_rank();
    let k = a.rank() + b.rank();
    if k > n {
        return Some(OverlapReason::RankSum);
    }
    if a.mod2_color().sum(&b.mod2_color()).dim() < k {
        return Some(OverlapReason::Mod2Color);
    }
    let mut rows = a.abelian_vectors();
    rows.extend(b.abelian_vectors());
    if minors_gcd(&rows) != 1 {
        return Some(OverlapReason::Abelianization);
    }
    None
}

/// Rose marked by `φ⁻¹` with the first `rank(A)` petals split off to a new
/// vertex: `A` and `B` then sit on disjoint sub-roses.
fn pair_certificate(phi: &Automorphism, ka: usize) -> Result<MarkedGraph> {
    let g = MarkedGraph::rose_with_marking(phi.inverse()?.images().to_vec())?;
    let moved: Vec<(usize, bool)> = (0..ka).flat_map(|e| [(e, true), (e, false)]).collect();
    g.blow_up(0, &moved)
}

/// Searches for a disjointness certificate.
pub fn find_disjoint_certificate(a: &FactorClass, b: &FactorClass, budget: &ClassifyBudget) -> Result<Option<(DisjointMethod, MarkedGraph)>> {
    if a.rank() + b.rank() > a.ambient_rank() {
        return Ok(None);
    }
    for (x, y, method) in [
        (a, b, DisjointMethod::JointEmbedding),
        (b, a, DisjointMethod::JointEmbeddingSwapped),
    ] {
        let Ok(samples) = splitting_samples(y, &budget.sampling) else {
            continue;
        };
        for g in &samples {
            if let Some(cert) = joint_embedding(x, y, g)? {
                return Ok(Some((method, cert)));
            }
        }
    }
    if let Some(phi) = disjoint_reduction(a, b, budget.reduction)? {
        let cert = pair_certificate(&phi, a.rank())?;
        if disjointly_embedded(a, b, &cert)? {
            return Ok(Some((DisjointMethod::WhiteheadPair, cert)));
        }
    }
    Ok(None)
}

/// Classifies a pair of factors as nested, disjoint or overlapping.
pub fn classify_pair(a: &FactorClass, b: &FactorClass, budget: &ClassifyBudget) -> Result<Classification> {
    if a.ambient_rank() != b.ambient_rank() {
        return Err(Error::RankMismatch {
            expected: a.ambient_rank(),
            found: b.ambient_rank(),
        });
    }
    if a.is_contained_in(b) {
        return Ok(Classification::ContainedIn);
    }
    if b.is_contained_in(a) {
        return Ok(Classification::Contains);
    }
    if let Some(reason) = overlap_obstruction(a, b) {
        return Ok(Classification::Overlap { reason });
    }
    if let Some((method, certificate)) = find_disjoint_certificate(a, b, budget)? {
        return Ok(Classification::Disjoint { method, certificate });
    }
    Ok(Classification::Unknown {
        samples: budget.sampling.samples,
        plateau_depth: budget.reduction.plateau_depth,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BehrstockReport {
    /// `d_A(B, G)`.
    pub d_a: DistanceBounds,
    /// `d_B(A, G)`.
    pub d_b: DistanceBounds,
    pub min_upper: Option<u64>,
}

/// Both projection distances `d_A(B, G)` and `d_B(A, G)` for overlapping
/// `A`, `B` and the smaller upper bound.
pub fn behrstock_check(a: &FactorClass, b: &FactorClass, g: &MarkedGraph, cfg: &SamplingConfig) -> Result<BehrstockReport> {
    let side = |x: &FactorClass, y: &FactorClass| -> Result<DistanceBounds> {
        let py = project_factor(x, y, cfg)?;
        if py.is_empty() {
            return Err(Error::ProjectionUndefined(format!("π_{x}({y}) is empty")));
        }
        let pg = project_graph(x, g)?;
        factor_distance(x, &py.members, &pg.members)
    };
    let d_a = side(a, b)?;
    let d_b = side(b, a)?;
    let min_upper = match (d_a.upper, d_b.upper) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    };
    Ok(BehrstockReport { d_a, d_b, min_upper })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fc(rank: usize, s: &str) -> FactorClass {
        FactorClass::parse(rank, s).unwrap()
    }

    #[test]
    fn project_graph_examples() {
        let w = |s| crate::word::Word::parse(3, s).unwrap();
        let g = MarkedGraph::rose_with_marking(vec![w("ab"), w("c"), w("b")]).unwrap();
        let p = project_graph(&fc(3, "a,b"), &g).unwrap();
        assert_eq!(p.members, BTreeSet::from([fc(2, "ab"), fc(2, "b")]));
        let p = project_graph(&fc(3, "a,b"), &MarkedGraph::rose(3)).unwrap();
        assert_eq!(p.members, BTreeSet::from([fc(2, "a"), fc(2, "b")]));
        assert!(project_graph(&fc(3, "a"), &MarkedGraph::rose(3)).is_err());
    }

    #[test]
    fn project_factor_example() {
        let cfg = SamplingConfig {
            samples: 1,
            ..Default::default()
        };
        let p = project_factor(&fc(3, "a,b"), &fc(3, "ab,c"), &cfg).unwrap();
        assert!(p.members.contains(&fc(2, "ab")) && p.members.contains(&fc(2, "b")));
        assert_eq!(p.diameter().unwrap(), DistanceBounds::exact(1));
        assert!(project_factor(&fc(3, "a"), &fc(3, "a,b"), &cfg).unwrap().is_empty());
        assert!(project_factor(&fc(3, "a,b"), &fc(3, "c"), &cfg).unwrap().is_empty());
        let inner = rank_one_in(&fc(3, "a,bc"), &fc(3, "cb")).unwrap().unwrap();
        assert_eq!(inner, fc(2, "b"));
        assert!(rank_one_in(&fc(3, "a,b"), &fc(3, "c")).unwrap().is_none());
    }

    #[test]
    fn factor_distance_examples() {
        let a = fc(3, "a,b");
        let x = BTreeSet::from([fc(2, "a")]);
        assert_eq!(factor_distance(&a, &x, &x).unwrap(), DistanceBounds::exact(0));
        let y = BTreeSet::from([fc(2, "ab")]);
        assert_eq!(factor_distance(&a, &x, &y).unwrap(), DistanceBounds::exact(1));
        let f3 = fc(3, "a,b,c");
        let u = BTreeSet::from([fc(3, "a")]);
        let v = BTreeSet::from([fc(3, "bc")]);
        assert_eq!(factor_distance(&f3, &u, &v).unwrap().upper, Some(2));
    }

    #[test]
    fn classify_examples() {
        let b = ClassifyBudget::default();
        assert!(classify_pair(&fc(3, "a,b"), &fc(3, "b,c"), &b).unwrap().is_overlap());
        assert!(classify_pair(&fc(3, "a,b"), &fc(3, "ab,c"), &b).unwrap().is_overlap());
        assert!(matches!(classify_pair(&fc(2, "a"), &fc(2, "a,b"), &b).unwrap(), Classification::ContainedIn));
        assert!(matches!(classify_pair(&fc(2, "a,b"), &fc(2, "a"), &b).unwrap(), Classification::Contains));
        match classify_pair(&fc(3, "a,b"), &fc(3, "c"), &b).unwrap() {
            Classification::Disjoint { certificate, .. } => {
                assert!(disjointly_embedded(&fc(3, "a,b"), &fc(3, "c"), &certificate).unwrap())
            }
            other => panic!("{other:?}"),
        }
        assert!(classify_pair(&fc(3, "a,b"), &fc(2, "a"), &b).is_err());
    }

    #[test]
    fn disjoint_by_reduction() {
        let b = ClassifyBudget::default();
        let (x, y) = (fc(3, "ab"), fc(3, "cA"));
        let c = classify_pair(&x, &y, &b).unwrap();
        assert!(c.is_disjoint(), "{c:?}");
    }

    #[test]
    fn behrstock_worked_example() {
        let cfg = SamplingConfig::default();
        let r = behrstock_check(&fc(3, "a,b"), &fc(3, "b,c"), &MarkedGraph::rose(3), &cfg).unwrap();
        let diam = project_factor(&fc(3, "a,b"), &fc(3, "b,c"), &cfg).unwrap().diameter().unwrap();
        assert!(r.min_upper.unwrap() <= diam.upper.unwrap());
    }
}
