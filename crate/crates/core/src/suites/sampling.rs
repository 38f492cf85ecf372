//! Seeded sampling suites for the projection machinery in `F_3`.

use std::collections::{BTreeSet, HashMap, VecDeque};

use rand::Rng;

use super::SuiteReport;
use crate::complex::{primitive_vertices, BoundedCn, CVertex};
use crate::error::Result;
use crate::factor::{is_free_factor, FactorClass, ReductionBudget};
use crate::marked::MarkedGraph;
use crate::projection::{
    behrstock_check, classify_pair, disjointly_embedded, factor_distance, joint_embedding, omega_data,
    overlap_obstruction, project_factor, project_graph, rank_one_in, splitting_samples, Classification,
    ClassifyBudget, SamplingConfig,
};
use crate::sample::{random_automorphism, random_free_factor, random_marked_graph, random_word, rng, SampleRng};

const RANK: usize = 3;

fn sub_factor(phi_images: &[crate::word::Word], idx: &[usize]) -> FactorClass {
    FactorClass::new(idx.iter().map(|&i| phi_images[i].clone()).collect()).expect("basis elements")
}

/// Pair kinds used by the classification suites.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PairKind {
    Disjoint,
    Nested,
    Random,
}

fn random_pair(r: &mut SampleRng) -> (PairKind, FactorClass, FactorClass) {
    let phi = random_automorphism(RANK, r.gen_range(0..=4), r);
    let im = phi.images();
    let (kind, a, b) = match r.gen_range(0..4) {
        0 => (PairKind::Disjoint, sub_factor(im, &[0]), sub_factor(im, &[1])),
        1 => (PairKind::Disjoint, sub_factor(im, &[0, 1]), sub_factor(im, &[2])),
        2 => (PairKind::Nested, sub_factor(im, &[0]), sub_factor(im, &[0, 1])),
        _ => {
            let ka = r.gen_range(1..=2);
            let kb = r.gen_range(1..=2);
            let a = random_free_factor(RANK, ka, r.gen_range(1..=4), r);
            (PairKind::Random, a, random_free_factor(RANK, kb, r.gen_range(1..=4), r))
        }
    };
    if r.gen_bool(0.5) {
        (kind, b, a)
    } else {
        (kind, a, b)
    }
}

/// Classifies seeded pairs and checks that every decided verdict is backed
/// by its certificate and consistent with how the pair was built.
pub fn trichotomy_suite(samples: usize, seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("trichotomy", samples, seed);
    let mut r = rng(seed);
    let budget = ClassifyBudget::default();
    let mut counts: HashMap<&'static str, usize> = HashMap::new();
    for i in 0..samples {
        let (kind, a, b) = random_pair(&mut r);
        let c = classify_pair(&a, &b, &budget)?;
        *counts.entry(c.name()).or_default() += 1;
        let ok = match &c {
            Classification::ContainedIn => a.is_contained_in(&b),
            Classification::Contains => b.is_contained_in(&a) && !a.is_contained_in(&b),
            Classification::Disjoint { certificate, .. } => {
                overlap_obstruction(&a, &b).is_none()
                    && !a.is_contained_in(&b)
                    && !b.is_contained_in(&a)
                    && disjointly_embedded(&a, &b, certificate)?
            }
            Classification::Overlap { .. } => {
                kind != PairKind::Disjoint && kind != PairKind::Nested && overlap_obstruction(&a, &b).is_some()
            }
            Classification::Unknown { .. } => true,
        };
        let expected = match kind {
            PairKind::Disjoint => c.is_disjoint() || !c.is_decided(),
            PairKind::Nested => matches!(c, Classification::ContainedIn | Classification::Contains),
            PairKind::Random => true,
        };
        if !ok || !expected {
            rep.fail(format!("#{i} {a} vs {b} ({kind:?}): {}", c.name()));
        }
    }
    for name in ["ContainedIn", "Contains", "Disjoint", "Overlap", "Unknown"] {
        rep.metric(&name.to_lowercase(), counts.get(name).copied().unwrap_or(0));
    }
    Ok(rep)
}

/// Random `(A, G)` with `Ω̃` a forest; `A` is either a random free factor or
/// generated by random words. Every such `A` must be a free factor.
pub fn near_embedded_suite(samples: usize, seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("near-embedded", samples, seed);
    let mut r = rng(seed);
    let (mut accepted, mut attempts, mut confirmed, mut from_words) = (0usize, 0usize, 0usize, 0usize);
    while accepted < samples && attempts < 100 * samples.max(1) {
        attempts += 1;
        let by_words = r.gen_bool(0.5);
        let a = if by_words {
            let k = r.gen_range(1..=2);
            let ws = (0..k).map(|_| random_word(RANK, r.gen_range(1..=4), &mut r)).collect();
            match FactorClass::new(ws) {
                Ok(a) if a.rank() > 0 => a,
                _ => continue,
            }
        } else {
            random_free_factor(RANK, r.gen_range(1..=2), r.gen_range(0..=4), &mut r)
        };
        let g = random_marked_graph(RANK, r.gen_range(0..=4), r.gen_range(0..=2), &mut r);
        if !omega_data(&a, &g, None)?.is_nearly_embedded() {
            continue;
        }
        accepted += 1;
        from_words += by_words as usize;
        if is_free_factor(&a, ReductionBudget::default())?.is_free_factor() {
            confirmed += 1;
        } else {
            rep.fail(format!("{a} nearly embedded in {:?} but not a free factor", g.marking()));
        }
    }
    if accepted < samples {
        rep.fail(format!("only {accepted} nearly embedded pairs in {attempts} attempts"));
    }
    rep.metric("accepted", accepted);
    rep.metric("attempts", attempts);
    rep.metric("confirmed", confirmed);
    rep.metric("from_random_words", from_words);
    Ok(rep)
}

/// Disjoint `A`, `B` and a graph with `B` embedded and `Ω̃ ∪ E^B` a forest:
/// the joint embedding must exist, validate, and re-classify as Disjoint.
pub fn joint_embedding_suite(samples: usize, seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("joint-embedding", samples, seed);
    let mut r = rng(seed);
    let budget = ClassifyBudget::default();
    let (mut accepted, mut attempts, mut built) = (0usize, 0usize, 0usize);
    while accepted < samples && attempts < 100 * samples.max(1) {
        attempts += 1;
        let phi = random_automorphism(RANK, r.gen_range(0..=4), &mut r);
        let im = phi.images();
        let a = if r.gen_bool(0.5) { sub_factor(im, &[0]) } else { sub_factor(im, &[0, 1]) };
        let b = sub_factor(im, &[2]);
        let cfg = SamplingConfig {
            samples: 4,
            seed: r.gen(),
            max_whitehead: 3,
        };
        let gs = splitting_samples(&b, &cfg)?;
        let g = &gs[r.gen_range(0..gs.len())];
        if omega_data(&a, g, Some(&b))?.omega_tilde_eb_forest() != Some(true) {
            continue;
        }
        accepted += 1;
        let Some(cert) = joint_embedding(&a, &b, g)? else {
            rep.fail(format!("{a}, {b}: forest condition holds but no joint embedding"));
            continue;
        };
        let valid = MarkedGraph::new(
            cert.num_vertices(),
            cert.edges().to_vec(),
            cert.marking().to_vec(),
            cert.lengths().map(|l| l.to_vec()),
        )
        .is_ok();
        let disjoint = disjointly_embedded(&a, &b, &cert)?;
        let verdict = classify_pair(&a, &b, &budget)?;
        if valid && disjoint && verdict.is_disjoint() {
            built += 1;
        } else {
            rep.fail(format!("{a}, {b}: valid {valid}, disjoint {disjoint}, verdict {}", verdict.name()));
        }
    }
    if accepted < samples {
        rep.fail(format!("only {accepted} forest pairs in {attempts} attempts"));
    }
    rep.metric("accepted", accepted);
    rep.metric("attempts", attempts);
    rep.metric("certified", built);
    Ok(rep)
}

/// Overlapping `(A, B)` with `rank(A) = 2`, certified by an obstruction.
fn overlapping_pair(r: &mut SampleRng) -> (FactorClass, FactorClass) {
    loop {
        let a = random_free_factor(RANK, 2, r.gen_range(0..=4), r);
        let b = random_free_factor(RANK, r.gen_range(1..=2), r.gen_range(1..=5), r);
        if a.is_contained_in(&b) || b.is_contained_in(&a) {
            continue;
        }
        if overlap_obstruction(&a, &b).is_some() {
            return (a, b);
        }
    }
}

fn diameter_of(a: &FactorClass, b: &FactorClass, k: usize, seed: u64) -> Result<Option<u64>> {
    let cfg = SamplingConfig {
        samples: k,
        seed,
        max_whitehead: 3,
    };
    let p = project_factor(a, b, &cfg)?;
    if p.is_empty() {
        return Ok(None);
    }
    Ok(p.diameter()?.upper)
}

/// `D_emp = max diam π_A(B)` over `k` and `2k` sampled splittings.
pub fn diameter_suite(samples: usize, seed: u64, k: usize) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("diameter", samples, seed);
    let mut r = rng(seed);
    let (mut d_k, mut d_2k) = (0u64, 0u64);
    for i in 0..samples {
        let (a, b) = overlapping_pair(&mut r);
        let s = r.gen();
        let (Some(x), Some(y)) = (diameter_of(&a, &b, k, s)?, diameter_of(&a, &b, 2 * k, s)?) else {
            rep.fail(format!("#{i} π_{a}({b}) empty"));
            continue;
        };
        d_k = d_k.max(x);
        d_2k = d_2k.max(y);
    }
    rep.metric("k", k);
    rep.metric("d_emp", d_k);
    rep.metric("d_emp_doubled", d_2k);
    if d_k != d_2k {
        rep.fail(format!("D_emp changed from {d_k} to {d_2k} when k doubled"));
    }
    if d_2k > 10 {
        rep.fail(format!("D_emp = {d_2k} > 10"));
    }
    Ok(rep)
}

fn overlapping_rank2_pair(r: &mut SampleRng) -> (FactorClass, FactorClass) {
    loop {
        let a = random_free_factor(RANK, 2, r.gen_range(0..=4), r);
        let b = random_free_factor(RANK, 2, r.gen_range(1..=4), r);
        if !a.is_contained_in(&b) {
            return (a, b);
        }
    }
}

/// Behrstock triples `(A, B, G)`: reports `M_emp`, the largest of the
/// smaller projection-distance upper bounds, and checks the worked example
/// against the `D_emp` measured on the same pairs.
pub fn behrstock_suite(samples: usize, seed: u64, d_emp: Option<u64>) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("behrstock", samples, seed);
    let mut r = rng(seed);
    let cfg = SamplingConfig::default();
    let mut m_emp = 0u64;
    let mut d_measured = 0u64;
    for i in 0..samples {
        let (a, b) = overlapping_rank2_pair(&mut r);
        let g = random_marked_graph(RANK, r.gen_range(0..=5), r.gen_range(0..=2), &mut r);
        let cfg = SamplingConfig { seed: r.gen(), ..cfg };
        let rep_i = behrstock_check(&a, &b, &g, &cfg)?;
        match rep_i.min_upper {
            Some(m) => m_emp = m_emp.max(m),
            None => rep.fail(format!("#{i} {a}, {b}: no certified upper bound")),
        }
        if d_emp.is_none() {
            for (x, y) in [(&a, &b), (&b, &a)] {
                if let Some(d) = project_factor(x, y, &cfg)?.diameter()?.upper {
                    d_measured = d_measured.max(d);
                }
            }
        }
    }
    let d_emp = d_emp.unwrap_or(d_measured);
    rep.metric("m_emp", m_emp);
    rep.metric("d_emp", d_emp);
    if m_emp > 10 {
        rep.fail(format!("M_emp = {m_emp} > 10"));
    }
    let a = FactorClass::parse(RANK, "a,b")?;
    let b = FactorClass::parse(RANK, "b,c")?;
    let worked = behrstock_check(&a, &b, &MarkedGraph::rose(RANK), &cfg)?;
    match worked.min_upper {
        Some(m) => {
            rep.metric("worked_min_upper", m);
            if m > d_emp {
                rep.fail(format!("worked example: {m} > D_emp = {d_emp}"));
            }
        }
        None => rep.fail("worked example has no certified bound".into()),
    }
    Ok(rep)
}

/// `π_A(C)` for a rank-1 vertex `C` meeting `A`.
fn vertex_projection(a: &FactorClass, c: &CVertex, cfg: &SamplingConfig) -> Result<BTreeSet<FactorClass>> {
    if c.factor().is_contained_in(a) {
        return Ok(rank_one_in(a, c.factor())?.into_iter().collect());
    }
    Ok(project_factor(a, c.factor(), cfg)?.members)
}

/// Shortest path from `u` to `v` in the subgraph induced on `allowed`.
fn bfs_within(g: &mut BoundedCn, allowed: &[CVertex], u: usize, v: usize) -> Result<Option<Vec<usize>>> {
    let mut prev: Vec<Option<usize>> = vec![None; allowed.len()];
    let mut seen = vec![false; allowed.len()];
    seen[u] = true;
    let mut q = VecDeque::from([u]);
    while let Some(x) = q.pop_front() {
        if x == v {
            let mut path = vec![v];
            while let Some(p) = prev[*path.last().unwrap()] {
                path.push(p);
            }
            path.reverse();
            return Ok(Some(path));
        }
        for y in 0..allowed.len() {
            if !seen[y] && g.edge(&allowed[x], &allowed[y])? {
                seen[y] = true;
                prev[y] = Some(x);
                q.push_back(y);
            }
        }
    }
    Ok(None)
}

/// Geodesics of bounded `C_3` whose vertices all meet `A`: the projection
/// of the whole path to `F(A)` has diameter at most `M_emp`. A path found
/// among the vertices meeting `A` is kept only when no shorter path exists
/// in the whole bounded graph.
pub fn bgit_suite(samples: usize, seed: u64, bound: usize, m_emp: Option<u64>) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("bgit", samples, seed);
    let m_emp = match m_emp {
        Some(m) => m,
        None => {
            let b = behrstock_suite(samples.min(50), seed, None)?;
            b.int("m_emp").unwrap_or(0) as u64
        }
    };
    let mut r = rng(seed);
    let cfg = SamplingConfig::default();
    let mut g = BoundedCn::new(RANK, bound)?;
    let verts = primitive_vertices(RANK, bound)?;
    let index: HashMap<String, usize> = verts.iter().enumerate().map(|(i, c)| (c.factor().code().to_string(), i)).collect();
    let mut rejected = 0usize;
    let (mut paths, mut attempts, mut max_diam, mut longest) = (0usize, 0usize, 0u64, 0usize);
    while paths < samples && attempts < 20 * samples.max(1) {
        attempts += 1;
        let a = random_free_factor(RANK, 2, r.gen_range(0..=3), &mut r);
        // vertices certified to meet A; undecided ones are left out
        let mut meeting = Vec::new();
        for c in &verts {
            let f = c.factor();
            if f.is_contained_in(&a) || overlap_obstruction(&a, f).is_some() {
                meeting.push(c.clone());
            }
        }
        if meeting.len() < 2 {
            continue;
        }
        let u = r.gen_range(0..meeting.len());
        let v = r.gen_range(0..meeting.len());
        if u == v {
            continue;
        }
        let Some(path) = bfs_within(&mut g, &meeting, u, v)? else {
            continue;
        };
        // keep it only if it is also a geodesic of the whole bounded graph
        let (iu, iv) = (index[meeting[u].factor().code()], index[meeting[v].factor().code()]);
        if bfs_within(&mut g, &verts, iu, iv)?.map(|p| p.len()) != Some(path.len()) {
            rejected += 1;
            continue;
        }
        paths += 1;
        longest = longest.max(path.len() - 1);
        let mut proj = BTreeSet::new();
        for &i in &path {
            proj.extend(vertex_projection(&a, &meeting[i], &cfg)?);
        }
        if proj.is_empty() {
            continue;
        }
        let d = factor_distance(&a, &proj, &proj)?;
        match d.upper {
            Some(d) => {
                max_diam = max_diam.max(d);
                if d > m_emp {
                    rep.fail(format!("A = {a}: path projection diameter {d} > M_emp = {m_emp}"));
                }
            }
            None => rep.fail(format!("A = {a}: no certified diameter")),
        }
    }
    if paths < samples {
        rep.fail(format!("only {paths} paths in {attempts} attempts"));
    }
    rep.metric("bound", bound);
    rep.metric("paths", paths);
    rep.metric("non_geodesic_rejected", rejected);
    rep.metric("longest_path", longest);
    rep.metric("max_diameter", max_diam);
    rep.metric("m_emp", m_emp);
    Ok(rep)
}

/// `d_{φC}(φA, φB) = d_C(A, B)` with projections read off transported
/// splittings, and invariance of classification verdicts.
pub fn equivariance_suite(triples: usize, verdicts: usize, seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("equivariance", triples + verdicts, seed);
    let mut r = rng(seed);
    let mut compared = 0usize;
    while compared < triples {
        let (c, a) = overlapping_pair(&mut r);
        let (_, b) = overlapping_pair(&mut r);
        if overlap_obstruction(&c, &b).is_none() || b.is_contained_in(&c) {
            continue;
        }
        let phi = random_automorphism(RANK, r.gen_range(1..=5), &mut r);
        let cfg = SamplingConfig {
            samples: 4,
            seed: r.gen(),
            max_whitehead: 3,
        };
        let (ga, gb) = (splitting_samples(&a, &cfg)?, splitting_samples(&b, &cfg)?);
        let pc = FactorClass::new(c.gens().iter().map(|w| phi.apply(w)).collect::<Result<_>>()?)?;
        let proj = |x: &FactorClass, gs: &[MarkedGraph]| -> Result<BTreeSet<FactorClass>> {
            let mut out = BTreeSet::new();
            for g in gs {
                out.extend(project_graph(x, g)?.members);
            }
            Ok(out)
        };
        let moved = |gs: &[MarkedGraph]| gs.iter().map(|g| g.act(&phi)).collect::<Result<Vec<_>>>();
        let (xa, xb) = (proj(&c, &ga)?, proj(&c, &gb)?);
        let (ya, yb) = (proj(&pc, &moved(&ga)?)?, proj(&pc, &moved(&gb)?)?);
        compared += 1;
        if xa.is_empty() || xb.is_empty() {
            continue;
        }
        let d0 = factor_distance(&c, &xa, &xb)?;
        let d1 = factor_distance(&pc, &ya, &yb)?;
        if xa != ya || xb != yb || d0 != d1 {
            rep.fail(format!("C = {c}, φ = {phi}: {d0:?} vs {d1:?}"));
        }
    }
    let budget = ClassifyBudget::default();
    let mut undecided = 0usize;
    for _ in 0..verdicts {
        let (_, a, b) = random_pair(&mut r);
        let phi = random_automorphism(RANK, r.gen_range(1..=5), &mut r);
        let v0 = classify_pair(&a, &b, &budget)?;
        let v1 = classify_pair(&a.apply(&phi)?, &b.apply(&phi)?, &budget)?;
        if !v0.is_decided() || !v1.is_decided() {
            undecided += 1;
        }
        if v0.name() != v1.name() {
            rep.fail(format!("{a}, {b} under {phi}: {} vs {}", v0.name(), v1.name()));
        }
    }
    rep.metric("triples", compared);
    rep.metric("verdicts", verdicts);
    rep.metric("undecided", undecided);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_runs_pass() {
        for rep in [
            trichotomy_suite(6, 1).unwrap(),
            near_embedded_suite(6, 1).unwrap(),
            joint_embedding_suite(3, 1).unwrap(),
            diameter_suite(3, 1, 4).unwrap(),
        ] {
            assert!(rep.passed, "{}: {:?}", rep.suite, rep.failures);
        }
    }
}
