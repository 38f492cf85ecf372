//! Multiplicity data of `p: A|G → G` and the joint-embedding construction.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::factor::FactorClass;
use crate::marked::{Immersion, MarkedGraph};
use crate::stallings::{find, union};

#[derive(Clone, Debug)]
pub struct OmegaData {
    pub immersion: Immersion,
    /// Number of edges of `A|G` over each edge of `G`.
    pub multiplicity: Vec<usize>,
    /// Edges of `G` covered at least twice.
    pub omega: BTreeSet<usize>,
    /// Edges of `A|G` over `omega`.
    pub omega_tilde: BTreeSet<usize>,
    /// Edges of `A|G` over the embedded `B|G`, when `B` is given.
    pub eb: Option<BTreeSet<usize>>,
    /// Image of `B|G` in `G` (edges, vertices), when `B` is given.
    pub b_image: Option<(BTreeSet<usize>, BTreeSet<usize>)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OmegaSummary {
    pub multiplicity: Vec<usize>,
    pub omega: Vec<usize>,
    pub omega_tilde: Vec<usize>,
    pub eb: Option<Vec<usize>>,
    pub nearly_embedded: bool,
    pub omega_tilde_eb_forest: Option<bool>,
}

fn is_forest(nv: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> bool {
    let mut parent: Vec<usize> = (0..nv).collect();
    edges.into_iter().all(|(a, b)| union(&mut parent, a, b))
}

impl OmegaData {
    pub fn new(a: &FactorClass, g: &MarkedGraph, b: Option<&FactorClass>) -> Result<Self> {
        let immersion = Immersion::cover_core(a, g)?;
        let multiplicity = immersion.multiplicity(g.num_edges());
        let omega: BTreeSet<usize> = (0..g.num_edges()).filter(|&e| multiplicity[e] >= 2).collect();
        let omega_tilde: BTreeSet<usize> = immersion
            .graph
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| omega.contains(&e.label))
            .map(|(i, _)| i)
            .collect();
        let (eb, b_image) = match b {
            None => (None, None),
            Some(b) => {
                let hb = Immersion::cover_core(b, g)?;
                if !hb.is_embedding() {
                    return Err(Error::NotEmbedded);
                }
                let img = hb.image();
                let eb = immersion
                    .graph
                    .edges()
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| img.0.contains(&e.label))
                    .map(|(i, _)| i)
                    .collect();
                (Some(eb), Some(img))
            }
        };
        let data = OmegaData {
            immersion,
            multiplicity,
            omega,
            omega_tilde,
            eb,
            b_image,
        };
        debug_assert!(data.check_preimage());
        Ok(data)
    }

    /// `Ω̃ = p⁻¹(Ω)`, edge by edge.
    pub fn check_preimage(&self) -> bool {
        self.immersion
            .graph
            .edges()
            .iter()
            .enumerate()
            .all(|(i, e)| self.omega_tilde.contains(&i) == self.omega.contains(&e.label))
    }

    fn subgraph_is_forest(&self, edges: &BTreeSet<usize>) -> bool {
        let g = &self.immersion.graph;
        is_forest(
            g.num_vertices(),
            edges.iter().map(|&i| (g.edges()[i].from, g.edges()[i].to)),
        )
    }

    /// `Ω̃` is a forest.
    pub fn is_nearly_embedded(&self) -> bool {
        self.subgraph_is_forest(&self.omega_tilde)
    }

    /// `Ω̃ ∪ E^B` is a forest (`None` without `B`).
    pub fn omega_tilde_eb_forest(&self) -> Option<bool> {
        self.eb
            .as_ref()
            .map(|eb| self.subgraph_is_forest(&self.omega_tilde.union(eb).copied().collect()))
    }

    pub fn summary(&self) -> OmegaSummary {
        OmegaSummary {
            multiplicity: self.multiplicity.clone(),
            omega: self.omega.iter().copied().collect(),
            omega_tilde: self.omega_tilde.iter().copied().collect(),
            eb: self.eb.as_ref().map(|s| s.iter().copied().collect()),
            nearly_embedded: self.is_nearly_embedded(),
            omega_tilde_eb_forest: self.omega_tilde_eb_forest(),
        }
    }
}

pub fn omega_data(a: &FactorClass, g: &MarkedGraph, b: Option<&FactorClass>) -> Result<OmegaData> {
    OmegaData::new(a, g, b)
}

/// Checks that `A` and `B` are embedded in `g` as vertex-disjoint subgraphs.
pub fn disjointly_embedded(a: &FactorClass, b: &FactorClass, g: &MarkedGraph) -> Result<bool> {
    let ha = Immersion::cover_core(a, g)?;
    let hb = Immersion::cover_core(b, g)?;
    if !ha.is_embedding() || !hb.is_embedding() {
        return Ok(false);
    }
    Ok(ha.image().1.is_disjoint(&hb.image().1))
}

/// Builds a marked graph in which `A` and `B` are disjointly embedded, from
/// a graph `G` in which `B` is embedded and `Ω̃ ∪ E^B ⊂ A|G` is a forest:
/// extend the forest to a maximal tree `T`, let `E` be the edges off `T`,
/// glue `A|G` to `G ∖ p(E)` at one vertex and pull the marking back along
/// the map to `G`. Returns `None` when the forest condition fails or the
/// result does not validate.
pub fn joint_embedding(a: &FactorClass, b: &FactorClass, g: &MarkedGraph) -> Result<Option<MarkedGraph>> {
    let data = OmegaData::new(a, g, Some(b))?;
    if data.omega_tilde_eb_forest() != Some(true) {
        return Ok(None);
    }
    let h = &data.immersion;
    let hg = &h.graph;
    let nh = hg.num_vertices();
    // maximal tree containing Ω̃ ∪ E^B
    let forced: BTreeSet<usize> = data.omega_tilde.union(data.eb.as_ref().unwrap()).copied().collect();
    let mut parent: Vec<usize> = (0..nh).collect();
    let mut in_tree = vec![false; hg.num_edges()];
    for &i in &forced {
        let e = hg.edges()[i];
        in_tree[i] = union(&mut parent, e.from, e.to);
    }
    for (i, e) in hg.edges().iter().enumerate() {
        if !in_tree[i] && union(&mut parent, e.from, e.to) {
            in_tree[i] = true;
        }
    }
    let root = find(&mut parent, 0);
    debug_assert!((0..nh).all(|v| find(&mut parent, v) == root));
    let removed: BTreeSet<usize> = (0..hg.num_edges())
        .filter(|&i| !in_tree[i])
        .map(|i| hg.edges()[i].label)
        .collect();
    // G ∖ p(E), dropping isolated vertices
    let (_, b_verts) = data.b_image.clone().unwrap();
    let mut g_edges: Vec<(usize, usize, usize)> = Vec::new(); // (from, to, G edge)
    for (e, &(s, t)) in g.edges().iter().enumerate() {
        if !removed.contains(&e) {
            g_edges.push((s, t, e));
        }
    }
    // wedge point: prefer a vertex of A|G lying over a vertex outside B|G
    let x = (0..nh)
        .find(|&v| !b_verts.contains(&h.vertex_map[v]))
        .unwrap_or(0);
    let px = h.vertex_map[x];
    // vertex numbering: G vertices first, then A|G vertices other than x
    let gv = g.num_vertices();
    let hv = |v: usize| -> usize {
        if v == x {
            px
        } else {
            gv + v - (v > x) as usize
        }
    };
    let mut edges = Vec::new();
    let mut marking = Vec::new();
    let mut lengths = Vec::new();
    for &(s, t, e) in &g_edges {
        edges.push((s, t));
        marking.push(g.marking()[e].clone());
        if let Some(ls) = g.lengths() {
            lengths.push(ls[e]);
        }
    }
    let a_edges_start = edges.len();
    for e in hg.edges() {
        edges.push((hv(e.from), hv(e.to)));
        marking.push(g.marking()[e.label].clone());
        if let Some(ls) = g.lengths() {
            lengths.push(ls[e.label]);
        }
    }
    let nv = gv + nh - 1;
    let lengths = g.lengths().map(|_| lengths);
    let Some((nv, edges, marking, lengths, a_vertex)) =
        prune_hairs(nv, edges, marking, lengths, a_edges_start, px)
    else {
        return Ok(None);
    };
    let Ok(mut cand) = MarkedGraph::new(nv, edges, marking, lengths) else {
        return Ok(None);
    };
    if !disjointly_embedded(a, b, &cand)? {
        // the wedge point is shared with B: blow it up
        let ha = Immersion::cover_core(a, &cand)?;
        if !ha.is_embedding() {
            return Ok(None);
        }
        let (a_img, _) = ha.image();
        let moved: Vec<(usize, bool)> = cand
            .directions(a_vertex)
            .into_iter()
            .filter(|(e, _)| a_img.contains(e))
            .collect();
        match cand.blow_up(a_vertex, &moved) {
            Ok(c) => cand = c,
            Err(_) => return Ok(None),
        }
        if !disjointly_embedded(a, b, &cand)? {
            return Ok(None);
        }
    }
    Ok(Some(cand))
}

type Pruned = (usize, Vec<(usize, usize)>, Vec<crate::word::Word>, Option<Vec<crate::marked::Length>>, usize);

/// Removes valence ≤ 1 vertices repeatedly and renumbers; also returns the
/// new index of vertex `keep`. `None` if `keep` disappears.
fn prune_hairs(
    nv: usize,
    edges: Vec<(usize, usize)>,
    marking: Vec<crate::word::Word>,
    lengths: Option<Vec<crate::marked::Length>>,
    _a_start: usize,
    keep: usize,
) -> Option<Pruned> {
    let mut alive_e = vec![true; edges.len()];
    let mut alive_v = vec![true; nv];
    loop {
        let mut deg = vec![0usize; nv];
        for (i, &(a, b)) in edges.iter().enumerate() {
            if alive_e[i] {
                deg[a] += 1;
                deg[b] += 1;
            }
        }
        let mut changed = false;
        for v in 0..nv {
            if alive_v[v] && deg[v] <= 1 {
                alive_v[v] = false;
                changed = true;
                for (i, &(a, b)) in edges.iter().enumerate() {
                    if alive_e[i] && (a == v || b == v) {
                        alive_e[i] = false;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    if !alive_v[keep] {
        return None;
    }
    let mut remap = vec![usize::MAX; nv];
    let mut k = 0;
    // keep vertex 0 first when it survives, so the tree root is stable
    for v in 0..nv {
        if alive_v[v] {
            remap[v] = k;
            k += 1;
        }
    }
    let mut e2 = Vec::new();
    let mut m2 = Vec::new();
    let mut l2 = lengths.as_ref().map(|_| Vec::new());
    for (i, &(a, b)) in edges.iter().enumerate() {
        if alive_e[i] {
            e2.push((remap[a], remap[b]));
            m2.push(marking[i].clone());
            if let (Some(l2), Some(ls)) = (l2.as_mut(), lengths.as_ref()) {
                l2.push(ls[i]);
            }
        }
    }
    Some((k, e2, m2, l2, remap[keep]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fc(rank: usize, s: &str) -> FactorClass {
        FactorClass::parse(rank, s).unwrap()
    }

    #[test]
    fn omega_examples() {
        let g3 = MarkedGraph::rose(3);
        let d = omega_data(&fc(3, "a,b"), &g3, None).unwrap();
        assert!(d.omega.is_empty() && d.is_nearly_embedded());
        let g2 = MarkedGraph::rose(2);
        let d = omega_data(&fc(2, "a,baB"), &g2, None).unwrap();
        assert_eq!(d.omega, BTreeSet::from([0]));
        assert!(!d.is_nearly_embedded());
        let d = omega_data(&fc(2, "aa,b"), &g2, None).unwrap();
        assert_eq!(d.omega, BTreeSet::from([0]));
        assert!(!d.is_nearly_embedded());
    }

    #[test]
    fn omega_requires_embedded_b() {
        let g2 = MarkedGraph::rose(2);
        assert_eq!(
            omega_data(&fc(2, "a"), &g2, Some(&fc(2, "ab"))).unwrap_err(),
            Error::NotEmbedded
        );
    }

    #[test]
    fn joint_embedding_examples() {
        let g2 = MarkedGraph::rose(2);
        let cert = joint_embedding(&fc(2, "a"), &fc(2, "b"), &g2).unwrap().unwrap();
        assert!(disjointly_embedded(&fc(2, "a"), &fc(2, "b"), &cert).unwrap());
        assert!(joint_embedding(&fc(2, "a,baB"), &fc(2, "b"), &g2).unwrap().is_none());
    }

    #[test]
    fn joint_embedding_with_nontrivial_cover() {
        // A = ⟨ab⟩ double covers nothing; B = ⟨c⟩ is a petal
        let g3 = MarkedGraph::rose(3);
        let (a, b) = (fc(3, "ab"), fc(3, "c"));
        let cert = joint_embedding(&a, &b, &g3).unwrap().unwrap();
        assert!(disjointly_embedded(&a, &b, &cert).unwrap());
        let (a, b) = (fc(3, "ab,cb"), fc(3, "c"));
        // E^B contains the c-edge of A|G
        if let Some(cert) = joint_embedding(&a, &b, &g3).unwrap() {
            assert!(disjointly_embedded(&a, &b, &cert).unwrap());
        }
    }
}
