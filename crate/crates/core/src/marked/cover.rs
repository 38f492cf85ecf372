use std::collections::BTreeSet;

use serde::Serialize;

use super::{Length, MarkedGraph};
use crate::error::{Error, Result};
use crate::factor::FactorClass;
use crate::stallings::{find, path_subgroup_graph, union, StallingsGraph};
use crate::word::{mul_letters, Letter, Word};

/// The core `A|G` of the cover of `G` for the class of `A`, with its
/// immersion to `G`. Labels of `graph` are edges of `G`; transcripts express
/// loops at the basepoint in the basis of `A` (up to one fixed conjugation).
#[derive(Clone, Debug)]
pub struct Immersion {
    pub graph: StallingsGraph,
    pub vertex_map: Vec<usize>,
    pub lengths: Option<Vec<Length>>,
    /// Rank of `A`, the alphabet of the transcripts.
    pub factor_rank: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ImmersionSummary {
    pub vertices: usize,
    pub edges: usize,
    pub image_edges: Vec<usize>,
    pub multiplicity: Vec<usize>,
    pub embedding: bool,
}

impl Immersion {
    /// Builds `A|G`.
    pub fn cover_core(a: &FactorClass, g: &MarkedGraph) -> Result<Self> {
        if a.ambient_rank() != g.rank() {
            return Err(Error::RankMismatch {
                expected: g.rank(),
                found: a.ambient_rank(),
            });
        }
        let paths: Vec<Vec<Letter>> = a.gens().iter().map(|w| g.loop_of(w)).collect();
        let based = path_subgroup_graph(g.num_edges(), &paths)?;
        let graph = based.core_based();
        let mut vertex_map = vec![usize::MAX; graph.num_vertices()];
        for e in graph.edges() {
            let (s, t) = g.edges()[e.label];
            vertex_map[e.from] = s;
            vertex_map[e.to] = t;
        }
        let lengths = g
            .lengths()
            .map(|ls| graph.edges().iter().map(|e| ls[e.label]).collect());
        Ok(Immersion {
            graph,
            vertex_map,
            lengths,
            factor_rank: a.rank(),
        })
    }

    pub fn num_edges(&self) -> usize {
        self.graph.num_edges()
    }

    pub fn num_vertices(&self) -> usize {
        self.graph.num_vertices()
    }

    /// Target edge of each domain edge.
    pub fn edge_map(&self) -> Vec<usize> {
        self.graph.edges().iter().map(|e| e.label).collect()
    }

    /// Number of domain edges over each of the `target_edges` edges.
    pub fn multiplicity(&self, target_edges: usize) -> Vec<usize> {
        let mut m = vec![0; target_edges];
        for e in self.graph.edges() {
            m[e.label] += 1;
        }
        m
    }

    /// Injective on edges and vertices, i.e. `A|G → G` is the inclusion of
    /// a subgraph.
    pub fn is_embedding(&self) -> bool {
        let labels: BTreeSet<usize> = self.graph.edges().iter().map(|e| e.label).collect();
        let verts: BTreeSet<usize> = self.vertex_map.iter().copied().collect();
        labels.len() == self.graph.num_edges() && verts.len() == self.graph.num_vertices()
    }

    /// Image subgraph: target edges and vertices.
    pub fn image(&self) -> (BTreeSet<usize>, BTreeSet<usize>) {
        (
            self.graph.edges().iter().map(|e| e.label).collect(),
            self.vertex_map.iter().copied().collect(),
        )
    }

    pub fn summary(&self, target_edges: usize) -> ImmersionSummary {
        ImmersionSummary {
            vertices: self.num_vertices(),
            edges: self.num_edges(),
            image_edges: self.image().0.into_iter().collect(),
            multiplicity: self.multiplicity(target_edges),
            embedding: self.is_embedding(),
        }
    }

    /// Conjugacy classes (in the basis of `A`) of the fundamental groups of
    /// the components of the subgraph on the edges where `keep` holds.
    pub fn component_groups(&self, keep: impl Fn(usize) -> bool) -> Vec<Vec<Word>> {
        component_groups(&self.graph, self.factor_rank, keep)
    }
}

/// Free bases (as transcript words) of the fundamental groups of the
/// components of a subgraph, skipping simply connected components.
pub(crate) fn component_groups(
    graph: &StallingsGraph,
    factor_rank: usize,
    keep: impl Fn(usize) -> bool,
) -> Vec<Vec<Word>> {
    let nv = graph.num_vertices();
    let edges = graph.edges();
    let kept: Vec<usize> = (0..edges.len()).filter(|&e| keep(e)).collect();
    // spanning forest via union-find, then tree paths by DFS
    let mut parent: Vec<usize> = (0..nv).collect();
    let mut in_forest = vec![false; edges.len()];
    for &e in &kept {
        if union(&mut parent, edges[e].from, edges[e].to) {
            in_forest[e] = true;
        }
    }
    let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); nv];
    for &e in &kept {
        if in_forest[e] {
            adj[edges[e].from].push((e, true));
            adj[edges[e].to].push((e, false));
        }
    }
    let mut root_tag: Vec<Option<Vec<Letter>>> = vec![None; nv];
    let mut roots = Vec::new();
    for r in 0..nv {
        if root_tag[r].is_some() {
            continue;
        }
        roots.push(r);
        root_tag[r] = Some(Vec::new());
        let mut stack = vec![r];
        while let Some(v) = stack.pop() {
            let tv = root_tag[v].clone().unwrap();
            for &(e, fwd) in &adj[v] {
                let w = if fwd { edges[e].to } else { edges[e].from };
                if root_tag[w].is_none() {
                    root_tag[w] = Some(mul_letters(&tv, &graph.transcript_of_path(&[(e, fwd)])));
                    stack.push(w);
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<Word>)> = Vec::new();
    for &e in &kept {
        if in_forest[e] {
            continue;
        }
        let (a, b) = (edges[e].from, edges[e].to);
        let root = find(&mut parent, a);
        let t = mul_letters(
            &mul_letters(root_tag[a].as_ref().unwrap(), &graph.transcript_of_path(&[(e, true)])),
            &crate::word::inverse_letters(root_tag[b].as_ref().unwrap()),
        );
        let w = Word::reduce(factor_rank, &t).expect("transcripts lie in the factor alphabet");
        match groups.iter_mut().find(|(r, _)| *r == root) {
            Some((_, gs)) => gs.push(w),
            None => groups.push((root, vec![w])),
        }
    }
    groups.into_iter().map(|(_, gs)| gs).collect()
}

/// Vertex groups of all one-edge collapses of `H`, as classes in `A`'s free
/// group: for each edge `e`, the fundamental groups of the components of
/// `H` minus the open edge `e`.
pub fn one_edge_collapse_factors(h: &Immersion) -> Result<BTreeSet<FactorClass>> {
    let mut out = BTreeSet::new();
    for e in 0..h.num_edges() {
        for gens in h.component_groups(|f| f != e) {
            out.insert(FactorClass::new(gens)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fc(rank: usize, s: &str) -> FactorClass {
        FactorClass::parse(rank, s).unwrap()
    }

    #[test]
    fn sub_rose_is_embedded() {
        let h = Immersion::cover_core(&fc(3, "a,b"), &MarkedGraph::rose(3)).unwrap();
        assert!(h.is_embedding());
        assert_eq!(h.image().0, BTreeSet::from([0, 1]));
    }

    #[test]
    fn conjugate_generator_cover() {
        let h = Immersion::cover_core(&fc(2, "a,baB"), &MarkedGraph::rose(2)).unwrap();
        assert_eq!((h.num_vertices(), h.num_edges()), (2, 3));
        assert!(!h.is_embedding());
        assert_eq!(h.multiplicity(2), vec![2, 1]);
    }

    #[test]
    fn collapse_factors_of_two_petal_rose() {
        let h = Immersion::cover_core(&fc(3, "a,b"), &MarkedGraph::rose(3)).unwrap();
        let f = one_edge_collapse_factors(&h).unwrap();
        assert_eq!(f, BTreeSet::from([fc(2, "a"), fc(2, "b")]));
    }

    #[test]
    fn collapse_factors_in_adapted_basis() {
        // petals x = ab, y = c, z = b; A = ⟨a, b⟩ = ⟨x, z⟩
        let w = |s| Word::parse(3, s).unwrap();
        let g = MarkedGraph::rose_with_marking(vec![w("ab"), w("c"), w("b")]).unwrap();
        let h = Immersion::cover_core(&fc(3, "a,b"), &g).unwrap();
        assert!(h.is_embedding());
        let f = one_edge_collapse_factors(&h).unwrap();
        assert_eq!(f, BTreeSet::from([fc(2, "ab"), fc(2, "b")]));
    }

    #[test]
    fn theta_collapses() {
        // A = F_2 on a theta graph: each collapse leaves a rank-1 group
        let w = |s| Word::parse(2, s).unwrap();
        let g = MarkedGraph::new(2, vec![(0, 1), (0, 1), (0, 1)], vec![w(""), w("a"), w("b")], None).unwrap();
        let h = Immersion::cover_core(&fc(2, "a,b"), &g).unwrap();
        let f = one_edge_collapse_factors(&h).unwrap();
        assert_eq!(f.len(), 3);
        assert!(f.iter().all(|x| x.rank() == 1));
        assert_eq!(f, BTreeSet::from([fc(2, "a"), fc(2, "b"), fc(2, "aB")]));
    }

    #[test]
    fn separating_edge_reports_both_halves() {
        let w = |s| Word::parse(2, s).unwrap();
        let g = MarkedGraph::new(2, vec![(0, 0), (0, 1), (1, 1)], vec![w("a"), w(""), w("b")], None).unwrap();
        let h = Immersion::cover_core(&fc(2, "a,b"), &g).unwrap();
        let f = one_edge_collapse_factors(&h).unwrap();
        assert_eq!(f, BTreeSet::from([fc(2, "a"), fc(2, "b")]));
    }
}
