//! Marked graphs: finite core graphs `G` with an identification
//! `π₁(G) ≅ F_n`, optional rational edge lengths, covers `A|G`, collapses,
//! Lipschitz stretch and fold sequences.
//!
//! Edge paths are written over the edge alphabet: edge `e` traversed from
//! `from` to `to` is the letter `e + 1`, traversed backwards `-(e + 1)`.

mod cover;
mod folds;
mod stretch;

use std::collections::VecDeque;
use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::automorphism::Automorphism;
use crate::error::{Error, Result};
use crate::factor::{is_free_factor, FactorClass, ReductionBudget};
use crate::stallings::subgroup_graph;
use crate::word::{inverse_letters, mul_letters, reduce_letters, Letter, Word};

pub use cover::{one_edge_collapse_factors, Immersion};
pub use folds::{middle_interval, Direction, FoldSequence, GateStructure, MiddleInterval};
pub use stretch::{candidate_loops, lipschitz_stretch};

pub type Length = Ratio<i64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedGraph {
    rank: usize,
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
    /// Image in `F_n` of each edge; trivial on tree edges.
    marking: Vec<Word>,
    tree: Vec<bool>,
    lengths: Option<Vec<Length>>,
    /// Edge path at vertex 0 for each generator of `F_n`.
    inverse: Vec<Vec<Letter>>,
    /// Tree path from vertex 0 to each vertex.
    tree_paths: Vec<Vec<Letter>>,
}

pub(crate) fn edge_letter(e: usize, forward: bool) -> Letter {
    if forward {
        e as Letter + 1
    } else {
        -(e as Letter + 1)
    }
}

pub(crate) fn letter_edge(l: Letter) -> (usize, bool) {
    (l.unsigned_abs() as usize - 1, l > 0)
}

impl MarkedGraph {
    /// Builds a marked graph from edge words. The words may be arbitrary;
    /// they are gauge-normalized along a BFS spanning tree from vertex 0, and
    /// the loop words must form a basis of `F_n`.
    pub fn new(
        num_vertices: usize,
        edges: Vec<(usize, usize)>,
        marking: Vec<Word>,
        lengths: Option<Vec<Length>>,
    ) -> Result<Self> {
        let bad = |s: &str| Err(Error::InvalidMarkedGraph(s.to_string()));
        if edges.len() != marking.len() {
            return bad("one marking word per edge required");
        }
        let Some(rank) = marking.first().map(Word::rank) else {
            return bad("no edges");
        };
        if marking.iter().any(|w| w.rank() != rank) {
            return bad("marking words of different ranks");
        }
        if num_vertices == 0 || edges.iter().any(|&(a, b)| a >= num_vertices || b >= num_vertices) {
            return bad("edge endpoint out of range");
        }
        if edges.len() + 1 != num_vertices + rank {
            return bad("Euler characteristic does not match the rank");
        }
        if let Some(ls) = &lengths {
            if ls.len() != edges.len() || ls.iter().any(|l| *l <= Length::zero()) {
                return Err(Error::DegenerateMetric("lengths must be positive, one per edge".into()));
            }
        }
        let mut valence = vec![0usize; num_vertices];
        for &(a, b) in &edges {
            valence[a] += 1;
            valence[b] += 1;
        }
        if valence.iter().any(|&v| v < 2) {
            return bad("graph is not a core graph");
        }
        // BFS tree
        let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); num_vertices];
        for (i, &(a, b)) in edges.iter().enumerate() {
            adj[a].push((i, true));
            adj[b].push((i, false));
        }
        let mut seen = vec![false; num_vertices];
        let mut tree = vec![false; edges.len()];
        let mut tree_paths: Vec<Vec<Letter>> = vec![Vec::new(); num_vertices];
        let mut potential: Vec<Vec<Letter>> = vec![Vec::new(); num_vertices];
        seen[0] = true;
        let mut q = VecDeque::from([0usize]);
        while let Some(v) = q.pop_front() {
            for &(e, fwd) in &adj[v] {
                let w = if fwd { edges[e].1 } else { edges[e].0 };
                if !seen[w] {
                    seen[w] = true;
                    tree[e] = true;
                    tree_paths[w] = mul_letters(&tree_paths[v], &[edge_letter(e, fwd)]);
                    let step = if fwd {
                        marking[e].letters().to_vec()
                    } else {
                        inverse_letters(marking[e].letters())
                    };
                    potential[w] = mul_letters(&potential[v], &step);
                    q.push_back(w);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return bad("graph is not connected");
        }
        let marking: Vec<Word> = edges
            .iter()
            .zip(&marking)
            .map(|(&(a, b), m)| {
                let w = mul_letters(&mul_letters(&potential[a], m.letters()), &inverse_letters(&potential[b]));
                Word::from_reduced(rank, w)
            })
            .collect();
        let loops: Vec<usize> = (0..edges.len()).filter(|&e| !tree[e]).collect();
        let loop_words: Vec<Word> = loops.iter().map(|&e| marking[e].clone()).collect();
        if loop_words.iter().any(Word::is_identity) {
            return bad("marking is not a homotopy equivalence");
        }
        let g = subgroup_graph(&loop_words).map_err(|_| Error::InvalidMarkedGraph("trivial marking".into()))?;
        if g.num_vertices() != 1 || g.num_edges() != rank {
            return bad("marking is not a homotopy equivalence");
        }
        let loop_path = |k: usize| -> Vec<Letter> {
            let e = loops[k];
            let (a, b) = edges[e];
            mul_letters(
                &mul_letters(&tree_paths[a], &[edge_letter(e, true)]),
                &inverse_letters(&tree_paths[b]),
            )
        };
        let mut inverse = Vec::with_capacity(rank);
        for i in 0..rank {
            let y = g.express(&[i as Letter + 1])?;
            let mut path = Vec::new();
            for &l in y.letters() {
                let p = loop_path(gen_index_usize(l));
                let p = if l > 0 { p } else { inverse_letters(&p) };
                path = mul_letters(&path, &p);
            }
            inverse.push(path);
        }
        Ok(MarkedGraph {
            rank,
            num_vertices,
            edges,
            marking,
            tree,
            lengths,
            inverse,
            tree_paths,
        })
    }

    /// Rose whose `i`-th petal is marked by `images[i]`.
    pub fn rose_with_marking(images: Vec<Word>) -> Result<Self> {
        let n = images.len();
        MarkedGraph::new(1, vec![(0, 0); n], images, None)
    }

    /// The rose with the identity marking.
    pub fn rose(n: usize) -> Self {
        MarkedGraph::rose_with_marking((0..n).map(|i| Word::generator(n, i)).collect())
            .expect("identity marking")
    }

    /// Rose in which the free factor `A` is the sub-rose on the first
    /// `rank(A)` petals.
    ///
    /// The basis of `A` is completed by standard generators when possible,
    /// preferring later generators; otherwise the Whitehead witness is used.
    pub fn adapted_rose(a: &FactorClass) -> Result<Self> {
        if let Some(images) = complete_by_generators(a) {
            return MarkedGraph::rose_with_marking(images);
        }
        let verdict = is_free_factor(a, ReductionBudget::default())?;
        let phi = verdict
            .witness()
            .ok_or_else(|| Error::NotFreeFactor(a.to_string()))?;
        let inv = phi.inverse()?;
        MarkedGraph::rose_with_marking(inv.images().to_vec())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
    pub fn marking(&self) -> &[Word] {
        &self.marking
    }
    pub fn tree(&self) -> &[bool] {
        &self.tree
    }
    pub fn lengths(&self) -> Option<&[Length]> {
        self.lengths.as_deref()
    }

    pub fn valence(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|&(a, b)| (a == v) as usize + (b == v) as usize)
            .sum()
    }

    /// Directions at `v` as `(edge, outgoing)` pairs, a loop contributing
    /// both ends.
    pub fn directions(&self, v: usize) -> Vec<(usize, bool)> {
        let mut out = Vec::new();
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            if a == v {
                out.push((i, true));
            }
            if b == v {
                out.push((i, false));
            }
        }
        out
    }

    pub fn with_lengths(&self, lengths: Vec<Length>) -> Result<Self> {
        MarkedGraph::new(self.num_vertices, self.edges.clone(), self.marking.clone(), Some(lengths))
    }

    /// Each edge given length 1.
    pub fn with_unit_lengths(&self) -> Self {
        self.with_lengths(vec![Length::one(); self.edges.len()])
            .expect("unit lengths are valid")
    }

    pub fn volume(&self) -> Option<Length> {
        self.lengths.as_ref().map(|ls| ls.iter().sum())
    }

    /// Copy scaled to volume 1.
    pub fn normalized(&self) -> Result<Self> {
        let vol = self
            .volume()
            .ok_or_else(|| Error::DegenerateMetric("graph carries no metric".into()))?;
        let ls = self.lengths.as_ref().unwrap().iter().map(|l| l / vol).collect();
        self.with_lengths(ls)
    }

    /// `F_n` element represented by an edge path.
    pub fn path_image(&self, path: &[Letter]) -> Word {
        let mut acc: Vec<Letter> = Vec::new();
        for &l in path {
            let (e, fwd) = letter_edge(l);
            let m = self.marking[e].letters();
            acc = if fwd {
                mul_letters(&acc, m)
            } else {
                mul_letters(&acc, &inverse_letters(m))
            };
        }
        Word::from_reduced(self.rank, acc)
    }

    /// Reduced edge loop at vertex 0 representing `w`.
    pub fn loop_of(&self, w: &Word) -> Vec<Letter> {
        reduce_letters(w.letters().iter().flat_map(|&l| {
            let p = &self.inverse[gen_index_usize(l)];
            if l > 0 {
                p.clone()
            } else {
                inverse_letters(p)
            }
        }))
    }

    /// Cyclically reduced edge loop representing the conjugacy class of `w`.
    pub fn cyclic_loop_of(&self, w: &Word) -> Vec<Letter> {
        let p = self.loop_of(w);
        let (i, j) = crate::word::cyclic_core_range(&p);
        p[i..j].to_vec()
    }

    /// Length of an edge path (unit lengths if the graph carries no metric).
    pub fn path_length(&self, path: &[Letter]) -> Length {
        path.iter()
            .map(|&l| {
                let (e, _) = letter_edge(l);
                self.lengths.as_ref().map_or(Length::one(), |ls| ls[e])
            })
            .sum()
    }

    /// Length of the immersed loop in the conjugacy class of `w`.
    pub fn translation_length(&self, w: &Word) -> Length {
        self.path_length(&self.cyclic_loop_of(w))
    }

    /// `φ·G`: same graph, marking composed with `φ`.
    pub fn act(&self, phi: &Automorphism) -> Result<Self> {
        let marking = self
            .marking
            .iter()
            .map(|m| phi.apply(m))
            .collect::<Result<Vec<_>>>()?;
        MarkedGraph::new(self.num_vertices, self.edges.clone(), marking, self.lengths.clone())
    }

    /// Splits vertex `v`: the directions in `moved` go to a new vertex joined
    /// to `v` by a new edge (with trivial marking, and the length of the
    /// shortest edge when metric).
    pub fn blow_up(&self, v: usize, moved: &[(usize, bool)]) -> Result<Self> {
        let dirs = self.directions(v);
        if moved.len() < 2 || dirs.len() - moved.len() < 2 || moved.iter().any(|d| !dirs.contains(d)) {
            return Err(Error::InvalidMarkedGraph(
                "blow-up must leave at least two directions on each side".into(),
            ));
        }
        let nv = self.num_vertices;
        let mut edges = self.edges.clone();
        for &(e, out) in moved {
            if out {
                edges[e].0 = nv;
            } else {
                edges[e].1 = nv;
            }
        }
        edges.push((v, nv));
        let mut marking = self.marking.clone();
        marking.push(Word::identity(self.rank));
        let lengths = self.lengths.as_ref().map(|ls| {
            let mut ls = ls.clone();
            ls.push(*ls.iter().min().unwrap());
            ls
        });
        MarkedGraph::new(nv + 1, edges, marking, lengths)
    }

    /// Collapses the spanning tree, giving a rose marked by the loop words.
    pub fn collapse_tree(&self) -> Self {
        let mut marking = Vec::new();
        let mut lengths = Vec::new();
        for e in 0..self.edges.len() {
            if !self.tree[e] {
                marking.push(self.marking[e].clone());
                if let Some(ls) = &self.lengths {
                    lengths.push(ls[e]);
                }
            }
        }
        let n = marking.len();
        MarkedGraph::new(1, vec![(0, 0); n], marking, self.lengths.as_ref().map(|_| lengths))
            .expect("collapsing a tree preserves the marking")
    }

    /// Tree path from vertex 0 to `v`.
    pub fn tree_path(&self, v: usize) -> &[Letter] {
        &self.tree_paths[v]
    }

    pub fn to_record(&self) -> MarkedGraphRecord {
        MarkedGraphRecord {
            rank: self.rank,
            vertices: self.num_vertices,
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
            marking: self.marking.iter().map(|w| w.to_string()).collect(),
            tree: (0..self.edges.len()).filter(|&e| self.tree[e]).collect(),
            lengths: self
                .lengths
                .as_ref()
                .map(|ls| ls.iter().map(|l| l.to_string()).collect()),
        }
    }
}

/// `gens(A)` followed by standard generators forming a basis of `F_n`, if
/// such a completion exists; complements are tried in reverse lexicographic
/// order of generator indices.
fn complete_by_generators(a: &FactorClass) -> Option<Vec<Word>> {
    let n = a.ambient_rank();
    let k = a.rank();
    if k > n {
        return None;
    }
    let need = n - k;
    let mut combo: Vec<usize> = (0..need).map(|i| n - 1 - i).collect();
    loop {
        let mut images = a.gens().to_vec();
        images.extend(combo.iter().rev().map(|&i| Word::generator(n, i)));
        if Automorphism::from_images_unchecked(images.clone()).is_basis() {
            return Some(images);
        }
        // next combination of `need` indices, descending
        let mut i = need;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            let floor = need - 1 - i;
            if combo[i] > floor {
                combo[i] -= 1;
                for j in i + 1..need {
                    combo[j] = combo[j - 1] - 1;
                }
                break;
            }
        }
    }
}

fn gen_index_usize(l: Letter) -> usize {
    crate::word::gen_index(l)
}

impl fmt::Display for MarkedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G(v={}", self.num_vertices)?;
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            write!(f, "; {a}->{b}:{}", self.marking[i])?;
        }
        write!(f, ")")
    }
}

/// JSON form of a marked graph. `tree` is informational on input: the tree
/// is recomputed and the marking normalized along it.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct MarkedGraphRecord {
    pub rank: usize,
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
    pub marking: Vec<String>,
    #[serde(default)]
    pub tree: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lengths: Option<Vec<String>>,
}

impl MarkedGraphRecord {
    pub fn to_graph(&self) -> Result<MarkedGraph> {
        let marking = self
            .marking
            .iter()
            .map(|s| Word::parse(self.rank, s))
            .collect::<Result<Vec<_>>>()?;
        let lengths = match &self.lengths {
            None => None,
            Some(ls) => Some(
                ls.iter()
                    .map(|s| {
                        s.parse::<Length>()
                            .map_err(|_| Error::Parse(s.clone()))
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        MarkedGraph::new(
            self.vertices,
            self.edges.iter().map(|e| (e[0], e[1])).collect(),
            marking,
            lengths,
        )
    }
}

impl Serialize for MarkedGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_record().serialize(s)
    }
}

impl<'de> Deserialize<'de> for MarkedGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        MarkedGraphRecord::deserialize(d)?
            .to_graph()
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(rank: usize, s: &str) -> Word {
        Word::parse(rank, s).unwrap()
    }

    #[test]
    fn rose_identity_marking() {
        let g = MarkedGraph::rose(2);
        assert_eq!(g.marking(), &[w(2, "a"), w(2, "b")]);
        assert_eq!(g.loop_of(&w(2, "aB")), vec![1, -2]);
    }

    #[test]
    fn rejects_non_equivalences() {
        assert!(MarkedGraph::rose_with_marking(vec![w(2, "aa"), w(2, "b")]).is_err());
        assert!(MarkedGraph::new(2, vec![(0, 1), (0, 1)], vec![w(1, "a"), w(1, "")], None).is_ok());
        assert!(MarkedGraph::new(2, vec![(0, 1), (1, 1)], vec![w(1, "a"), w(1, "a")], None).is_err());
    }

    #[test]
    fn theta_graph_marking() {
        // theta graph with edges marked 1, a, b
        let g = MarkedGraph::new(2, vec![(0, 1), (0, 1), (0, 1)], vec![w(2, ""), w(2, "a"), w(2, "b")], None).unwrap();
        for s in ["a", "b", "abAB", "bbA"] {
            let x = w(2, s);
            assert_eq!(g.path_image(&g.loop_of(&x)), x);
        }
    }

    #[test]
    fn normalization_preserves_loops() {
        let g = MarkedGraph::new(2, vec![(0, 1), (1, 0), (1, 1)], vec![w(2, "ab"), w(2, "B"), w(2, "b")], None).unwrap();
        assert!(g.marking()[0].is_identity());
        for s in ["a", "b", "ab"] {
            let x = w(2, s);
            assert_eq!(g.path_image(&g.loop_of(&x)), x);
        }
    }

    #[test]
    fn adapted_roses() {
        let a = FactorClass::parse(2, "ab").unwrap();
        let g = MarkedGraph::adapted_rose(&a).unwrap();
        let first = FactorClass::new(vec![g.marking()[0].clone()]).unwrap();
        assert_eq!(first, a);
        let a = FactorClass::parse(3, "a,b").unwrap();
        let g = MarkedGraph::adapted_rose(&a).unwrap();
        assert_eq!(FactorClass::new(g.marking()[..2].to_vec()).unwrap(), a);
        assert!(MarkedGraph::adapted_rose(&FactorClass::parse(2, "aa").unwrap()).is_err());
    }

    #[test]
    fn blow_up_keeps_marking() {
        let g = MarkedGraph::rose(2);
        let h = g.blow_up(0, &[(0, true), (0, false)]).unwrap();
        assert_eq!((h.num_vertices(), h.num_edges()), (2, 3));
        for s in ["a", "b", "aB"] {
            let x = w(2, s);
            assert_eq!(h.path_image(&h.loop_of(&x)), x);
        }
        assert!(g.blow_up(0, &[(0, true)]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let g = MarkedGraph::new(2, vec![(0, 1), (0, 1), (0, 1)], vec![w(2, ""), w(2, "a"), w(2, "b")], None)
            .unwrap()
            .with_unit_lengths();
        let s = serde_json::to_string(&g).unwrap();
        let h: MarkedGraph = serde_json::from_str(&s).unwrap();
        assert_eq!(g, h);
    }
}
