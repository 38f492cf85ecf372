use std::collections::BTreeMap;

use serde::Serialize;

use super::{letter_edge, Immersion, Length, MarkedGraph};
use crate::error::{Error, Result};
use crate::factor::FactorClass;
use crate::stallings::{fold, Edge, LabeledGraph, Transcripts};
use crate::word::{inverse_letters, mul_letters, Letter};

/// An end of an edge at a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Direction {
    pub edge: usize,
    pub outgoing: bool,
}

/// Gates at each vertex: directions with the same image direction in the
/// target graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GateStructure {
    pub gates: Vec<Vec<Vec<Direction>>>,
}

impl GateStructure {
    pub fn num_gates(&self, v: usize) -> usize {
        self.gates[v].len()
    }

    /// Every vertex has at least two gates.
    pub fn is_train_track(&self) -> bool {
        self.gates.iter().all(|g| g.len() >= 2)
    }

    pub fn is_illegal(&self, v: usize, d1: Direction, d2: Direction) -> bool {
        self.gates[v].iter().any(|g| g.contains(&d1) && g.contains(&d2))
    }
}

/// One graph in a fold sequence, with the target edge under each edge
/// (edges are oriented to agree with their image).
#[derive(Clone, Debug)]
pub struct FoldStage {
    pub graph: MarkedGraph,
    pub labels: Vec<usize>,
    pub gates: GateStructure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FoldStep {
    pub vertex: usize,
    pub first: Direction,
    pub second: Direction,
}

/// A sequence of single folds from (a subdivision of) `G` to `G'`.
#[derive(Clone, Debug)]
pub struct FoldSequence {
    pub target: MarkedGraph,
    /// Set when the source had to be replaced by the rose obtained by
    /// collapsing its spanning tree.
    pub collapsed_source: bool,
    pub stages: Vec<FoldStage>,
    pub steps: Vec<FoldStep>,
    /// Edge of stage `t + 1` under each edge of stage `t`.
    pub edge_maps: Vec<Vec<usize>>,
    pub tracked: Option<Vec<Immersion>>,
}

#[derive(Clone, Debug)]
struct Raw {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
    labels: Vec<usize>,
}

impl Raw {
    /// Subdivision of `src` mapping each edge along the given target path,
    /// with source vertex `v` sent to `vmap[v]`.
    fn subdivide(src: &MarkedGraph, images: &[Vec<Letter>]) -> Self {
        let mut raw = Raw {
            num_vertices: src.num_vertices(),
            edges: Vec::new(),
            labels: Vec::new(),
        };
        for (e, &(a, b)) in src.edges().iter().enumerate() {
            let p = &images[e];
            let mut cur = a;
            for (k, &l) in p.iter().enumerate() {
                let next = if k + 1 == p.len() {
                    b
                } else {
                    raw.num_vertices += 1;
                    raw.num_vertices - 1
                };
                let (te, fwd) = letter_edge(l);
                raw.edges.push(if fwd { (cur, next) } else { (next, cur) });
                raw.labels.push(te);
                cur = next;
            }
        }
        raw
    }

    fn gates(&self) -> GateStructure {
        let mut per: Vec<BTreeMap<(usize, bool), Vec<Direction>>> = vec![BTreeMap::new(); self.num_vertices];
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            per[a].entry((self.labels[e], true)).or_default().push(Direction { edge: e, outgoing: true });
            per[b].entry((self.labels[e], false)).or_default().push(Direction { edge: e, outgoing: false });
        }
        GateStructure {
            gates: per.into_iter().map(|m| m.into_values().collect()).collect(),
        }
    }

    fn first_foldable(&self, gates: &GateStructure) -> Option<FoldStep> {
        for (v, gs) in gates.gates.iter().enumerate() {
            if let Some(g) = gs.iter().find(|g| g.len() >= 2) {
                return Some(FoldStep {
                    vertex: v,
                    first: g[0],
                    second: g[1],
                });
            }
        }
        None
    }

    /// Identifies the two edges of `step`, then prunes valence-one vertices.
    /// Returns the new graph and the edge map.
    fn fold(&self, step: FoldStep) -> Result<(Raw, Vec<usize>)> {
        let (e1, e2) = (step.first.edge, step.second.edge);
        let far = |e: usize| {
            if step.first.outgoing {
                self.edges[e].1
            } else {
                self.edges[e].0
            }
        };
        let (w1, w2) = (far(e1), far(e2));
        if w1 == w2 {
            return Err(Error::InvalidMarkedGraph("fold would kill a loop".into()));
        }
        let (keep, drop) = (w1.min(w2), w1.max(w2));
        let rv = |v: usize| if v == drop { keep } else { v };
        let mut edges: Vec<Option<(usize, usize)>> = self
            .edges
            .iter()
            .map(|&(a, b)| Some((rv(a), rv(b))))
            .collect();
        let mut target: Vec<usize> = (0..self.edges.len()).collect();
        edges[e2] = None;
        target[e2] = e1;
        let mut v_alive = vec![true; self.num_vertices];
        v_alive[drop] = false;
        loop {
            let mut deg = vec![0usize; self.num_vertices];
            for &(a, b) in edges.iter().flatten() {
                deg[a] += 1;
                deg[b] += 1;
            }
            let Some(v) = (0..self.num_vertices).find(|&v| v_alive[v] && deg[v] == 1) else {
                break;
            };
            v_alive[v] = false;
            let e = (0..edges.len())
                .find(|&e| matches!(edges[e], Some((a, b)) if a == v || b == v))
                .unwrap();
            edges[e] = None;
        }
        let mut vnew = vec![usize::MAX; self.num_vertices];
        let mut nv = 0;
        for v in 0..self.num_vertices {
            if v_alive[v] {
                vnew[v] = nv;
                nv += 1;
            }
        }
        let mut enew = vec![usize::MAX; self.edges.len()];
        let mut out = Raw {
            num_vertices: nv,
            edges: Vec::new(),
            labels: Vec::new(),
        };
        for (e, ed) in edges.iter().enumerate() {
            if let Some((a, b)) = *ed {
                enew[e] = out.edges.len();
                out.edges.push((vnew[a], vnew[b]));
                out.labels.push(self.labels[e]);
            }
        }
        // pruned edges have no image; they never carry tracked cores
        let map = target.iter().map(|&t| enew[t]).collect();
        Ok((out, map))
    }

    fn marked(&self, target: &MarkedGraph) -> Result<MarkedGraph> {
        let marking = self.labels.iter().map(|&l| target.marking()[l].clone()).collect();
        let lengths = target
            .lengths()
            .map(|ls| self.labels.iter().map(|&l| ls[l]).collect());
        MarkedGraph::new(self.num_vertices, self.edges.clone(), marking, lengths)
    }
}

/// Edge path images of the change-of-marking map `G → G'` sending vertex `v`
/// to `vmap[v]`; `None` if some edge would be collapsed.
fn edge_images(g: &MarkedGraph, target: &MarkedGraph, vmap: &[usize]) -> Option<Vec<Vec<Letter>>> {
    let mut out = Vec::new();
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        // loop at a's image representing the edge, closed up through trees
        let m = g.path_image(&mul_letters(
            &mul_letters(g.tree_path(a), &[super::edge_letter(e, true)]),
            &inverse_letters(g.tree_path(b)),
        ));
        let p = mul_letters(
            &mul_letters(&inverse_letters(target.tree_path(vmap[a])), &target.loop_of(&m)),
            target.tree_path(vmap[b]),
        );
        if p.is_empty() {
            return None;
        }
        out.push(p);
    }
    Some(out)
}

impl FoldSequence {
    /// Folds a subdivision of `G` mapped to `G'` by the change of marking,
    /// one lexicographically least illegal pair at a time. When `track` is
    /// given, the cores `A|G_t` are pushed through the folds.
    pub fn build(g: &MarkedGraph, target: &MarkedGraph, track: Option<&FactorClass>) -> Result<Self> {
        if g.rank() != target.rank() {
            return Err(Error::RankMismatch {
                expected: target.rank(),
                found: g.rank(),
            });
        }
        let vmap: Vec<usize> = (0..g.num_vertices())
            .map(|v| if v < target.num_vertices() { v } else { 0 })
            .collect();
        let (source, images, collapsed) = match edge_images(g, target, &vmap) {
            Some(im) => (g.clone(), im, false),
            None => {
                let rose = g.collapse_tree();
                let im = edge_images(&rose, target, &[0]).expect("rose petals have nontrivial images");
                (rose, im, true)
            }
        };
        let mut raw = Raw::subdivide(&source, &images);
        let mut stages = Vec::new();
        let mut steps = Vec::new();
        let mut edge_maps = Vec::new();
        loop {
            let gates = raw.gates();
            let step = raw.first_foldable(&gates);
            stages.push(FoldStage {
                graph: raw.marked(target)?,
                labels: raw.labels.clone(),
                gates,
            });
            let Some(step) = step else { break };
            let (next, map) = raw.fold(step)?;
            steps.push(step);
            edge_maps.push(map);
            raw = next;
        }
        let last = stages.last().unwrap();
        let is_target = last.graph.num_edges() == target.num_edges()
            && last.graph.num_vertices() == target.num_vertices()
            && {
                let mut ls = last.labels.clone();
                ls.sort_unstable();
                ls.dedup();
                ls.len() == target.num_edges()
            };
        if !is_target {
            return Err(Error::InvalidMarkedGraph("fold sequence did not reach the target".into()));
        }
        let mut seq = FoldSequence {
            target: target.clone(),
            collapsed_source: collapsed,
            stages,
            steps,
            edge_maps,
            tracked: None,
        };
        if let Some(a) = track {
            seq.tracked = Some(seq.push_forward(a)?);
        }
        Ok(seq)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `A|G_0` pushed through each fold and refolded.
    fn push_forward(&self, a: &FactorClass) -> Result<Vec<Immersion>> {
        let mut cur = Immersion::cover_core(a, &self.stages[0].graph)?;
        let mut out = vec![cur.clone()];
        for (t, map) in self.edge_maps.iter().enumerate() {
            let next_graph = &self.stages[t + 1].graph;
            let g = &cur.graph;
            let mut edges = Vec::new();
            for e in g.edges() {
                let label = map[e.label];
                if label == usize::MAX {
                    return Err(Error::InvalidMarkedGraph("tracked core meets a pruned edge".into()));
                }
                edges.push(Edge {
                    from: e.from,
                    to: e.to,
                    label,
                });
            }
            let folded = fold(LabeledGraph {
                rank: next_graph.num_edges(),
                num_vertices: g.num_vertices(),
                edges,
                basepoint: g.basepoint(),
                transcripts: g.transcripts().map(|t| Transcripts {
                    rank: t.rank,
                    words: t.words.clone(),
                }),
            })
            .trim()
            .core_based();
            let mut vertex_map = vec![0; folded.num_vertices()];
            for e in folded.edges() {
                vertex_map[e.from] = next_graph.edges()[e.label].0;
                vertex_map[e.to] = next_graph.edges()[e.label].1;
            }
            let lengths = next_graph
                .lengths()
                .map(|ls| folded.edges().iter().map(|e| ls[e.label]).collect());
            cur = Immersion {
                graph: folded,
                vertex_map,
                lengths,
                factor_rank: cur.factor_rank,
            };
            out.push(cur.clone());
        }
        Ok(out)
    }

    /// JSON trace of the sequence.
    pub fn trace(&self) -> FoldTrace {
        FoldTrace {
            collapsed_source: self.collapsed_source,
            stages: self
                .stages
                .iter()
                .map(|s| StageTrace {
                    graph: s.graph.to_record(),
                    labels: s.labels.clone(),
                    gates: s.gates.gates.iter().map(Vec::len).collect(),
                })
                .collect(),
            steps: self.steps.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StageTrace {
    pub graph: super::MarkedGraphRecord,
    pub labels: Vec<usize>,
    pub gates: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FoldTrace {
    pub collapsed_source: bool,
    pub stages: Vec<StageTrace>,
    pub steps: Vec<FoldStep>,
}

/// Maximal run of stages on which the tracked `A|G_t` has at least two
/// gates at every vertex (and, for metric targets, natural edges of length
/// `< 2` at volume 1). Half-open `[start, end)` over stage indices; the
/// degenerate range is `(k, k)` with `k` the number of stages.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MiddleInterval {
    pub start: usize,
    pub end: usize,
    pub stages: usize,
    pub combinatorial: Vec<bool>,
    /// `None` when the target carries no metric and the length clause is
    /// skipped.
    pub metric: Option<Vec<bool>>,
}

pub fn middle_interval(seq: &FoldSequence) -> Result<MiddleInterval> {
    let tracked = seq
        .tracked
        .as_ref()
        .ok_or_else(|| Error::Unsupported("fold sequence does not track a factor".into()))?;
    let k = seq.stages.len();
    let mut comb = Vec::with_capacity(k);
    let mut metric: Option<Vec<bool>> = seq.target.lengths().map(|_| Vec::new());
    for (t, h) in tracked.iter().enumerate() {
        let stage = &seq.stages[t];
        comb.push(two_gated(h, &stage.labels));
        if let Some(m) = metric.as_mut() {
            let vol: Length = stage.graph.volume().expect("metric stage");
            let ls = h.lengths.as_ref().expect("metric cover");
            m.push(natural_edge_lengths(h, ls).iter().all(|l| *l / vol < Length::from_integer(2)));
        }
    }
    let ok = |t: usize| comb[t] && metric.as_ref().is_none_or(|m| m[t]);
    let (mut best, mut run_start) = ((k, k), None);
    for t in 0..=k {
        if t < k && ok(t) {
            run_start.get_or_insert(t);
        } else if let Some(s) = run_start.take() {
            if t - s > best.1.saturating_sub(best.0) || best == (k, k) {
                best = (s, t);
            }
        }
    }
    Ok(MiddleInterval {
        start: best.0,
        end: best.1,
        stages: k,
        combinatorial: comb,
        metric,
    })
}

/// Every vertex of `A|G_t` sees at least two gates of `G_t`.
fn two_gated(h: &Immersion, stage_labels: &[usize]) -> bool {
    let mut keys: Vec<Vec<(usize, bool)>> = vec![Vec::new(); h.num_vertices()];
    for e in h.graph.edges() {
        let target = stage_labels[e.label];
        keys[e.from].push((target, true));
        keys[e.to].push((target, false));
    }
    keys.iter_mut().all(|k| {
        k.sort_unstable();
        k.dedup();
        k.len() >= 2
    })
}

/// Lengths of the natural edges (maximal chains through valence-two
/// vertices).
fn natural_edge_lengths(h: &Immersion, lengths: &[Length]) -> Vec<Length> {
    let g = &h.graph;
    let nv = g.num_vertices();
    let mut val = vec![0usize; nv];
    for e in g.edges() {
        val[e.from] += 1;
        val[e.to] += 1;
    }
    let mut used = vec![false; g.num_edges()];
    let mut out = Vec::new();
    let other = |e: usize, v: usize| if g.edges()[e].from == v { g.edges()[e].to } else { g.edges()[e].from };
    let at = |v: usize, skip: usize| (0..g.num_edges()).find(|&f| f != skip && (g.edges()[f].from == v || g.edges()[f].to == v));
    for start in 0..g.num_edges() {
        if used[start] {
            continue;
        }
        // walk both ways until a branch vertex
        used[start] = true;
        let mut total = lengths[start];
        for end_v in [g.edges()[start].from, g.edges()[start].to] {
            let (mut v, mut e) = (end_v, start);
            while val[v] == 2 {
                let Some(f) = at(v, e) else { break };
                if used[f] {
                    break;
                }
                used[f] = true;
                total += lengths[f];
                v = other(f, v);
                e = f;
            }
        }
        out.push(total);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Word;

    fn w(rank: usize, s: &str) -> Word {
        Word::parse(rank, s).unwrap()
    }

    #[test]
    fn same_graph_gives_empty_sequence() {
        let g = MarkedGraph::rose(2);
        assert!(FoldSequence::build(&g, &g, None).unwrap().is_empty());
        let theta = MarkedGraph::new(2, vec![(0, 1), (0, 1), (0, 1)], vec![w(2, ""), w(2, "a"), w(2, "b")], None).unwrap();
        let s = FoldSequence::build(&theta, &theta, None).unwrap();
        assert!(s.is_empty() && !s.collapsed_source);
    }

    #[test]
    fn single_fold_example() {
        let g = MarkedGraph::rose(2);
        let h = MarkedGraph::rose_with_marking(vec![w(2, "ab"), w(2, "b")]).unwrap();
        let s = FoldSequence::build(&g, &h, None).unwrap();
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn tracked_cores_match_covers() {
        let g = MarkedGraph::rose(3);
        let h = MarkedGraph::rose_with_marking(vec![w(3, "abc"), w(3, "bC"), w(3, "c")]).unwrap();
        let a = FactorClass::parse(3, "a,bab").unwrap();
        let s = FoldSequence::build(&g, &h, Some(&a)).unwrap();
        for (t, tracked) in s.tracked.as_ref().unwrap().iter().enumerate() {
            let direct = Immersion::cover_core(&a, &s.stages[t].graph).unwrap();
            assert_eq!(tracked.graph.canonical_code(), direct.graph.canonical_code(), "stage {t}");
        }
    }

    #[test]
    fn embedded_factor_full_interval() {
        let g = MarkedGraph::rose(3);
        let a = FactorClass::parse(3, "a,b").unwrap();
        let s = FoldSequence::build(&g, &g, Some(&a)).unwrap();
        let m = middle_interval(&s).unwrap();
        assert_eq!((m.start, m.end), (0, 1));
        assert!(m.metric.is_none());
    }
}
