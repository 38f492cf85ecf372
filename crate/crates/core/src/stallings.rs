//! Folded labeled graphs (Stallings graphs) for finitely generated subgroups.
//!
//! Labels are 0-based generator indices of an ambient free group of rank
//! `rank`. An edge `u -l-> v` is read as the letter `l+1` when traversed
//! forwards and `-(l+1)` backwards.
//!
//! Graphs built from a generating list carry optional *transcripts*: a word
//! per edge over the alphabet of the input generators, chosen so that the
//! product of transcripts along any closed path at the basepoint expresses
//! the path's label as a word in the generators. Transcripts survive folding
//! through a gauge change at the merged vertex.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::word::{gen_index, inverse_letters, mul_letters, Letter, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub label: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transcripts {
    /// Rank of the free group the transcripts live in.
    pub rank: usize,
    pub words: Vec<Vec<Letter>>,
}

#[derive(Clone, Debug)]
pub struct StallingsGraph {
    rank: usize,
    num_vertices: usize,
    edges: Vec<Edge>,
    basepoint: Option<usize>,
    transcripts: Option<Transcripts>,
    // [vertex][label] -> edge id
    out: Vec<Vec<Option<usize>>>,
    inc: Vec<Vec<Option<usize>>>,
}

/// Unfolded input to [`fold`].
#[derive(Clone, Debug, Default)]
pub struct LabeledGraph {
    pub rank: usize,
    pub num_vertices: usize,
    pub edges: Vec<Edge>,
    pub basepoint: Option<usize>,
    pub transcripts: Option<Transcripts>,
}

impl LabeledGraph {
    /// Wedge of the reduced paths spelling `gens`, based at vertex 0. When
    /// `track` is set, the first edge of the `i`-th petal carries the
    /// transcript `y_i`.
    pub fn wedge(rank: usize, gens: &[Vec<Letter>], track: bool) -> Self {
        let mut g = LabeledGraph {
            rank,
            num_vertices: 1,
            edges: Vec::new(),
            basepoint: Some(0),
            transcripts: None,
        };
        let mut tags: Vec<Vec<Letter>> = Vec::new();
        for (i, w) in gens.iter().enumerate() {
            if w.is_empty() {
                continue;
            }
            let mut cur = 0;
            for (k, &l) in w.iter().enumerate() {
                let next = if k + 1 == w.len() {
                    0
                } else {
                    g.num_vertices += 1;
                    g.num_vertices - 1
                };
                let (from, to) = if l > 0 { (cur, next) } else { (next, cur) };
                g.edges.push(Edge {
                    from,
                    to,
                    label: gen_index(l),
                });
                let tag = if k == 0 {
                    if l > 0 {
                        vec![i as Letter + 1]
                    } else {
                        vec![-(i as Letter + 1)]
                    }
                } else {
                    Vec::new()
                };
                tags.push(tag);
                cur = next;
            }
        }
        if track {
            g.transcripts = Some(Transcripts {
                rank: gens.len(),
                words: tags,
            });
        }
        g
    }
}

/// Folds a connected labeled graph. Terminates after at most `|E|`
/// identifications; the represented subgroup (at the basepoint, if any) is
/// unchanged.
pub fn fold(input: LabeledGraph) -> StallingsGraph {
    let LabeledGraph {
        rank,
        num_vertices,
        edges,
        basepoint,
        transcripts,
    } = input;
    let track = transcripts.is_some();
    let tag_rank = transcripts.as_ref().map_or(0, |t| t.rank);
    let mut tags: Vec<Vec<Letter>> = match transcripts {
        Some(t) => t.words,
        None => vec![Vec::new(); edges.len()],
    };
    let mut edges = edges;
    let mut alive = vec![true; edges.len()];
    let mut valive = vec![true; num_vertices];
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); num_vertices];
    for (i, e) in edges.iter().enumerate() {
        adj[e.from].push(i);
        if e.to != e.from {
            adj[e.to].push(i);
        }
    }
    let mut queue: VecDeque<usize> = (0..num_vertices).collect();
    let mut queued = vec![true; num_vertices];
    while let Some(v) = queue.pop_front() {
        queued[v] = false;
        if !valive[v] {
            continue;
        }
        // key: (label, outgoing?) -> edge
        let mut seen: BTreeMap<(usize, bool), usize> = BTreeMap::new();
        let mut conflict = None;
        adj[v].retain(|&e| alive[e]);
        adj[v].sort_unstable();
        adj[v].dedup();
        'scan: for &e in &adj[v] {
            let ed = edges[e];
            for (is_out, here) in [(true, ed.from), (false, ed.to)] {
                if here != v {
                    continue;
                }
                if let Some(&other) = seen.get(&(ed.label, is_out)) {
                    conflict = Some((other, e, is_out));
                    break 'scan;
                }
                seen.insert((ed.label, is_out), e);
            }
        }
        let Some((mut e1, mut e2, is_out)) = conflict else {
            continue;
        };
        let far = |e: usize, edges: &Vec<Edge>| if is_out { edges[e].to } else { edges[e].from };
        let (mut v1, mut v2) = (far(e1, &edges), far(e2, &edges));
        if v1 != v2 && Some(v2) == basepoint {
            std::mem::swap(&mut e1, &mut e2);
            std::mem::swap(&mut v1, &mut v2);
        }
        if v1 != v2 {
            // gauge at the dropped vertex v2
            let x = if track {
                let (t1, t2) = (&tags[e1], &tags[e2]);
                if is_out {
                    mul_letters(&inverse_letters(t2), t1)
                } else {
                    mul_letters(t2, &inverse_letters(t1))
                }
            } else {
                Vec::new()
            };
            let xinv = inverse_letters(&x);
            let moved: Vec<usize> = adj[v2].iter().copied().filter(|&e| alive[e]).collect();
            for &e in &moved {
                if track {
                    let mut t = tags[e].clone();
                    if edges[e].from == v2 {
                        t = mul_letters(&xinv, &t);
                    }
                    if edges[e].to == v2 {
                        t = mul_letters(&t, &x);
                    }
                    tags[e] = t;
                }
                if edges[e].from == v2 {
                    edges[e].from = v1;
                }
                if edges[e].to == v2 {
                    edges[e].to = v1;
                }
            }
            valive[v2] = false;
            adj[v2].clear();
            adj[v1].extend(moved);
        }
        alive[e2] = false;
        for u in [v, v1] {
            if valive[u] && !queued[u] {
                queued[u] = true;
                queue.push_back(u);
            }
        }
        // other endpoints of the moved edges may now see new conflicts only
        // at v1, which is queued.
    }
    // compact
    let mut remap = vec![usize::MAX; num_vertices];
    let mut nv = 0;
    for v in 0..num_vertices {
        if valive[v] {
            remap[v] = nv;
            nv += 1;
        }
    }
    let mut new_edges = Vec::new();
    let mut new_tags = Vec::new();
    for (i, e) in edges.iter().enumerate() {
        if alive[i] {
            new_edges.push(Edge {
                from: remap[e.from],
                to: remap[e.to],
                label: e.label,
            });
            new_tags.push(std::mem::take(&mut tags[i]));
        }
    }
    StallingsGraph::from_parts(
        rank,
        nv,
        new_edges,
        basepoint.map(|b| remap[b]),
        track.then_some(Transcripts {
            rank: tag_rank,
            words: new_tags,
        }),
    )
}

/// Folded based core graph of `⟨gens⟩`, tracking transcripts in the input
/// generators.
pub fn subgroup_graph(gens: &[Word]) -> Result<StallingsGraph> {
    let rank = check_common_rank(gens)?;
    let raw: Vec<Vec<Letter>> = gens.iter().map(|w| w.letters().to_vec()).collect();
    let g = fold(LabeledGraph::wedge(rank, &raw, true)).trim();
    if g.edges.is_empty() {
        return Err(Error::TrivialSubgroup);
    }
    Ok(g)
}

/// Folded based graph of paths over an arbitrary label alphabet of size
/// `rank`; used for covers of marked graphs, where labels are edges.
pub fn path_subgroup_graph(rank: usize, paths: &[Vec<Letter>]) -> Result<StallingsGraph> {
    let g = fold(LabeledGraph::wedge(rank, paths, true)).trim();
    if g.edges.is_empty() {
        return Err(Error::TrivialSubgroup);
    }
    Ok(g)
}

fn check_common_rank(gens: &[Word]) -> Result<usize> {
    let Some(first) = gens.first() else {
        return Err(Error::TrivialSubgroup);
    };
    let rank = first.rank();
    for g in gens {
        if g.rank() != rank {
            return Err(Error::RankMismatch {
                expected: rank,
                found: g.rank(),
            });
        }
    }
    Ok(rank)
}

impl StallingsGraph {
    pub(crate) fn from_parts(
        rank: usize,
        num_vertices: usize,
        edges: Vec<Edge>,
        basepoint: Option<usize>,
        transcripts: Option<Transcripts>,
    ) -> Self {
        let mut out = vec![vec![None; rank]; num_vertices];
        let mut inc = vec![vec![None; rank]; num_vertices];
        for (i, e) in edges.iter().enumerate() {
            debug_assert!(out[e.from][e.label].is_none(), "graph not folded");
            debug_assert!(inc[e.to][e.label].is_none(), "graph not folded");
            out[e.from][e.label] = Some(i);
            inc[e.to][e.label] = Some(i);
        }
        StallingsGraph {
            rank,
            num_vertices,
            edges,
            basepoint,
            transcripts,
            out,
            inc,
        }
    }

    /// Builds a graph from explicit data, folding it.
    pub fn from_edges(
        rank: usize,
        num_vertices: usize,
        edges: Vec<Edge>,
        basepoint: Option<usize>,
    ) -> Result<Self> {
        for e in &edges {
            if e.label >= rank || e.from >= num_vertices || e.to >= num_vertices {
                return Err(Error::IndexOutOfRange {
                    index: e.label as i64 + 1,
                    rank,
                });
            }
        }
        Ok(fold(LabeledGraph {
            rank,
            num_vertices,
            edges,
            basepoint,
            transcripts: None,
        }))
    }

    pub fn rank_ambient(&self) -> usize {
        self.rank
    }
    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }
    pub fn basepoint(&self) -> Option<usize> {
        self.basepoint
    }
    pub fn transcripts(&self) -> Option<&Transcripts> {
        self.transcripts.as_ref()
    }

    /// Rank of the fundamental group, `E − V + 1` (graph is connected).
    pub fn rank(&self) -> usize {
        (self.edges.len() + 1).saturating_sub(self.num_vertices)
    }

    pub fn valence(&self, v: usize) -> usize {
        self.out[v].iter().flatten().count() + self.inc[v].iter().flatten().count()
    }

    pub fn is_folded(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.edges
            .iter()
            .all(|e| seen.insert((e.from, e.label, true)) && seen.insert((e.to, e.label, false)))
    }

    pub fn is_core(&self) -> bool {
        (0..self.num_vertices).all(|v| Some(v) == self.basepoint || self.valence(v) >= 2)
    }

    pub fn is_connected(&self) -> bool {
        if self.num_vertices == 0 {
            return true;
        }
        let mut parent: Vec<usize> = (0..self.num_vertices).collect();
        let mut comps = self.num_vertices;
        for e in &self.edges {
            if union(&mut parent, e.from, e.to) {
                comps -= 1;
            }
        }
        comps == 1
    }

    /// Edge leaving `v` reading letter `l`, with its far endpoint.
    pub fn step(&self, v: usize, l: Letter) -> Option<(usize, usize)> {
        let label = gen_index(l);
        if label >= self.rank {
            return None;
        }
        if l > 0 {
            self.out[v][label].map(|e| (e, self.edges[e].to))
        } else {
            self.inc[v][label].map(|e| (e, self.edges[e].from))
        }
    }

    /// Follows `letters` from `v`; `None` if the path leaves the graph.
    pub fn trace_from(&self, v: usize, letters: &[Letter]) -> Option<usize> {
        letters
            .iter()
            .try_fold(v, |cur, &l| self.step(cur, l).map(|(_, w)| w))
    }

    /// Removes hanging trees away from the basepoint.
    pub fn trim(self) -> Self {
        self.prune(false)
    }

    /// Basepoint-free core of the graph (conjugacy class of the subgroup).
    pub fn core(&self) -> Self {
        let mut g = self.clone().prune(true);
        g.basepoint = None;
        g.transcripts = None;
        g
    }

    /// Core with the basepoint moved to the vertex where the basepoint hair
    /// attached. Transcripts are kept; loops at the new basepoint then
    /// express a conjugate of the subgroup, by a fixed conjugator.
    pub fn core_based(&self) -> Self {
        self.split_hair().1
    }

    /// Splits off the hair at the basepoint: returns the label word of the
    /// hair (basepoint to attachment vertex) and the core based at the
    /// attachment vertex.
    pub fn split_hair(&self) -> (Vec<Letter>, Self) {
        let Some(bp) = self.basepoint else {
            return (Vec::new(), self.clone());
        };
        let mut dead = vec![false; self.edges.len()];
        let mut vdead = vec![false; self.num_vertices];
        let mut word = Vec::new();
        let mut cur = bp;
        loop {
            let live: Vec<usize> = self
                .incident(cur)
                .into_iter()
                .filter(|&e| !dead[e])
                .collect();
            let loops = live.iter().filter(|&&e| self.edges[e].from == self.edges[e].to).count();
            if live.len() != 1 || loops > 0 {
                break;
            }
            let e = live[0];
            let ed = self.edges[e];
            dead[e] = true;
            vdead[cur] = true;
            if ed.from == cur {
                word.push(ed.label as Letter + 1);
                cur = ed.to;
            } else {
                word.push(-(ed.label as Letter + 1));
                cur = ed.from;
            }
        }
        let g = self.restrict(|i| !dead[i], |v| !vdead[v], Some(cur));
        (word, g)
    }

    fn incident(&self, v: usize) -> Vec<usize> {
        self.out[v]
            .iter()
            .chain(self.inc[v].iter())
            .flatten()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    fn restrict(
        &self,
        keep_edge: impl Fn(usize) -> bool,
        keep_vertex: impl Fn(usize) -> bool,
        basepoint: Option<usize>,
    ) -> Self {
        let mut remap = vec![usize::MAX; self.num_vertices];
        let mut nv = 0;
        for (v, slot) in remap.iter_mut().enumerate() {
            if keep_vertex(v) {
                *slot = nv;
                nv += 1;
            }
        }
        let mut edges = Vec::new();
        let mut tags = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if keep_edge(i) {
                edges.push(Edge {
                    from: remap[e.from],
                    to: remap[e.to],
                    label: e.label,
                });
                if let Some(t) = &self.transcripts {
                    tags.push(t.words[i].clone());
                }
            }
        }
        let transcripts = self.transcripts.as_ref().map(|t| Transcripts {
            rank: t.rank,
            words: tags,
        });
        StallingsGraph::from_parts(
            self.rank,
            nv,
            edges,
            basepoint.map(|b| remap[b]),
            transcripts,
        )
    }

    fn prune(self, including_basepoint: bool) -> Self {
        let mut deg = vec![0usize; self.num_vertices];
        for e in &self.edges {
            deg[e.from] += 1;
            deg[e.to] += 1;
        }
        let mut edge_alive = vec![true; self.edges.len()];
        let mut v_alive = vec![true; self.num_vertices];
        let protected = |v: usize| !including_basepoint && Some(v) == self.basepoint;
        let mut stack: Vec<usize> = (0..self.num_vertices)
            .filter(|&v| deg[v] <= 1 && !protected(v))
            .collect();
        // incident lists
        let mut inc: Vec<Vec<usize>> = vec![Vec::new(); self.num_vertices];
        for (i, e) in self.edges.iter().enumerate() {
            inc[e.from].push(i);
            if e.to != e.from {
                inc[e.to].push(i);
            }
        }
        let live_vertices = |v_alive: &Vec<bool>| v_alive.iter().filter(|&&a| a).count();
        while let Some(v) = stack.pop() {
            if !v_alive[v] || deg[v] > 1 || protected(v) {
                continue;
            }
            // never delete the last vertex
            if live_vertices(&v_alive) == 1 {
                break;
            }
            v_alive[v] = false;
            for &e in &inc[v] {
                if edge_alive[e] {
                    edge_alive[e] = false;
                    let ed = self.edges[e];
                    let w = if ed.from == v { ed.to } else { ed.from };
                    deg[w] -= 1;
                    deg[v] -= 1;
                    if deg[w] <= 1 && !protected(w) {
                        stack.push(w);
                    }
                }
            }
        }
        let bp = self.basepoint.filter(|&b| v_alive[b]);
        self.restrict(|i| edge_alive[i], |v| v_alive[v], bp)
    }

    /// True iff `w` labels a closed path at the basepoint.
    pub fn contains_element(&self, w: &Word) -> bool {
        let bp = self.basepoint.expect("contains_element needs a based graph");
        self.trace_from(bp, w.letters()) == Some(bp)
    }

    /// BFS spanning tree from `root`: for each vertex, the reduced label
    /// word and transcript of the tree path from `root`.
    fn spanning_tree(&self, root: usize) -> (Vec<bool>, Vec<Vec<Letter>>, Vec<Vec<Letter>>) {
        let mut in_tree = vec![false; self.edges.len()];
        let mut seen = vec![false; self.num_vertices];
        let mut word: Vec<Vec<Letter>> = vec![Vec::new(); self.num_vertices];
        let mut tag: Vec<Vec<Letter>> = vec![Vec::new(); self.num_vertices];
        let mut q = VecDeque::from([root]);
        seen[root] = true;
        while let Some(v) = q.pop_front() {
            for l in self.letter_order() {
                if let Some((e, w)) = self.step(v, l) {
                    if !seen[w] {
                        seen[w] = true;
                        in_tree[e] = true;
                        word[w] = mul_letters(&word[v], &[l]);
                        tag[w] = mul_letters(&tag[v], &self.edge_tag(e, l > 0));
                        q.push_back(w);
                    }
                }
            }
        }
        (in_tree, word, tag)
    }

    fn letter_order(&self) -> impl Iterator<Item = Letter> {
        let r = self.rank as Letter;
        (1..=r).flat_map(|i| [i, -i])
    }

    fn edge_tag(&self, e: usize, forward: bool) -> Vec<Letter> {
        match &self.transcripts {
            Some(t) if forward => t.words[e].clone(),
            Some(t) => inverse_letters(&t.words[e]),
            None => Vec::new(),
        }
    }

    /// Free basis read off a BFS spanning tree, one word per non-tree edge,
    /// in edge order.
    pub fn basis(&self) -> Vec<Word> {
        let root = self.basepoint.unwrap_or(0);
        let (in_tree, word, _) = self.spanning_tree(root);
        self.edges
            .iter()
            .enumerate()
            .filter(|(i, _)| !in_tree[*i])
            .map(|(_, e)| {
                let l = e.label as Letter + 1;
                let w = mul_letters(&mul_letters(&word[e.from], &[l]), &inverse_letters(&word[e.to]));
                Word::from_reduced(self.rank, w)
            })
            .collect()
    }

    /// Rewrites a subgroup element as a word over [`Self::basis`].
    pub fn rewrite(&self, w: &Word) -> Result<Word> {
        let root = self.basepoint.unwrap_or(0);
        let (in_tree, _, _) = self.spanning_tree(root);
        let mut index = vec![usize::MAX; self.edges.len()];
        let mut k = 0;
        for (i, &t) in in_tree.iter().enumerate() {
            if !t {
                index[i] = k;
                k += 1;
            }
        }
        let mut cur = root;
        let mut out = Vec::new();
        for &l in w.letters() {
            let (e, next) = self.step(cur, l).ok_or(Error::NotInSubgroup)?;
            if !in_tree[e] {
                let y = index[e] as Letter + 1;
                out.push(if l > 0 { y } else { -y });
            }
            cur = next;
        }
        if cur != root {
            return Err(Error::NotInSubgroup);
        }
        Word::reduce(k.max(1), &out)
    }

    /// Expresses a closed path label at the basepoint through the
    /// transcripts, i.e. as a word in the generators the graph was built
    /// from.
    pub fn express(&self, letters: &[Letter]) -> Result<Word> {
        let t = self
            .transcripts
            .as_ref()
            .ok_or_else(|| Error::Unsupported("graph carries no transcripts".into()))?;
        let bp = self.basepoint.ok_or(Error::NotInSubgroup)?;
        let mut cur = bp;
        let mut acc: Vec<Letter> = Vec::new();
        for &l in letters {
            let (e, next) = self.step(cur, l).ok_or(Error::NotInSubgroup)?;
            acc = mul_letters(&acc, &self.edge_tag(e, l > 0));
            cur = next;
        }
        if cur != bp {
            return Err(Error::NotInSubgroup);
        }
        Ok(Word::from_reduced(t.rank, acc))
    }

    /// Transcript product along a path given by edge traversals.
    pub fn transcript_of_path(&self, path: &[(usize, bool)]) -> Vec<Letter> {
        let mut acc = Vec::new();
        for &(e, fwd) in path {
            acc = mul_letters(&acc, &self.edge_tag(e, fwd));
        }
        acc
    }

    pub fn transcript(&self, e: usize) -> Option<&[Letter]> {
        self.transcripts.as_ref().map(|t| t.words[e].as_slice())
    }

    /// Labels of all edges, as a set.
    pub fn labels(&self) -> BTreeSet<usize> {
        self.edges.iter().map(|e| e.label).collect()
    }

    /// BFS numbering from `start`, visiting out-edges by label then in-edges
    /// by label; returns the sorted relabeled edge list.
    fn bfs_code(&self, start: usize) -> Vec<(usize, usize, usize)> {
        let mut num = vec![usize::MAX; self.num_vertices];
        num[start] = 0;
        let mut next = 1;
        let mut q = VecDeque::from([start]);
        while let Some(v) = q.pop_front() {
            for dir in [true, false] {
                for label in 0..self.rank {
                    let slot = if dir { self.out[v][label] } else { self.inc[v][label] };
                    if let Some(e) = slot {
                        let w = if dir { self.edges[e].to } else { self.edges[e].from };
                        if num[w] == usize::MAX {
                            num[w] = next;
                            next += 1;
                            q.push_back(w);
                        }
                    }
                }
            }
        }
        let mut code: Vec<(usize, usize, usize)> = self
            .edges
            .iter()
            .map(|e| (num[e.from], e.label, num[e.to]))
            .collect();
        code.sort_unstable();
        code
    }

    fn render_code(&self, code: &[(usize, usize, usize)]) -> String {
        let body: Vec<String> = code
            .iter()
            .map(|(f, l, t)| format!("{f}{}{t}", crate::word::letter_char(*l as Letter + 1)))
            .collect();
        format!("r{}v{}:{}", self.rank, self.num_vertices, body.join(","))
    }

    /// Relabeling-invariant code: the least BFS code over all start vertices.
    pub fn canonical_code(&self) -> String {
        let best = (0..self.num_vertices)
            .map(|s| self.bfs_code(s))
            .min()
            .unwrap_or_default();
        self.render_code(&best)
    }

    /// Code of the based graph (BFS from the basepoint only).
    pub fn based_code(&self) -> String {
        let bp = self.basepoint.unwrap_or(0);
        format!("b{}", self.render_code(&self.bfs_code(bp)))
    }

    /// Label-preserving morphism `self → target` sending `a0 ↦ b0`, if one
    /// exists (unique on folded targets).
    pub fn morphism_from(&self, target: &StallingsGraph, a0: usize, b0: usize) -> Option<Vec<usize>> {
        if self.rank != target.rank {
            return None;
        }
        let mut map = vec![usize::MAX; self.num_vertices];
        map[a0] = b0;
        let mut q = VecDeque::from([a0]);
        while let Some(v) = q.pop_front() {
            for l in self.letter_order() {
                if let Some((_, w)) = self.step(v, l) {
                    let (_, tw) = target.step(map[v], l)?;
                    if map[w] == usize::MAX {
                        map[w] = tw;
                        q.push_back(w);
                    } else if map[w] != tw {
                        return None;
                    }
                }
            }
        }
        Some(map)
    }

    /// Some morphism `self → target` with any choice of image for vertex 0.
    pub fn find_morphism(&self, target: &StallingsGraph) -> Option<Vec<usize>> {
        if self.num_vertices == 0 {
            return Some(Vec::new());
        }
        (0..target.num_vertices).find_map(|b| self.morphism_from(target, 0, b))
    }

    /// An isomorphism of unbased graphs, if any.
    pub fn isomorphism(&self, target: &StallingsGraph) -> Option<Vec<usize>> {
        if self.num_vertices != target.num_vertices || self.edges.len() != target.edges.len() {
            return None;
        }
        (0..target.num_vertices).find_map(|b| {
            let m = self.morphism_from(target, 0, b)?;
            let distinct: BTreeSet<_> = m.iter().collect();
            (distinct.len() == m.len()).then_some(m)
        })
    }

    /// Label word of some path from `a` to `b` (BFS).
    pub fn path_word(&self, a: usize, b: usize) -> Option<Vec<Letter>> {
        let mut prev: Vec<Option<(usize, Letter)>> = vec![None; self.num_vertices];
        let mut seen = vec![false; self.num_vertices];
        seen[a] = true;
        let mut q = VecDeque::from([a]);
        while let Some(v) = q.pop_front() {
            if v == b {
                break;
            }
            for l in self.letter_order() {
                if let Some((_, w)) = self.step(v, l) {
                    if !seen[w] {
                        seen[w] = true;
                        prev[w] = Some((v, l));
                        q.push_back(w);
                    }
                }
            }
        }
        if !seen[b] {
            return None;
        }
        let mut out = Vec::new();
        let mut cur = b;
        while let Some((p, l)) = prev[cur] {
            out.push(l);
            cur = p;
        }
        out.reverse();
        Some(out)
    }
}

pub(crate) fn union(parent: &mut [usize], a: usize, b: usize) -> bool {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra == rb {
        return false;
    }
    parent[ra] = rb;
    true
}

pub(crate) fn find(parent: &mut [usize], mut a: usize) -> usize {
    while parent[a] != a {
        parent[a] = parent[parent[a]];
        a = parent[a];
    }
    a
}

/// True iff a label-preserving morphism `core(A) → core(B)` exists, i.e. a
/// conjugate of `A` lies in `B`.
pub fn contained_up_to_conjugacy(a_core: &StallingsGraph, b_core: &StallingsGraph) -> bool {
    a_core.find_morphism(b_core).is_some()
}

/// Conjugator `c` with `c · H₁ · c⁻¹ = H₀` for based graphs with isomorphic
/// cores.
pub fn conjugator_between(h1: &StallingsGraph, h0: &StallingsGraph) -> Option<Word> {
    let (w1, c1) = h1.split_hair();
    let (w0, c0) = h0.split_hair();
    let iso = c1.isomorphism(&c0)?;
    let p = c0.path_word(c0.basepoint?, iso[c1.basepoint?])?;
    let c = mul_letters(&mul_letters(&w0, &p), &inverse_letters(&w1));
    Some(Word::from_reduced(h1.rank, c))
}
