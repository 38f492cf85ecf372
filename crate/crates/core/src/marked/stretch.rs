use std::collections::BTreeSet;

use super::{edge_letter, Length, MarkedGraph};
use crate::error::{Error, Result};
use crate::word::{inverse_letters, Letter};

/// An embedded circle: its edge path and the vertex at which each letter
/// starts.
#[derive(Clone, Debug)]
struct Circle {
    path: Vec<Letter>,
    starts: Vec<usize>,
}

impl Circle {
    fn vertices(&self) -> BTreeSet<usize> {
        self.starts.iter().copied().collect()
    }

    fn rotated_to(&self, v: usize) -> Vec<Letter> {
        let k = self.starts.iter().position(|&s| s == v).expect("vertex on circle");
        self.path[k..].iter().chain(&self.path[..k]).copied().collect()
    }
}

fn adjacency(g: &MarkedGraph) -> Vec<Vec<(usize, bool, usize)>> {
    let mut adj = vec![Vec::new(); g.num_vertices()];
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        adj[a].push((e, true, b));
        adj[b].push((e, false, a));
    }
    adj
}

fn circles(g: &MarkedGraph) -> Vec<Circle> {
    let adj = adjacency(g);
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut out = Vec::new();
    for s in 0..g.num_vertices() {
        let mut path = Vec::new();
        let mut starts = Vec::new();
        let mut on_path = vec![false; g.num_vertices()];
        on_path[s] = true;
        dfs_circles(&adj, s, s, &mut on_path, &mut path, &mut starts, &mut seen, &mut out);
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn dfs_circles(
    adj: &[Vec<(usize, bool, usize)>],
    s: usize,
    v: usize,
    on_path: &mut [bool],
    path: &mut Vec<Letter>,
    starts: &mut Vec<usize>,
    seen: &mut BTreeSet<Vec<usize>>,
    out: &mut Vec<Circle>,
) {
    for &(e, fwd, w) in &adj[v] {
        let l = edge_letter(e, fwd);
        if path.iter().any(|&p| p.abs() == l.abs()) {
            continue;
        }
        if w == s {
            let mut key: Vec<usize> = path.iter().map(|p| p.unsigned_abs() as usize).collect();
            key.push(l.unsigned_abs() as usize);
            key.sort_unstable();
            if seen.insert(key) {
                let mut p = path.clone();
                p.push(l);
                let mut st = starts.clone();
                st.push(v);
                out.push(Circle { path: p, starts: st });
            }
        } else if w > s && !on_path[w] {
            on_path[w] = true;
            path.push(l);
            starts.push(v);
            dfs_circles(adj, s, w, on_path, path, starts, seen, out);
            path.pop();
            starts.pop();
            on_path[w] = false;
        }
    }
}

/// Embedded arcs from `from` into `to` whose interior avoids `avoid`.
fn arcs(g: &MarkedGraph, from: &BTreeSet<usize>, to: &BTreeSet<usize>, avoid: &BTreeSet<usize>) -> Vec<(usize, Vec<Letter>, usize)> {
    let adj = adjacency(g);
    let mut out = Vec::new();
    for &s in from {
        let mut visited = vec![false; g.num_vertices()];
        visited[s] = true;
        let mut path = Vec::new();
        dfs_arcs(&adj, s, s, to, avoid, &mut visited, &mut path, &mut out);
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn dfs_arcs(
    adj: &[Vec<(usize, bool, usize)>],
    s: usize,
    v: usize,
    to: &BTreeSet<usize>,
    avoid: &BTreeSet<usize>,
    visited: &mut [bool],
    path: &mut Vec<Letter>,
    out: &mut Vec<(usize, Vec<Letter>, usize)>,
) {
    for &(e, fwd, w) in &adj[v] {
        if visited[w] {
            continue;
        }
        let l = edge_letter(e, fwd);
        if to.contains(&w) {
            let mut p = path.clone();
            p.push(l);
            out.push((s, p, w));
        } else if !avoid.contains(&w) {
            visited[w] = true;
            path.push(l);
            dfs_arcs(adj, s, w, to, avoid, visited, path, out);
            path.pop();
            visited[w] = false;
        }
    }
}

/// Candidate loops of `G` (closed edge paths): embedded circles,
/// figure-eights and barbells.
pub fn candidate_loops(g: &MarkedGraph) -> Vec<Vec<Letter>> {
    let cs = circles(g);
    let mut out: Vec<Vec<Letter>> = cs.iter().map(|c| c.path.clone()).collect();
    for i in 0..cs.len() {
        for j in i + 1..cs.len() {
            let (vi, vj) = (cs[i].vertices(), cs[j].vertices());
            let common: Vec<usize> = vi.intersection(&vj).copied().collect();
            match common.len() {
                1 => {
                    let x = common[0];
                    let mut p = cs[i].rotated_to(x);
                    p.extend(cs[j].rotated_to(x));
                    out.push(p);
                }
                0 => {
                    let avoid: BTreeSet<usize> = vi.union(&vj).copied().collect();
                    for (s, arc, t) in arcs(g, &vi, &vj, &avoid) {
                        let mut p = cs[i].rotated_to(s);
                        p.extend(&arc);
                        p.extend(cs[j].rotated_to(t));
                        p.extend(inverse_letters(&arc));
                        out.push(p);
                    }
                }
                _ => {}
            }
        }
    }
    out
}

/// Minimal Lipschitz constant of a change of marking `G → G'` (both
/// normalized to volume 1), as the maximum stretch over candidate loops.
pub fn lipschitz_stretch(g: &MarkedGraph, h: &MarkedGraph) -> Result<Length> {
    if g.rank() != h.rank() {
        return Err(Error::RankMismatch {
            expected: g.rank(),
            found: h.rank(),
        });
    }
    let g = g.normalized()?;
    let h = h.normalized()?;
    let mut best: Option<Length> = None;
    for c in candidate_loops(&g) {
        let lg = g.path_length(&c);
        let w = g.path_image(&c);
        let lh = h.translation_length(&w);
        let r = lh / lg;
        if best.is_none_or(|b| r > b) {
            best = Some(r);
        }
    }
    best.ok_or_else(|| Error::DegenerateMetric("no candidate loops".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Word;

    fn r(p: i64, q: i64) -> Length {
        Length::new(p, q)
    }

    #[test]
    fn rose_candidates() {
        let c = candidate_loops(&MarkedGraph::rose(2));
        // two petals and one figure-eight
        assert_eq!(c.len(), 3);
    }

    #[test]
    fn theta_and_barbell_candidates() {
        let w = |s| Word::parse(2, s).unwrap();
        let theta = MarkedGraph::new(2, vec![(0, 1), (0, 1), (0, 1)], vec![w(""), w("a"), w("b")], None).unwrap();
        assert_eq!(candidate_loops(&theta).len(), 3);
        let barbell = MarkedGraph::new(2, vec![(0, 0), (0, 1), (1, 1)], vec![w("a"), w(""), w("b")], None).unwrap();
        assert_eq!(candidate_loops(&barbell).len(), 3);
    }

    #[test]
    fn identical_graphs_stretch_one() {
        let g = MarkedGraph::rose(3).with_unit_lengths();
        assert_eq!(lipschitz_stretch(&g, &g).unwrap(), r(1, 1));
    }

    #[test]
    fn rose_stretch_example() {
        let g = MarkedGraph::rose(2).with_lengths(vec![r(1, 2), r(1, 2)]).unwrap();
        let h = MarkedGraph::rose(2).with_lengths(vec![r(1, 3), r(2, 3)]).unwrap();
        assert_eq!(lipschitz_stretch(&g, &h).unwrap(), r(4, 3));
        assert_eq!(lipschitz_stretch(&h, &g).unwrap(), r(3, 2));
    }

    #[test]
    fn requires_metric() {
        let g = MarkedGraph::rose(2);
        assert!(lipschitz_stretch(&g, &g).is_err());
    }
}
