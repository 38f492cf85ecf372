//! Seeded random automorphisms, factors and marked graphs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automorphism::{whitehead_cached, Automorphism};
use crate::factor::FactorClass;
use crate::marked::MarkedGraph;
use crate::word::Word;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Product of `len` uniformly chosen Whitehead automorphisms.
pub fn random_automorphism(rank: usize, len: usize, rng: &mut SampleRng) -> Automorphism {
    let ws = whitehead_cached(rank);
    let mut phi = Automorphism::identity(rank);
    for _ in 0..len {
        phi = ws.choose(rng).expect("nonempty").compose(&phi);
    }
    phi
}

/// Product of `len` Whitehead automorphisms, each mapping the standard
/// sub-rose on the first `k` generators into itself.
pub fn random_stabilizing_automorphism(rank: usize, k: usize, len: usize, rng: &mut SampleRng) -> Automorphism {
    let ws: Vec<&Automorphism> = whitehead_cached(rank)
        .iter()
        .filter(|w| {
            w.images()[..k]
                .iter()
                .all(|img| img.letters().iter().all(|&l| (l.unsigned_abs() as usize) <= k))
        })
        .collect();
    let mut phi = Automorphism::identity(rank);
    for _ in 0..len {
        phi = ws.choose(rng).expect("nonempty").compose(&phi);
    }
    phi
}

/// `φ(⟨x_1, …, x_k⟩)` for a random `φ` of Whitehead length `len`.
pub fn random_free_factor(rank: usize, k: usize, len: usize, rng: &mut SampleRng) -> FactorClass {
    let phi = random_automorphism(rank, len, rng);
    FactorClass::new(phi.images()[..k].to_vec()).expect("images of generators are nontrivial")
}

/// Splits a random vertex of valence at least four, if any.
pub fn random_blow_up(g: &MarkedGraph, rng: &mut SampleRng) -> Option<MarkedGraph> {
    let vs: Vec<usize> = (0..g.num_vertices()).filter(|&v| g.valence(v) >= 4).collect();
    let &v = vs.choose(rng)?;
    let mut dirs = g.directions(v);
    dirs.shuffle(rng);
    let m = rng.gen_range(2..=dirs.len() - 2);
    g.blow_up(v, &dirs[..m]).ok()
}

/// Rose marked by a random automorphism, blown up `blowups` times.
pub fn random_marked_graph(rank: usize, len: usize, blowups: usize, rng: &mut SampleRng) -> MarkedGraph {
    let phi = random_automorphism(rank, len, rng);
    let mut g = MarkedGraph::rose_with_marking(phi.images().to_vec()).expect("automorphism marking");
    for _ in 0..blowups {
        if let Some(h) = random_blow_up(&g, rng) {
            g = h;
        }
    }
    g
}

/// Uniform random reduced word of the given length.
pub fn random_word(rank: usize, len: usize, rng: &mut SampleRng) -> Word {
    let mut letters: Vec<i32> = Vec::with_capacity(len);
    while letters.len() < len {
        let i = rng.gen_range(1..=rank as i32);
        let l = if rng.gen_bool(0.5) { i } else { -i };
        if letters.last() != Some(&-l) {
            letters.push(l);
        }
    }
    Word::reduce(rank, &letters).expect("in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_streams() {
        let a = random_automorphism(3, 4, &mut rng(5));
        let b = random_automorphism(3, 4, &mut rng(5));
        assert_eq!(a, b);
        assert!(a.is_basis());
    }

    #[test]
    fn stabilizing_automorphisms_fix_sub_rose() {
        let mut r = rng(1);
        for _ in 0..20 {
            let phi = random_stabilizing_automorphism(3, 2, 3, &mut r);
            let std = FactorClass::parse(3, "a,b").unwrap();
            assert_eq!(std.apply(&phi).unwrap(), std);
        }
    }

    #[test]
    fn random_graphs_are_marked() {
        let mut r = rng(2);
        for _ in 0..20 {
            let g = random_marked_graph(3, 3, 2, &mut r);
            assert_eq!(g.rank(), 3);
            assert_eq!(g.num_edges() + 1, g.num_vertices() + 3);
        }
    }
}
