//! Automorphisms of `F_n` given by generator images, and the Whitehead
//! automorphisms.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stallings::subgroup_graph;
use crate::word::{gen_index, Letter, Word};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Automorphism {
    rank: usize,
    images: Vec<Word>,
}

impl Automorphism {
    /// Wraps generator images without checking that they form a basis.
    pub fn from_images_unchecked(images: Vec<Word>) -> Self {
        Automorphism {
            rank: images.len(),
            images,
        }
    }

    /// Builds an automorphism, verifying that the images form a basis.
    pub fn new(images: Vec<Word>) -> Result<Self> {
        let rank = images.len();
        for w in &images {
            if w.rank() != rank {
                return Err(Error::RankMismatch {
                    expected: rank,
                    found: w.rank(),
                });
            }
        }
        let a = Automorphism { rank, images };
        if !a.is_basis() {
            return Err(Error::NotABasis);
        }
        Ok(a)
    }

    /// Parses `["ab","b"]`-style image lists given as comma-separated text.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').collect();
        let rank = parts.len();
        let images = parts
            .iter()
            .map(|s| Word::parse(rank, s))
            .collect::<Result<Vec<_>>>()?;
        Automorphism::new(images)
    }

    pub fn identity(rank: usize) -> Self {
        Automorphism {
            rank,
            images: (0..rank).map(|i| Word::generator(rank, i)).collect(),
        }
    }

    /// Generator permutation with signs: `x_i ↦ x_{perm[i]}^{±1}`.
    pub fn permutation(perm: &[usize], inverted: &[bool]) -> Self {
        let rank = perm.len();
        let images = perm
            .iter()
            .zip(inverted)
            .map(|(&p, &inv)| {
                let g = Word::generator(rank, p);
                if inv {
                    g.inverse()
                } else {
                    g
                }
            })
            .collect();
        Automorphism { rank, images }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        *self == Automorphism::identity(self.rank)
    }

    /// Images fold to the rank-n rose.
    pub fn is_basis(&self) -> bool {
        if self.images.iter().any(Word::is_identity) {
            return false;
        }
        match subgroup_graph(&self.images) {
            Ok(g) => g.num_vertices() == 1 && g.num_edges() == self.rank,
            Err(_) => false,
        }
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        if w.rank() != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                found: w.rank(),
            });
        }
        Ok(self.apply_letters(w.letters()))
    }

    pub(crate) fn apply_letters(&self, letters: &[Letter]) -> Word {
        let mut out: Vec<Letter> = Vec::new();
        for &l in letters {
            let img = self.images[gen_index(l)].letters();
            if l > 0 {
                for &x in img {
                    push_reduce(&mut out, x);
                }
            } else {
                for &x in img.iter().rev() {
                    push_reduce(&mut out, -x);
                }
            }
        }
        Word::from_reduced(self.rank, out)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Automorphism) -> Automorphism {
        Automorphism {
            rank: self.rank,
            images: other
                .images
                .iter()
                .map(|w| self.apply_letters(w.letters()))
                .collect(),
        }
    }

    pub fn pow(&self, e: i64) -> Result<Automorphism> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut out = Automorphism::identity(self.rank);
        for _ in 0..e.unsigned_abs() {
            out = base.compose(&out);
        }
        Ok(out)
    }

    /// Inverse, read off the transcripts of the folded image graph.
    pub fn inverse(&self) -> Result<Automorphism> {
        let g = subgroup_graph(&self.images).map_err(|_| Error::NotABasis)?;
        if g.num_vertices() != 1 || g.num_edges() != self.rank {
            return Err(Error::NotABasis);
        }
        let images = (0..self.rank)
            .map(|i| {
                g.express(&[i as Letter + 1])
                    .map(|w| w.with_rank(self.rank))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Automorphism {
            rank: self.rank,
            images,
        })
    }

    /// Integer abelianization matrix; column `j` is the exponent vector of
    /// the image of generator `j`.
    pub fn abelian_matrix(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0i64; self.rank]; self.rank];
        for (j, w) in self.images.iter().enumerate() {
            for (i, x) in w.abelianize().into_iter().enumerate() {
                m[i][j] = x;
            }
        }
        m
    }

    /// Total length of the images.
    pub fn size(&self) -> usize {
        self.images.iter().map(Word::len).sum()
    }
}

fn push_reduce(out: &mut Vec<Letter>, x: Letter) {
    if out.last() == Some(&-x) {
        out.pop();
    } else {
        out.push(x);
    }
}

impl fmt::Display for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.images.iter().map(|w| w.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl TryFrom<Vec<String>> for Automorphism {
    type Error = Error;
    fn try_from(v: Vec<String>) -> Result<Self> {
        let rank = v.len();
        let images = v
            .iter()
            .map(|s| Word::parse(rank, s))
            .collect::<Result<Vec<_>>>()?;
        Automorphism::new(images)
    }
}

impl From<Automorphism> for Vec<String> {
    fn from(a: Automorphism) -> Self {
        a.images.iter().map(|w| w.to_string()).collect()
    }
}

/// The Whitehead automorphisms of `F_n`, without duplicates and without the
/// identity: signed permutations of the generators (type I) and, for each
/// multiplier letter `m`, every non-identity choice of `x ↦ x`, `x ↦ xm`,
/// `x ↦ m⁻¹x`, `x ↦ m⁻¹xm` on the other generators (type II).
pub fn whitehead_automorphisms(rank: usize) -> Vec<Automorphism> {
    assert!(rank >= 1);
    let mut set: BTreeSet<Automorphism> = BTreeSet::new();
    // type I
    let mut perm: Vec<usize> = (0..rank).collect();
    permutations(&mut perm, 0, &mut |p| {
        for mask in 0..(1u32 << rank) {
            let inv: Vec<bool> = (0..rank).map(|i| mask >> i & 1 == 1).collect();
            set.insert(Automorphism::permutation(p, &inv));
        }
    });
    // type II
    for m_idx in 0..rank {
        for sign in [1 as Letter, -1] {
            let m = sign * (m_idx as Letter + 1);
            let others: Vec<usize> = (0..rank).filter(|&i| i != m_idx).collect();
            let total = 4usize.pow(others.len() as u32);
            for code in 1..total {
                let mut images: Vec<Word> = (0..rank).map(|i| Word::generator(rank, i)).collect();
                let mut c = code;
                for &x in &others {
                    let g = x as Letter + 1;
                    let raw: Vec<Letter> = match c % 4 {
                        0 => vec![g],
                        1 => vec![g, m],
                        2 => vec![-m, g],
                        _ => vec![-m, g, m],
                    };
                    images[x] = Word::reduce(rank, &raw).expect("in range");
                    c /= 4;
                }
                set.insert(Automorphism { rank, images });
            }
        }
    }
    set.remove(&Automorphism::identity(rank));
    set.into_iter().collect()
}

/// Memoized [`whitehead_automorphisms`].
pub fn whitehead_cached(rank: usize) -> &'static [Automorphism] {
    static CACHE: [OnceLock<Vec<Automorphism>>; 27] = [const { OnceLock::new() }; 27];
    CACHE[rank].get_or_init(|| whitehead_automorphisms(rank))
}

fn permutations(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, f);
        p.swap(k, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn aut(s: &str) -> Automorphism {
        Automorphism::parse(s).unwrap()
    }

    #[test]
    fn apply_examples() {
        let phi = aut("ab,b");
        assert_eq!(phi.apply(&Word::parse(2, "aB").unwrap()).unwrap().to_string(), "a");
        let w = Word::parse(2, "abAAB").unwrap();
        assert_eq!(Automorphism::identity(2).apply(&w).unwrap(), w);
        assert_eq!(aut("b,ab").apply(&Word::parse(2, "a").unwrap()).unwrap().to_string(), "b");
        assert!(phi.apply(&Word::parse(3, "c").unwrap()).is_err());
    }

    #[test]
    fn rejects_non_basis() {
        assert_eq!(Automorphism::parse("aa,b").unwrap_err(), Error::NotABasis);
        assert_eq!(Automorphism::parse("a,baB").unwrap_err(), Error::NotABasis);
    }

    #[test]
    fn inverse_composes_to_identity() {
        for s in ["ab,b", "b,ab", "bca,c,a", "b,ab,c"] {
            let phi = aut(s);
            let inv = phi.inverse().unwrap();
            assert!(phi.compose(&inv).is_identity(), "{s}");
            assert!(inv.compose(&phi).is_identity(), "{s}");
        }
    }

    #[test]
    fn whitehead_rank2_contents() {
        let ws = whitehead_automorphisms(2);
        assert!(ws.contains(&aut("ab,b")));
        assert!(ws.contains(&aut("b,a")));
        assert!(!ws.contains(&Automorphism::identity(2)));
        let set: BTreeSet<_> = ws.iter().cloned().collect();
        assert_eq!(set.len(), ws.len());
        for w in &ws {
            assert!(w.is_basis());
            assert!(set.contains(&w.inverse().unwrap()), "{w}");
        }
    }

    #[test]
    fn whitehead_rank3_are_bases() {
        for w in whitehead_automorphisms(3) {
            assert!(w.is_basis(), "{w}");
        }
    }

    #[test]
    fn serde_as_word_list() {
        let phi = aut("ab,b");
        let s = serde_json_like(&phi);
        assert_eq!(s, vec!["ab".to_string(), "b".to_string()]);
    }

    fn serde_json_like(a: &Automorphism) -> Vec<String> {
        a.clone().into()
    }
}
