//! Freely reduced words in a free group of fixed rank.
//!
//! A letter is a nonzero `i32`: `i` stands for the `i`-th generator (1-based)
//! and `-i` for its inverse. In text, generator `i ≤ 26` is the `i`-th
//! lowercase letter and its inverse the matching uppercase letter; `""` and
//! `"1"` both denote the identity.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Letter = i32;

/// Index (0-based) of the generator underlying a letter.
#[inline]
pub fn gen_index(l: Letter) -> usize {
    (l.unsigned_abs() - 1) as usize
}

/// Freely reduces a letter sequence in place using a stack.
pub fn reduce_letters(raw: impl IntoIterator<Item = Letter>) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::new();
    for l in raw {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// Product of two reduced letter sequences, reduced.
pub fn mul_letters(a: &[Letter], b: &[Letter]) -> Vec<Letter> {
    let mut k = 0;
    while k < a.len() && k < b.len() && a[a.len() - 1 - k] == -b[k] {
        k += 1;
    }
    let mut out = Vec::with_capacity(a.len() + b.len() - 2 * k);
    out.extend_from_slice(&a[..a.len() - k]);
    out.extend_from_slice(&b[k..]);
    out
}

pub fn inverse_letters(a: &[Letter]) -> Vec<Letter> {
    a.iter().rev().map(|&l| -l).collect()
}

/// Cyclic reduction of a reduced sequence: returns `(start, end)` of the
/// cyclically reduced core inside `a`.
pub fn cyclic_core_range(a: &[Letter]) -> (usize, usize) {
    let (mut i, mut j) = (0, a.len());
    while j > i + 1 && a[i] == -a[j - 1] {
        i += 1;
        j -= 1;
    }
    (i, j)
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Word {
    rank: usize,
    letters: Vec<Letter>,
}

impl Word {
    /// Reduces a raw letter sequence, checking every index against `rank`.
    pub fn reduce(rank: usize, raw: &[Letter]) -> Result<Self> {
        for &l in raw {
            if l == 0 || l.unsigned_abs() as usize > rank {
                return Err(Error::IndexOutOfRange {
                    index: l as i64,
                    rank,
                });
            }
        }
        Ok(Word {
            rank,
            letters: reduce_letters(raw.iter().copied()),
        })
    }

    /// Wraps letters already known to be reduced and in range.
    pub(crate) fn from_reduced(rank: usize, letters: Vec<Letter>) -> Self {
        debug_assert!(letters.windows(2).all(|w| w[0] != -w[1]));
        debug_assert!(letters
            .iter()
            .all(|&l| l != 0 && (l.unsigned_abs() as usize) <= rank));
        Word { rank, letters }
    }

    pub fn identity(rank: usize) -> Self {
        Word {
            rank,
            letters: Vec::new(),
        }
    }

    /// The `i`-th generator, 0-based.
    pub fn generator(rank: usize, i: usize) -> Self {
        assert!(i < rank, "generator {i} out of range for rank {rank}");
        Word {
            rank,
            letters: vec![i as Letter + 1],
        }
    }

    pub fn parse(rank: usize, text: &str) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() || text == "1" {
            return Ok(Word::identity(rank));
        }
        let mut raw = Vec::with_capacity(text.len());
        for c in text.chars() {
            let l = match c {
                'a'..='z' => (c as u8 - b'a') as Letter + 1,
                'A'..='Z' => -((c as u8 - b'A') as Letter + 1),
                c if c.is_whitespace() || c == '.' || c == '·' => continue,
                _ => return Err(Error::Parse(text.to_string())),
            };
            raw.push(l);
        }
        Word::reduce(rank, &raw)
    }

    /// Parses a comma-separated list of words.
    pub fn parse_list(rank: usize, text: &str) -> Result<Vec<Self>> {
        text.split(',').map(|s| Word::parse(rank, s)).collect()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Word {
            rank: self.rank,
            letters: inverse_letters(&self.letters),
        }
    }

    pub fn mul(&self, other: &Word) -> Self {
        debug_assert_eq!(self.rank, other.rank);
        Word {
            rank: self.rank,
            letters: mul_letters(&self.letters, &other.letters),
        }
    }

    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity(self.rank);
        for _ in 0..e.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// `g · self · g⁻¹`
    pub fn conjugate_by(&self, g: &Word) -> Self {
        g.mul(self).mul(&g.inverse())
    }

    /// Splits `self = conjugator · core · conjugator⁻¹` with `core` cyclically
    /// reduced.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let (i, j) = cyclic_core_range(&self.letters);
        (
            Word::from_reduced(self.rank, self.letters[i..j].to_vec()),
            Word::from_reduced(self.rank, self.letters[..i].to_vec()),
        )
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.letters.len() < 2 || self.letters[0] != -self.letters[self.letters.len() - 1]
    }

    /// Length of the cyclically reduced core.
    pub fn cyclic_len(&self) -> usize {
        let (i, j) = cyclic_core_range(&self.letters);
        j - i
    }

    /// Exponent-sum vector.
    pub fn abelianize(&self) -> Vec<i64> {
        let mut v = vec![0i64; self.rank];
        for &l in &self.letters {
            v[gen_index(l)] += l.signum() as i64;
        }
        v
    }

    /// Lexicographically least representative of the conjugacy class of
    /// `self` together with that of `self⁻¹`, i.e. a canonical name for the
    /// cyclic subgroup class `⟨self⟩`.
    pub fn cyclic_class_key(&self) -> Vec<Letter> {
        let (core, _) = self.cyclic_reduce();
        let mut best: Option<Vec<Letter>> = None;
        for w in [core.letters.clone(), inverse_letters(&core.letters)] {
            for r in 0..w.len().max(1) {
                let rot: Vec<Letter> = w[r..].iter().chain(&w[..r]).copied().collect();
                let key: Vec<Letter> = rot.clone();
                if best.as_ref().is_none_or(|b| letter_order(&key) < letter_order(b)) {
                    best = Some(key);
                }
            }
        }
        best.unwrap_or_default()
    }

    pub(crate) fn with_rank(&self, rank: usize) -> Self {
        Word {
            rank,
            letters: self.letters.clone(),
        }
    }
}

/// Ordering key: a < A < b < B < ...
fn letter_order(w: &[Letter]) -> Vec<(u32, bool)> {
    w.iter().map(|&l| (l.unsigned_abs(), l < 0)).collect()
}

pub(crate) fn letter_char(l: Letter) -> String {
    let i = l.unsigned_abs();
    if i <= 26 {
        let base = if l > 0 { b'a' } else { b'A' };
        ((base + (i - 1) as u8) as char).to_string()
    } else if l > 0 {
        format!("x{i}")
    } else {
        format!("X{i}")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        for &l in &self.letters {
            f.write_str(&letter_char(l))?;
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Words deserialize with the minimal rank that contains all their letters;
/// callers re-rank them against the ambient group.
impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Word::parse(26, &s)
            .map(|w| {
                let r = w.letters.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(1);
                w.with_rank(r)
            })
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(3, s).unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(Word::parse(2, "aA b").unwrap(), Word::parse(2, "b").unwrap());
        assert!(Word::parse(2, "").unwrap().is_identity());
        assert!(Word::parse(2, "abBA").unwrap().is_identity());
    }

    #[test]
    fn out_of_range_index() {
        assert!(matches!(
            Word::reduce(2, &[1, 3]),
            Err(Error::IndexOutOfRange { index: 3, rank: 2 })
        ));
        assert!(Word::parse(2, "c").is_err());
        assert!(Word::parse(2, "a?").is_err());
    }

    #[test]
    fn cyclic_reduce_examples() {
        assert_eq!(w("abA").cyclic_reduce(), (w("b"), w("a")));
        assert_eq!(w("ab").cyclic_reduce(), (w("ab"), w("")));
        let (core, conj) = w("aBabA").cyclic_reduce();
        assert_eq!((core.clone(), conj.clone()), (w("a"), w("aB")));
        assert_eq!(core.conjugate_by(&conj), w("aBabA"));
    }

    #[test]
    fn abelianize_examples() {
        let w2 = |s| Word::parse(2, s).unwrap();
        assert_eq!(w2("abAB").abelianize(), vec![0, 0]);
        assert_eq!(w2("ab").abelianize(), vec![1, 1]);
        assert_eq!(w2("aab").abelianize(), vec![2, 1]);
    }

    #[test]
    fn display_round_trip() {
        assert_eq!(w("aBc").to_string(), "aBc");
        assert_eq!(w("").to_string(), "1");
        assert_eq!(Word::parse(3, "1").unwrap(), w(""));
    }

    #[test]
    fn class_key_is_conjugation_and_inversion_invariant() {
        assert_eq!(w("ab").cyclic_class_key(), w("ba").cyclic_class_key());
        assert_eq!(w("ab").cyclic_class_key(), w("BA").cyclic_class_key());
        assert_eq!(w("cAbaC").cyclic_class_key(), w("b").cyclic_class_key());
        assert_ne!(w("ab").cyclic_class_key(), w("aB").cyclic_class_key());
    }
}
