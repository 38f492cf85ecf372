//! The Farey graph: vertices are primitive vectors of `Z²` up to sign, with
//! `(p, q) ~ (r, s)` adjacent iff `|ps - qr| = 1`.

use std::collections::HashMap;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::factor::FactorClass;

pub type FareyVertex = (i64, i64);

/// Sign-normalized primitive vector: first nonzero coordinate positive.
pub fn normalize(v: FareyVertex) -> FareyVertex {
    if v.0 < 0 || (v.0 == 0 && v.1 < 0) {
        (-v.0, -v.1)
    } else {
        v
    }
}

pub fn is_primitive(v: FareyVertex) -> bool {
    v.0.gcd(&v.1) == 1
}

pub fn adjacent(u: FareyVertex, v: FareyVertex) -> bool {
    (u.0 * v.1 - u.1 * v.0).abs() == 1
}

/// Farey vertex of a rank-1 free factor of a rank-2 group.
pub fn farey_vertex(u: &FactorClass) -> Result<FareyVertex> {
    if u.ambient_rank() != 2 {
        return Err(Error::RankMismatch {
            expected: 2,
            found: u.ambient_rank(),
        });
    }
    let w = u
        .generator()
        .ok_or_else(|| Error::NotARankOneFactor(u.to_string()))?;
    let ab = w.abelianize();
    let v = (ab[0], ab[1]);
    if !is_primitive(v) {
        return Err(Error::NotARankOneFactor(u.to_string()));
    }
    Ok(normalize(v))
}

/// Exact Farey distance by continued-fraction descent: move `u` to `∞` by
/// an element of `SL₂(Z)` and recurse on the two integer neighbours of
/// `∞` that separate it from the other endpoint.
pub fn farey_distance_vectors(u: FareyVertex, v: FareyVertex) -> Result<u64> {
    if !is_primitive(u) || !is_primitive(v) {
        return Err(Error::Unsupported("Farey vertices must be primitive vectors".into()));
    }
    // M with M·u = (1, 0): rows (s, -r'), (-q, p) where p s' - q r' = 1
    let (p, q) = u;
    let (g, x, y) = ext_gcd(p, q);
    debug_assert_eq!(g.abs(), 1);
    let (x, y) = (x * g, y * g); // p x + q y = 1
    let image = (x * v.0 + y * v.1, -q * v.0 + p * v.1);
    let mut memo = HashMap::new();
    Ok(dist_from_infinity(image, &mut memo))
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// Distance from `∞ = (1, 0)` to `(x, y)`.
fn dist_from_infinity(v: FareyVertex, memo: &mut HashMap<FareyVertex, u64>) -> u64 {
    let (x, y) = normalize(v);
    if y == 0 {
        return 0;
    }
    if y.abs() == 1 {
        return 1;
    }
    if let Some(&d) = memo.get(&(x, y)) {
        return d;
    }
    // x/y lies strictly between k and k+1
    let (x, y) = if y < 0 { (-x, -y) } else { (x, y) };
    let k = x.div_euclid(y);
    let best = [k, k + 1]
        .into_iter()
        .map(|m| {
            // T(z) = -1/(z - m) sends m to ∞: (x, y) ↦ (-y, x - m y)
            dist_from_infinity((-y, x - m * y), memo)
        })
        .min()
        .unwrap();
    memo.insert((x, y), best + 1);
    best + 1
}

/// Farey distance between rank-1 free factors `u`, `v` of a rank-2 group
/// (both in the group's own coordinates).
pub fn farey_distance(u: &FactorClass, v: &FactorClass) -> Result<u64> {
    farey_distance_vectors(farey_vertex(u)?, farey_vertex(v)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_distances() {
        assert_eq!(farey_distance_vectors((1, 0), (0, 1)).unwrap(), 1);
        assert_eq!(farey_distance_vectors((1, 1), (1, -1)).unwrap(), 2);
        assert_eq!(farey_distance_vectors((3, 5), (3, 5)).unwrap(), 0);
        assert_eq!(farey_distance_vectors((3, 5), (-3, -5)).unwrap(), 0);
        assert_eq!(farey_distance_vectors((2, 1), (1, 2)).unwrap(), 2);
        assert!(farey_distance_vectors((2, 2), (1, 0)).is_err());
    }

    #[test]
    fn factor_classes() {
        let f = |s| FactorClass::parse(2, s).unwrap();
        assert_eq!(farey_distance(&f("a"), &f("ab")).unwrap(), 1);
        assert_eq!(farey_distance(&f("ab"), &f("aB")).unwrap(), 2);
        assert!(farey_distance(&f("a,b"), &f("a")).is_err());
    }

    #[test]
    fn symmetric() {
        for u in [(1, 0), (2, 3), (5, -7), (13, 8)] {
            for v in [(0, 1), (3, 4), (-7, 2), (21, 13)] {
                assert_eq!(
                    farey_distance_vectors(u, v).unwrap(),
                    farey_distance_vectors(v, u).unwrap()
                );
            }
        }
    }
}
