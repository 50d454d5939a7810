//! Brute-force oracle for permutation classes `Av(B)`.
//!
//! Level `n + 1` is built from level `n` by inserting the new maximum at every
//! position. Because classes are closed under deletion this reaches every
//! member, and only embeddings that use the new maximum need checking.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::perm::{parse_basis, Perm};
use crate::simple::{is_simple, is_skew_decomposable};

/// The basis of the larger class studied here.
pub const BASIS_A_PRIME: &str = "52341,53241,52431,35142,42513,351624";
/// The basis of the smaller class.
pub const BASIS_A: &str = "4231,35142,42513,351624";

pub fn basis_a() -> Vec<Perm> {
    parse_basis(BASIS_A).expect("valid literal")
}

pub fn basis_a_prime() -> Vec<Perm> {
    parse_basis(BASIS_A_PRIME).expect("valid literal")
}

/// Counts `s_0..=s_N` of a class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountTable {
    pub basis: Vec<Perm>,
    pub counts: Vec<u64>,
}

impl CountTable {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<CountTable, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Returns true when some basis element contains another (the class is
/// still well defined, the larger element is just redundant).
pub fn basis_has_comparable_pair(basis: &[Perm]) -> bool {
    basis.iter().enumerate().any(|(i, a)| {
        basis
            .iter()
            .enumerate()
            .any(|(j, b)| i != j && a.contains(b))
    })
}

/// Extends one level of a class by one.
pub fn next_level(level: &[Perm], basis: &[Perm]) -> Vec<Perm> {
    let mut out: Vec<Perm> = level
        .par_iter()
        .flat_map_iter(|p| {
            (0..=p.len()).filter_map(move |at| {
                let q = p.insert_max(at);
                basis
                    .iter()
                    .all(|b| !q.contains_with_max_at(b, at))
                    .then_some(q)
            })
        })
        .collect();
    out.par_sort_unstable();
    out
}

/// Visits every level `0..=n` in order.
pub fn for_each_level(basis: &[Perm], n: usize, mut f: impl FnMut(usize, &[Perm])) {
    let mut level = vec![Perm::empty()];
    f(0, &level);
    for k in 1..=n {
        level = next_level(&level, basis);
        f(k, &level);
    }
}

/// Exactly `Av(basis)` of length `n`, sorted.
pub fn generate_class(basis: &[Perm], n: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    for_each_level(basis, n, |k, level| {
        if k == n {
            out = level.to_vec();
        }
    });
    out
}

pub fn count_class(basis: &[Perm], n: usize) -> CountTable {
    let mut counts = Vec::with_capacity(n + 1);
    for_each_level(basis, n, |_, level| counts.push(level.len() as u64));
    CountTable {
        basis: basis.to_vec(),
        counts,
    }
}

pub fn count_simple_in_class(basis: &[Perm], n: usize) -> u64 {
    generate_class(basis, n)
        .par_iter()
        .filter(|p| is_simple(p))
        .count() as u64
}

/// Simple members of every length `0..=n`, without enumerating the class.
///
/// A simple permutation that is not a parallel alternation has a simple
/// one-point deletion, so each level comes from one-point extensions of the
/// level below plus the parallel alternations of that length.
pub fn simple_levels(basis: &[Perm], n: usize) -> Vec<Vec<Perm>> {
    let mut levels: Vec<Vec<Perm>> = vec![vec![]; n + 1];
    for k in 2..=n {
        let mut cand: Vec<Perm> = if k == 2 {
            vec![Perm::identity(2), Perm::decreasing(2)]
        } else {
            levels[k - 1]
                .par_iter()
                .flat_map_iter(|p| {
                    (0..k).flat_map(move |at| (1..=k).map(move |v| insert_point(p, at, v)))
                })
                .filter(is_simple)
                .collect()
        };
        cand.extend(parallel_alternations(k));
        cand.par_sort_unstable();
        cand.dedup();
        cand.retain(|p| p.avoids_all(basis));
        levels[k] = cand;
    }
    levels
}

/// `p` with a new entry of value `v` placed before 0-based index `at`.
fn insert_point(p: &Perm, at: usize, v: usize) -> Perm {
    let mut seq: Vec<usize> = p
        .to_vec()
        .into_iter()
        .map(|x| if x >= v { x + 1 } else { x })
        .collect();
    seq.insert(at, v);
    Perm::from_one_line(&seq).expect("valid insertion")
}

/// The simple parallel alternations of length `k` (none unless `k >= 4` is even).
fn parallel_alternations(k: usize) -> Vec<Perm> {
    if k < 4 || k % 2 == 1 {
        return vec![];
    }
    let h = k / 2;
    // 2 4 ... k 1 3 ... k-1
    let seq: Vec<usize> = (1..=h)
        .map(|i| 2 * i)
        .chain((1..=h).map(|i| 2 * i - 1))
        .collect();
    let base = Perm::from_one_line(&seq).expect("valid");
    base.symmetry_class()
        .into_iter()
        .filter(is_simple)
        .collect()
}

/// Members of length `n >= 1` that are not skew-decomposable.
pub fn count_skew_indecomposable(basis: &[Perm], n: usize) -> u64 {
    assert!(n >= 1, "defined for n >= 1");
    generate_class(basis, n)
        .par_iter()
        .filter(|p| !is_skew_decomposable(p))
        .count() as u64
}

/// All per-level statistics in one pass: class, simple and
/// skew-indecomposable counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelStats {
    pub counts: Vec<u64>,
    pub simple: Vec<u64>,
    pub skew_indecomposable: Vec<u64>,
}

pub fn level_stats(basis: &[Perm], n: usize) -> LevelStats {
    let mut s = LevelStats {
        counts: vec![],
        simple: vec![],
        skew_indecomposable: vec![],
    };
    for_each_level(basis, n, |k, level| {
        s.counts.push(level.len() as u64);
        s.simple
            .push(level.par_iter().filter(|p| is_simple(p)).count() as u64);
        s.skew_indecomposable.push(if k == 0 {
            0
        } else {
            level
                .par_iter()
                .filter(|p| !is_skew_decomposable(p))
                .count() as u64
        });
    });
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::perm;

    #[test]
    fn small_classes() {
        assert_eq!(generate_class(&[perm("21")], 5), vec![Perm::identity(5)]);
        assert_eq!(
            generate_class(&[perm("123"), perm("213"), perm("132")], 3).len(),
            3
        );
        assert_eq!(generate_class(&basis_a(), 0), vec![Perm::empty()]);
        assert_eq!(
            count_class(&[perm("231")], 5).counts,
            vec![1, 1, 2, 5, 14, 42]
        );
    }

    #[test]
    fn simple_and_skew_counts() {
        assert_eq!(count_simple_in_class(&basis_a(), 3), 0);
        assert_eq!(count_simple_in_class(&basis_a(), 4), 2);
        assert_eq!(count_simple_in_class(&basis_a_prime(), 4), 2);
        let g = [perm("4123"), perm("4213"), perm("4132")];
        assert_eq!(count_skew_indecomposable(&g, 1), 1);
        assert_eq!(count_skew_indecomposable(&g, 2), 1);
    }

    #[test]
    fn simple_levels_match_filtering() {
        for basis in [vec![], basis_a_prime(), vec![perm("2413")]] {
            let levels = simple_levels(&basis, 8);
            for (n, level) in levels.iter().enumerate() {
                let want: Vec<Perm> = generate_class(&basis, n)
                    .into_iter()
                    .filter(is_simple)
                    .collect();
                assert_eq!(level, &want, "n = {n}");
            }
        }
    }

    #[test]
    fn json_shape() {
        let t = count_class(&[perm("21")], 2);
        assert_eq!(t.to_json(), r#"{"basis":["21"],"counts":[1,1,1]}"#);
        assert_eq!(CountTable::from_json(&t.to_json()).unwrap(), t);
    }
}
