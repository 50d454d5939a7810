//! Permutations in one-line notation.
//!
//! Values are 1-based at the API boundary. Internally a permutation is a
//! `Vec<u8>`, which caps the length at 255; every object in this crate is far
//! below that.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Errors raised while building a permutation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("value {0} appears more than once")]
    DuplicateValue(usize),
    #[error("value {0} is outside 1..={1}")]
    OutOfRange(usize, usize),
    #[error("permutation of length {0} is too long (max 255)")]
    TooLong(usize),
    #[error("cannot parse permutation text {0:?}")]
    Parse(String),
    #[error("operation needs a nonempty permutation")]
    EmptyPermutation,
}

/// A permutation of `{1, ..., n}` written in one-line notation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Perm(Vec<u8>);

impl Perm {
    /// Validates `seq` as a bijection of `{1, ..., seq.len()}`.
    pub fn from_one_line(seq: &[usize]) -> Result<Perm, PermError> {
        let n = seq.len();
        if n > 255 {
            return Err(PermError::TooLong(n));
        }
        let mut seen = vec![false; n + 1];
        for &v in seq {
            if v == 0 || v > n {
                return Err(PermError::OutOfRange(v, n));
            }
            if seen[v] {
                return Err(PermError::DuplicateValue(v));
            }
            seen[v] = true;
        }
        Ok(Perm(seq.iter().map(|&v| v as u8).collect()))
    }

    /// Builds a permutation from raw bytes already known to be a bijection.
    pub(crate) fn from_bytes_unchecked(v: Vec<u8>) -> Perm {
        debug_assert!(
            Perm::from_one_line(&v.iter().map(|&x| x as usize).collect::<Vec<_>>()).is_ok()
        );
        Perm(v)
    }

    pub fn empty() -> Perm {
        Perm(Vec::new())
    }

    pub fn identity(n: usize) -> Perm {
        Perm((1..=n as u8).collect())
    }

    pub fn decreasing(n: usize) -> Perm {
        Perm((1..=n as u8).rev().collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Value at 1-based position `i`.
    pub fn at(&self, i: usize) -> usize {
        self.0[i - 1] as usize
    }

    /// 1-based position of value `v`.
    pub fn pos(&self, v: usize) -> usize {
        self.0
            .iter()
            .position(|&x| x as usize == v)
            .expect("value in range")
            + 1
    }

    pub fn bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.0.iter().map(|&v| v as usize).collect()
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u8; self.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v as usize - 1] = (i + 1) as u8;
        }
        Perm(inv)
    }

    pub fn reverse(&self) -> Perm {
        Perm(self.0.iter().rev().copied().collect())
    }

    pub fn complement(&self) -> Perm {
        let n = self.len() as u8;
        Perm(self.0.iter().map(|&v| n + 1 - v).collect())
    }

    pub fn apply(&self, op: Symmetry) -> Perm {
        op.apply(self)
    }

    /// The direct sum: `self` followed by `other` shifted up by `|self|`.
    pub fn sum(&self, other: &Perm) -> Perm {
        let m = self.len() as u8;
        let mut v = self.0.clone();
        v.extend(other.0.iter().map(|&x| x + m));
        Perm(v)
    }

    /// The skew sum: `self` shifted up by `|other|`, followed by `other`.
    pub fn skew_sum(&self, other: &Perm) -> Perm {
        let n = other.len() as u8;
        let mut v: Vec<u8> = self.0.iter().map(|&x| x + n).collect();
        v.extend_from_slice(&other.0);
        Perm(v)
    }

    pub fn combine(&self, other: &Perm, kind: SumKind) -> Perm {
        match kind {
            SumKind::Sum => self.sum(other),
            SumKind::SkewSum => self.skew_sum(other),
        }
    }

    /// True if some subsequence of `self` is order-isomorphic to `pattern`.
    pub fn contains(&self, pattern: &Perm) -> bool {
        let k = pattern.len();
        if k == 0 {
            return true;
        }
        if k > self.len() {
            return false;
        }
        let mut chosen = Vec::with_capacity(k);
        embed(&self.0, &pattern.0, 0, &mut chosen, None)
    }

    pub fn avoids(&self, pattern: &Perm) -> bool {
        !self.contains(pattern)
    }

    pub fn avoids_all(&self, basis: &[Perm]) -> bool {
        basis.iter().all(|b| self.avoids(b))
    }

    /// Containment restricted to embeddings that use the entry at 0-based
    /// index `forced` as the image of the pattern's maximum.
    pub(crate) fn contains_with_max_at(&self, pattern: &Perm, forced: usize) -> bool {
        let k = pattern.len();
        if k == 0 || k > self.len() {
            return k == 0;
        }
        let top = pattern.0.iter().position(|&v| v as usize == k).unwrap();
        if top > forced || k - 1 - top > self.len() - 1 - forced {
            return false;
        }
        let mut chosen = Vec::with_capacity(k);
        embed(&self.0, &pattern.0, 0, &mut chosen, Some((top, forced)))
    }

    /// Left-to-right maxima and right-to-left minima, as value sets.
    pub fn extrema(&self) -> Result<(BTreeSet<usize>, BTreeSet<usize>), PermError> {
        if self.is_empty() {
            return Err(PermError::EmptyPermutation);
        }
        let mut lr = BTreeSet::new();
        let mut best = 0u8;
        for &v in &self.0 {
            if v > best {
                best = v;
                lr.insert(v as usize);
            }
        }
        let mut rl = BTreeSet::new();
        let mut low = u8::MAX;
        for &v in self.0.iter().rev() {
            if v < low {
                low = v;
                rl.insert(v as usize);
            }
        }
        Ok((lr, rl))
    }

    /// All eight images under the symmetries of the square.
    pub fn symmetry_class(&self) -> BTreeSet<Perm> {
        Symmetry::all().iter().map(|s| s.apply(self)).collect()
    }

    /// Deletes the entry at 1-based position `i` and flattens.
    pub fn delete_position(&self, i: usize) -> Perm {
        let v = self.0[i - 1];
        Perm(
            self.0
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i - 1)
                .map(|(_, &x)| if x > v { x - 1 } else { x })
                .collect(),
        )
    }

    /// Inserts the new maximum `n + 1` before 0-based index `at`.
    pub fn insert_max(&self, at: usize) -> Perm {
        let mut v = self.0.clone();
        v.insert(at, self.len() as u8 + 1);
        Perm(v)
    }

    /// The permutation order-isomorphic to the entries at the given 1-based
    /// positions (in the order given).
    pub fn pattern_at(&self, positions: &[usize]) -> Perm {
        flatten_u8(&positions.iter().map(|&p| self.0[p - 1]).collect::<Vec<_>>())
    }

    /// Short text form: digits for `n <= 9`, space-separated otherwise.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

fn embed(
    text: &[u8],
    pat: &[u8],
    start: usize,
    chosen: &mut Vec<usize>,
    forced: Option<(usize, usize)>,
) -> bool {
    let j = chosen.len();
    if j == pat.len() {
        return true;
    }
    let remaining = pat.len() - j;
    let candidates: Box<dyn Iterator<Item = usize>> = match forced {
        Some((pj, pi)) if pj == j => {
            if pi < start {
                return false;
            }
            Box::new(std::iter::once(pi))
        }
        Some((pj, pi)) if j < pj => Box::new(start..pi.min(text.len() + 1 - remaining)),
        Some((_, pi)) => Box::new(start.max(pi + 1)..=text.len() - remaining),
        None => Box::new(start..=text.len() - remaining),
    };
    for i in candidates {
        if i + remaining > text.len() {
            break;
        }
        let v = text[i];
        let ok = chosen
            .iter()
            .enumerate()
            .all(|(q, &ci)| (pat[q] < pat[j]) == (text[ci] < v));
        if ok {
            chosen.push(i);
            if embed(text, pat, i + 1, chosen, forced) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// Kind of direct sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumKind {
    Sum,
    SkewSum,
}

/// An element of the dihedral group of the square acting on permutation
/// diagrams. Every composition of inverse, reverse and complement reduces to
/// one of these eight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symmetry {
    swap: bool,
    flip_x: bool,
    flip_y: bool,
}

/// The three generating symmetries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Atomic {
    Inverse,
    Reverse,
    Complement,
}

impl Symmetry {
    pub const IDENTITY: Symmetry = Symmetry {
        swap: false,
        flip_x: false,
        flip_y: false,
    };
    pub const INVERSE: Symmetry = Symmetry {
        swap: true,
        flip_x: false,
        flip_y: false,
    };
    pub const REVERSE: Symmetry = Symmetry {
        swap: false,
        flip_x: true,
        flip_y: false,
    };
    pub const COMPLEMENT: Symmetry = Symmetry {
        swap: false,
        flip_x: false,
        flip_y: true,
    };

    /// Composition applying `ops` left to right.
    pub fn compose(ops: &[Atomic]) -> Symmetry {
        ops.iter().fold(Symmetry::IDENTITY, |s, &a| s.then(a))
    }

    /// `self` followed by `a`.
    pub fn then(self, a: Atomic) -> Symmetry {
        match a {
            Atomic::Reverse => Symmetry {
                flip_x: !self.flip_x,
                ..self
            },
            Atomic::Complement => Symmetry {
                flip_y: !self.flip_y,
                ..self
            },
            Atomic::Inverse => Symmetry {
                swap: !self.swap,
                flip_x: self.flip_y,
                flip_y: self.flip_x,
            },
        }
    }

    pub fn all() -> Vec<Symmetry> {
        let mut v = Vec::with_capacity(8);
        for swap in [false, true] {
            for flip_x in [false, true] {
                for flip_y in [false, true] {
                    v.push(Symmetry {
                        swap,
                        flip_x,
                        flip_y,
                    });
                }
            }
        }
        v
    }

    pub fn apply(&self, p: &Perm) -> Perm {
        let n = p.len();
        let mut out = vec![0u8; n];
        for (i, &v) in p.0.iter().enumerate() {
            let (mut x, mut y) = (i + 1, v as usize);
            if self.swap {
                std::mem::swap(&mut x, &mut y);
            }
            if self.flip_x {
                x = n + 1 - x;
            }
            if self.flip_y {
                y = n + 1 - y;
            }
            out[x - 1] = y as u8;
        }
        Perm(out)
    }
}

/// The permutation with the same relative order as `seq`.
pub fn flatten<T: Ord + Copy>(seq: &[T]) -> Result<Perm, PermError> {
    let mut idx: Vec<usize> = (0..seq.len()).collect();
    idx.sort_by_key(|&i| seq[i]);
    for w in idx.windows(2) {
        if seq[w[0]] == seq[w[1]] {
            return Err(PermError::DuplicateValue(w[0] + 1));
        }
    }
    if seq.len() > 255 {
        return Err(PermError::TooLong(seq.len()));
    }
    let mut out = vec![0u8; seq.len()];
    for (rank, &i) in idx.iter().enumerate() {
        out[i] = (rank + 1) as u8;
    }
    Ok(Perm(out))
}

pub(crate) fn flatten_u8(seq: &[u8]) -> Perm {
    flatten(seq).expect("distinct entries")
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len() <= 9 {
            for v in &self.0 {
                write!(f, "{v}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
            write!(f, "{}", parts.join(" "))
        }
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm({self})")
    }
}

impl FromStr for Perm {
    type Err = PermError;

    /// Accepts space- or comma-separated values, or a digit string for
    /// lengths up to 9. The empty string is the empty permutation.
    fn from_str(s: &str) -> Result<Perm, PermError> {
        let t = s.trim();
        let bad = || PermError::Parse(s.to_string());
        let vals: Vec<usize> = if t.contains(|c: char| c.is_whitespace() || c == ',') {
            t.split(|c: char| c.is_whitespace() || c == ',')
                .filter(|x| !x.is_empty())
                .map(|x| x.parse::<usize>().map_err(|_| bad()))
                .collect::<Result<_, _>>()?
        } else {
            if t.len() > 9 {
                return Err(bad());
            }
            t.chars()
                .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad))
                .collect::<Result<_, _>>()?
        };
        Perm::from_one_line(&vals)
    }
}

impl serde::Serialize for Perm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Perm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Perm, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a comma-separated basis such as `"4231,35142"`.
pub fn parse_basis(text: &str) -> Result<Vec<Perm>, PermError> {
    text.split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect()
}

/// Shorthand used throughout the crate and its tests.
///
/// # Panics
/// Panics on malformed input; meant for literals.
pub fn perm(text: &str) -> Perm {
    text.parse()
        .unwrap_or_else(|e| panic!("bad permutation literal {text:?}: {e}"))
}
