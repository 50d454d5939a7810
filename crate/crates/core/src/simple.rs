//! Blocks, simple permutations, inflation and substitution decomposition.

use serde::Serialize;
use thiserror::Error;

use crate::perm::{flatten_u8, Perm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InflateError {
    #[error("skeleton has {skeleton} points but {parts} parts were given")]
    ArityMismatch { skeleton: usize, parts: usize },
    #[error("part {0} is empty")]
    EmptyPart(usize),
}

/// A block: consecutive positions `segment` holding the consecutive values `range`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Block {
    pub segment: (usize, usize),
    pub range: (usize, usize),
}

/// A permutation written as an inflation of a simple (or trivial) skeleton.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub skeleton: Perm,
    pub parts: Vec<Perm>,
}

/// All blocks other than singletons and the whole permutation, sorted by segment.
pub fn proper_nontrivial_blocks(p: &Perm) -> Vec<Block> {
    let v = p.bytes();
    let n = v.len();
    let mut out = Vec::new();
    for i in 0..n {
        let (mut lo, mut hi) = (v[i], v[i]);
        for j in i + 1..n {
            lo = lo.min(v[j]);
            hi = hi.max(v[j]);
            if (hi - lo) as usize == j - i && !(i == 0 && j == n - 1) {
                out.push(Block {
                    segment: (i + 1, j + 1),
                    range: (lo as usize, hi as usize),
                });
            }
        }
    }
    out
}

/// Simple means no proper nontrivial block. By convention 1 is not simple
/// while 12 and 21 are.
pub fn is_simple(p: &Perm) -> bool {
    let v = p.bytes();
    let n = v.len();
    if n <= 1 {
        return false;
    }
    for i in 0..n {
        let (mut lo, mut hi) = (v[i], v[i]);
        for j in i + 1..n {
            lo = lo.min(v[j]);
            hi = hi.max(v[j]);
            if (hi - lo) as usize == j - i && !(i == 0 && j == n - 1) {
                return false;
            }
        }
    }
    true
}

/// Replaces point `i` of the skeleton by the block pattern `parts[i]`.
pub fn inflate(skeleton: &Perm, parts: &[Perm]) -> Result<Perm, InflateError> {
    if skeleton.len() != parts.len() {
        return Err(InflateError::ArityMismatch {
            skeleton: skeleton.len(),
            parts: parts.len(),
        });
    }
    if let Some(i) = parts.iter().position(|q| q.is_empty()) {
        return Err(InflateError::EmptyPart(i + 1));
    }
    let n = skeleton.len();
    // offset[v] = number of values lying in blocks of skeleton values below v
    let mut size_by_value = vec![0usize; n + 1];
    for i in 1..=n {
        size_by_value[skeleton.at(i)] = parts[i - 1].len();
    }
    let mut offset = vec![0usize; n + 2];
    for v in 1..=n {
        offset[v + 1] = offset[v] + size_by_value[v];
    }
    let mut out = Vec::with_capacity(offset[n + 1]);
    for i in 1..=n {
        let base = offset[skeleton.at(i)];
        out.extend(
            parts[i - 1]
                .bytes()
                .iter()
                .map(|&x| (x as usize + base) as u8),
        );
    }
    Ok(Perm::from_bytes_unchecked(out))
}

/// `(sum_decomposable, skew_decomposable)`.
pub fn decomposability(p: &Perm) -> (bool, bool) {
    (
        first_sum_component(p) < p.len(),
        first_skew_component(p) < p.len(),
    )
}

/// Length of the shortest nonempty prefix that is a sum component.
fn first_sum_component(p: &Perm) -> usize {
    let mut hi = 0;
    for (i, &v) in p.bytes().iter().enumerate() {
        hi = hi.max(v as usize);
        if hi == i + 1 {
            return i + 1;
        }
    }
    p.len()
}

fn first_skew_component(p: &Perm) -> usize {
    let n = p.len();
    let mut lo = usize::MAX;
    for (i, &v) in p.bytes().iter().enumerate() {
        lo = lo.min(v as usize);
        if lo == n - i {
            return i + 1;
        }
    }
    n
}

pub fn is_sum_decomposable(p: &Perm) -> bool {
    decomposability(p).0
}

pub fn is_skew_decomposable(p: &Perm) -> bool {
    decomposability(p).1
}

/// The unique decomposition with a simple skeleton. For skeletons 12 and 21
/// the first part is sum- (skew-) indecomposable.
pub fn substitution_decompose(p: &Perm) -> Decomposition {
    let n = p.len();
    assert!(n >= 1, "substitution decomposition needs n >= 1");
    if n == 1 {
        return Decomposition {
            skeleton: p.clone(),
            parts: vec![p.clone()],
        };
    }
    let k = first_sum_component(p);
    if k < n {
        let v = p.bytes();
        let first = Perm::from_bytes_unchecked(v[..k].to_vec());
        let rest = Perm::from_bytes_unchecked(v[k..].iter().map(|&x| x - k as u8).collect());
        return Decomposition {
            skeleton: Perm::identity(2),
            parts: vec![first, rest],
        };
    }
    let k = first_skew_component(p);
    if k < n {
        let v = p.bytes();
        let first = Perm::from_bytes_unchecked(v[..k].iter().map(|&x| x - (n - k) as u8).collect());
        let rest = Perm::from_bytes_unchecked(v[k..].to_vec());
        return Decomposition {
            skeleton: Perm::decreasing(2),
            parts: vec![first, rest],
        };
    }
    // Neither sum nor skew decomposable: the maximal proper blocks partition
    // the positions and their pattern is simple.
    let blocks = proper_nontrivial_blocks(p);
    let mut cuts = Vec::new();
    let mut i = 1;
    while i <= n {
        let end = blocks
            .iter()
            .filter(|b| b.segment.0 == i)
            .map(|b| b.segment.1)
            .max()
            .unwrap_or(i);
        // maximal blocks are disjoint, so the longest block starting at the
        // start of one is that maximal block
        cuts.push((i, end));
        i = end + 1;
    }
    let v = p.bytes();
    let reps: Vec<u8> = cuts.iter().map(|&(a, _)| v[a - 1]).collect();
    let skeleton = flatten_u8(&reps);
    let parts = cuts
        .iter()
        .map(|&(a, b)| flatten_u8(&v[a - 1..b]))
        .collect();
    Decomposition { skeleton, parts }
}
