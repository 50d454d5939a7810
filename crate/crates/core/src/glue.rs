//! Extreme patterns, interchange sums, value and position chains, and the
//! glue sums that assemble simple permutations of the larger class out of
//! simple factors of extreme patterns 2413 and 3142.
//!
//! NW glue sums are computed from their defining table; every SE glue sum is
//! the inverse dual `inverse(NW(sigma^-1, tau^-1))`. The direct SE formulas
//! for types 1-0 and 1-1 are kept as an independent cross-check.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::ser::SerializeTuple;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::classes::{basis_a, basis_a_prime};
use crate::perm::{flatten, perm, Perm};
use crate::simple::is_simple;

/// Errors from gluing, chain handling and decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GlueError {
    #[error("operand is empty")]
    EmptyOperand,
    #[error("{side} violates condition `{clause}`")]
    ConditionViolated { side: Side, clause: &'static str },
    #[error("chains are not comparable: {0} and {1}")]
    FamilyMismatch(ChainFamily, ChainFamily),
    #[error("not a {0} chain: {1}")]
    NotAChain(ChainFamily, String),
    #[error("{0} is outside the domain")]
    NotInDomain(String),
    #[error("structure violation: {0}")]
    StructureViolation(String),
    #[error("unknown glue type {0:?}")]
    UnknownGlueType(String),
}

/// Which operand a violated condition belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    Both,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left operand",
            Side::Right => "right operand",
            Side::Both => "operand pair",
        })
    }
}

/// Flattening of the first, last, greatest and least entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExtremePattern {
    P2143,
    P2413,
    P3142,
    P3412,
    /// Fewer than four distinct extreme points.
    Short,
}

impl fmt::Display for ExtremePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExtremePattern::P2143 => "2143",
            ExtremePattern::P2413 => "2413",
            ExtremePattern::P3142 => "3142",
            ExtremePattern::P3412 => "3412",
            ExtremePattern::Short => "short",
        })
    }
}

pub fn extreme_pattern(p: &Perm) -> ExtremePattern {
    let n = p.len();
    if n < 4 {
        return ExtremePattern::Short;
    }
    let (first, last) = (p.at(1), p.at(n));
    if first == 1 || first == n || last == 1 || last == n {
        return ExtremePattern::Short;
    }
    // first and last are interior values, so the pattern is x ? ? y with
    // the max and min in the middle
    let max_first = p.pos(n) < p.pos(1);
    match (first < last, max_first) {
        (true, true) => ExtremePattern::P2413,
        (true, false) => ExtremePattern::P2143,
        (false, true) => ExtremePattern::P3412,
        (false, false) => ExtremePattern::P3142,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumMode {
    Value,
    Position,
}

/// Interchange sum with one shift.
///
/// Value mode swaps the values `m` and `m+1` of `sigma + tau`; position mode
/// is `sigma(1..m-1) tau'(1) sigma(m) tau'(2..)` with `tau' = tau + m`.
pub fn interchange_sum(sigma: &Perm, tau: &Perm, mode: SumMode) -> Result<Perm, GlueError> {
    if sigma.is_empty() || tau.is_empty() {
        return Err(GlueError::EmptyOperand);
    }
    let m = sigma.len();
    let s = sigma.to_vec();
    let t: Vec<usize> = tau.to_vec().iter().map(|v| v + m).collect();
    let out: Vec<usize> = match mode {
        SumMode::Value => s
            .iter()
            .chain(t.iter())
            .map(|&v| {
                if v == m {
                    m + 1
                } else if v == m + 1 {
                    m
                } else {
                    v
                }
            })
            .collect(),
        SumMode::Position => {
            let mut out = s[..m - 1].to_vec();
            out.push(t[0]);
            out.push(s[m - 1]);
            out.extend_from_slice(&t[1..]);
            out
        }
    };
    Ok(Perm::from_one_line(&out).expect("interchange sum is a permutation"))
}

/// The four kinds of chains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChainFamily {
    Value231,
    Value312,
    Position231,
    Position312,
}

impl ChainFamily {
    pub fn is_value(self) -> bool {
        matches!(self, ChainFamily::Value231 | ChainFamily::Value312)
    }

    /// The summand other than 21: 231 or 312.
    pub fn long_summand(self) -> Perm {
        match self {
            ChainFamily::Value231 | ChainFamily::Position231 => perm("231"),
            ChainFamily::Value312 | ChainFamily::Position312 => perm("312"),
        }
    }

    fn mode(self) -> SumMode {
        if self.is_value() {
            SumMode::Value
        } else {
            SumMode::Position
        }
    }

    fn same_letters(self, other: ChainFamily) -> bool {
        self.long_summand() == other.long_summand()
    }
}

impl fmt::Display for ChainFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChainFamily::Value231 => "231-value",
            ChainFamily::Value312 => "312-value",
            ChainFamily::Position231 => "231-position",
            ChainFamily::Position312 => "312-position",
        })
    }
}

/// A chain given by its summands, optionally with the scissor value it has
/// inside a host permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainSpec {
    pub family: ChainFamily,
    pub summands: Vec<Perm>,
    pub scissor: Option<usize>,
}

impl ChainSpec {
    pub fn new(family: ChainFamily, summands: Vec<Perm>) -> Result<ChainSpec, GlueError> {
        let long = family.long_summand();
        let two = perm("21");
        if summands.is_empty() || summands.iter().any(|s| *s != two && *s != long) {
            let text = summands
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(",");
            return Err(GlueError::NotAChain(family, text));
        }
        Ok(ChainSpec {
            family,
            summands,
            scissor: None,
        })
    }

    /// The flattened chain: the summands folded with the interchange sum.
    pub fn pattern(&self) -> Perm {
        let mode = self.family.mode();
        let mut acc = self.summands[0].clone();
        for s in &self.summands[1..] {
            acc = interchange_sum(&acc, s, mode).expect("nonempty summands");
        }
        acc
    }

    pub fn len(&self) -> usize {
        self.summands.iter().map(Perm::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    /// Recovers the summands of a chain pattern, if it is one.
    pub fn from_pattern(family: ChainFamily, pattern: &Perm) -> Option<ChainSpec> {
        let long = family.long_summand();
        let mode = family.mode();
        let mut summands = Vec::new();
        let mut rest = pattern.clone();
        'outer: while !rest.is_empty() {
            for head in [perm("21"), long.clone()] {
                let h = head.len();
                if rest.len() == h {
                    if rest == head {
                        summands.push(head);
                        break 'outer;
                    }
                    continue;
                }
                if rest.len() < h + 2 {
                    continue;
                }
                let tail = match mode {
                    SumMode::Value => flatten(&rest.bytes()[h..]).ok()?,
                    SumMode::Position => {
                        let b = rest.bytes();
                        let mut t = vec![b[h - 1]];
                        t.extend_from_slice(&b[h + 1..]);
                        flatten(&t).ok()?
                    }
                };
                if interchange_sum(&head, &tail, mode).ok()? == rest {
                    summands.push(head);
                    rest = tail;
                    continue 'outer;
                }
            }
            return None;
        }
        Some(ChainSpec {
            family,
            summands,
            scissor: None,
        })
    }
}

/// Value chain `alpha` and position chain `beta` are similar when
/// `21 +_1 alpha` and `beta +^1 21` flatten to the same permutation.
pub fn chains_similar(alpha: &ChainSpec, beta: &ChainSpec) -> Result<bool, GlueError> {
    if !alpha.family.is_value() || beta.family.is_value() || !alpha.family.same_letters(beta.family)
    {
        return Err(GlueError::FamilyMismatch(alpha.family, beta.family));
    }
    Ok(similar_patterns(&alpha.pattern(), &beta.pattern()))
}

fn similar_patterns(alpha: &Perm, beta: &Perm) -> bool {
    let two = perm("21");
    let lhs = interchange_sum(&two, alpha, SumMode::Value).expect("nonempty");
    let rhs = interchange_sum(beta, &two, SumMode::Position).expect("nonempty");
    lhs == rhs
}

/// Sizes of the blocks of the finest direct-sum decomposition.
fn sum_components(seq: &[usize]) -> Vec<usize> {
    let mut sorted = seq.to_vec();
    sorted.sort_unstable();
    let rank = |v: usize| sorted.binary_search(&v).expect("present") + 1;
    let mut out = Vec::new();
    let (mut start, mut hi) = (0, 0);
    for (k, &v) in seq.iter().enumerate() {
        hi = hi.max(rank(v));
        if hi == k + 1 {
            out.push(k + 1 - start);
            start = k + 1;
        }
    }
    out
}

fn skew_components(seq: &[usize]) -> Vec<usize> {
    let rev: Vec<usize> = seq.iter().map(|&v| usize::MAX - v).collect();
    sum_components(&rev)
}

/// The last 312-value chain: the longest suffix right of the maximum whose
/// values are `[lo, hi]` minus the scissor `lo+1`, with the scissor also
/// right of the maximum, and whose pattern is a 312-value chain. For a
/// simple 2413 type this is the final block of the direct-sum decomposition
/// right of the value 1; the suffix form also works for glued products.
/// Returns the chain and its positions.
pub fn last_value_chain_312(p: &Perm) -> Option<(ChainSpec, Vec<usize>)> {
    let n = p.len();
    let top = p.pos(n);
    let mut best = None;
    for k in (top + 1..n).rev() {
        let vals: Vec<usize> = (k..=n).map(|q| p.at(q)).collect();
        let lo = *vals.iter().min().expect("nonempty");
        let hi = *vals.iter().max().expect("nonempty");
        if vals.len() != hi - lo || vals.contains(&(lo + 1)) || p.pos(lo + 1) < top {
            continue;
        }
        let positions: Vec<usize> = (k..=n).collect();
        if let Some(mut chain) =
            ChainSpec::from_pattern(ChainFamily::Value312, &p.pattern_at(&positions))
        {
            chain.scissor = Some(lo + 1);
            best = Some((chain, positions));
        }
    }
    best
}

/// The least 312-position chain of a 3142-type permutation: the first block
/// of the direct-sum decomposition of the values below the last entry.
/// Returns the chain and its positions.
pub fn least_position_chain_312(p: &Perm) -> Option<(ChainSpec, Vec<usize>)> {
    let n = p.len();
    let b = p.at(n);
    let positions: Vec<usize> = (1..=n).filter(|&k| p.at(k) < b).collect();
    let vals: Vec<usize> = positions.iter().map(|&k| p.at(k)).collect();
    let first = *sum_components(&vals).first()?;
    let positions = positions[..first].to_vec();
    let pattern = p.pattern_at(&positions);
    let mut chain = ChainSpec::from_pattern(ChainFamily::Position312, &pattern)?;
    let last = *positions.last()?;
    chain.scissor = Some(p.at(last - 1));
    Some((chain, positions))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    NW,
    SE,
}

/// One of the six glue sums in either orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GlueType {
    pub orientation: Orientation,
    pub x: u8,
    pub y: u8,
}

impl GlueType {
    pub const VARIANTS: [(u8, u8); 6] = [(1, 0), (1, 1), (2, 0), (2, 1), (3, 0), (4, 0)];

    pub fn new(orientation: Orientation, x: u8, y: u8) -> Result<GlueType, GlueError> {
        if GlueType::VARIANTS.contains(&(x, y)) {
            Ok(GlueType { orientation, x, y })
        } else {
            Err(GlueError::UnknownGlueType(format!("{x}-{y}")))
        }
    }

    pub fn nw(x: u8, y: u8) -> GlueType {
        GlueType::new(Orientation::NW, x, y).expect("listed variant")
    }

    pub fn se(x: u8, y: u8) -> GlueType {
        GlueType::new(Orientation::SE, x, y).expect("listed variant")
    }

    pub fn all() -> Vec<GlueType> {
        [Orientation::NW, Orientation::SE]
            .into_iter()
            .flat_map(|o| {
                GlueType::VARIANTS.into_iter().map(move |(x, y)| GlueType {
                    orientation: o,
                    x,
                    y,
                })
            })
            .collect()
    }
}

impl fmt::Display for GlueType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}-{}", self.orientation, self.x, self.y)
    }
}

impl FromStr for GlueType {
    type Err = GlueError;

    /// Accepts `NW1-0`, `nw 1-0`, `SE3-0` and similar.
    fn from_str(s: &str) -> Result<GlueType, GlueError> {
        let bad = || GlueError::UnknownGlueType(s.to_string());
        let t: String = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .collect::<String>()
            .to_ascii_uppercase();
        let orientation = match t.get(..2) {
            Some("NW") => Orientation::NW,
            Some("SE") => Orientation::SE,
            _ => return Err(bad()),
        };
        let (x, y) = t[2..].split_once('-').ok_or_else(bad)?;
        let x: u8 = x.parse().map_err(|_| bad())?;
        let y: u8 = y.parse().map_err(|_| bad())?;
        GlueType::new(orientation, x, y).map_err(|_| bad())
    }
}

impl Serialize for GlueType {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(3)?;
        t.serialize_element(&format!("{:?}", self.orientation))?;
        t.serialize_element(&self.x)?;
        t.serialize_element(&self.y)?;
        t.end()
    }
}

impl<'de> Deserialize<'de> for GlueType {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<GlueType, D::Error> {
        let (o, x, y) = <(String, u8, u8)>::deserialize(d)?;
        format!("{o}{x}-{y}")
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// One table condition, named as it reads for each orientation.
#[derive(Clone, Copy)]
struct Clause {
    nw: &'static str,
    se: &'static str,
}

const I_LE_M2: Clause = Clause {
    nw: "i <= m-2",
    se: "sigma(m) <= m-2",
};
const I_LE_M4: Clause = Clause {
    nw: "i <= m-4",
    se: "sigma(m) <= m-4",
};
const I_LE_M5: Clause = Clause {
    nw: "i <= m-5",
    se: "sigma(m) <= m-5",
};
const S_M_IS_M1: Clause = Clause {
    nw: "sigma(m) = m-1",
    se: "sigma(m-1) = m",
};
const S_I2_IS_M1: Clause = Clause {
    nw: "sigma(i+2) = m-1",
    se: "sigma(m-1) = sigma(m)+2",
};
const S_M_IS_M2: Clause = Clause {
    nw: "sigma(m) = m-2",
    se: "sigma(m-2) = m",
};
const S_M2_IS_M1: Clause = Clause {
    nw: "sigma(m-2) = m-1",
    se: "sigma(m-1) = m-2",
};
const S_M1_IS_M1: Clause = Clause {
    nw: "sigma(m-1) = m-1",
    se: "sigma(m-1) = m-1",
};
const S_M_IS_M3: Clause = Clause {
    nw: "sigma(m) = m-3",
    se: "sigma(m-3) = m",
};
const S_NEXT_M2: Clause = Clause {
    nw: "m-2 sits at position i+1 or i+2",
    se: "sigma(m-1) or sigma(m-2) is i+2",
};
const ALPHA: Clause = Clause {
    nw: "sigma(m) lies in the last 312-value chain",
    se: "m lies in the greatest 231-position chain",
};
const J_GE_3: Clause = Clause {
    nw: "j >= 3",
    se: "tau^-1(1) >= 3",
};
const J_GE_5: Clause = Clause {
    nw: "j >= 5",
    se: "tau^-1(1) >= 5",
};
const J_GE_6: Clause = Clause {
    nw: "j >= 6",
    se: "tau^-1(1) >= 6",
};
const T2_IS_1: Clause = Clause {
    nw: "tau(2) = 1",
    se: "tau(1) = 2",
};
const T2_IS_3: Clause = Clause {
    nw: "tau(2) = 3",
    se: "tau(3) = 2",
};
const T3_IS_1: Clause = Clause {
    nw: "tau(3) = 1",
    se: "tau(1) = 3",
};
const T2_IS_J2: Clause = Clause {
    nw: "tau(2) = j-2",
    se: "tau(j-2) = 2",
};
const BETA: Clause = Clause {
    nw: "1 lies in the least 312-position chain",
    se: "tau(1) lies in the first 231-value chain",
};
const BETA_LAYOUT: Clause = Clause {
    nw: "the 312-position chain fills positions 2..l+2 except l+1",
    se: "the 231-value chain fills values 2..l+2 except l+1",
};
const SIMILAR: Clause = Clause {
    nw: "the two chains are similar",
    se: "the two chains are similar",
};

struct Check {
    orientation: Orientation,
}

impl Check {
    fn need(&self, ok: bool, side: Side, c: Clause) -> Result<(), GlueError> {
        if ok {
            Ok(())
        } else {
            let clause = match self.orientation {
                Orientation::NW => c.nw,
                Orientation::SE => c.se,
            };
            Err(GlueError::ConditionViolated { side, clause })
        }
    }
}

/// 1-based read that yields 0 outside the permutation.
fn at(p: &[usize], k: usize) -> usize {
    if k >= 1 && k <= p.len() {
        p[k - 1]
    } else {
        0
    }
}

fn nw_core(s: &[usize], t: &[usize], x: u8, y: u8, ck: &Check) -> Result<Vec<usize>, GlueError> {
    let (m, n) = (s.len(), t.len());
    let i = s.iter().position(|&v| v == m).expect("nonempty") + 1;
    let j = t[0];
    let (l, r) = (Side::Left, Side::Right);
    let out = match (x, y) {
        (1, _) => {
            ck.need(i + 2 <= m, l, I_LE_M2)?;
            ck.need(at(s, m) + 1 == m, l, S_M_IS_M1)?;
            ck.need(j >= 3, r, J_GE_3)?;
            ck.need(at(t, 2) == 1, r, T2_IS_1)?;
            let y = y as usize;
            let mut out: Vec<usize> = (1..m + y)
                .map(|k| if k == i { m + j - 3 + y } else { s[k - 1] })
                .collect();
            out.extend((3..=n).map(|k| t[k - 1] + m - 3 + y));
            out
        }
        (2, _) => {
            ck.need(i + 4 <= m, l, I_LE_M4)?;
            ck.need(at(s, i + 2) + 1 == m, l, S_I2_IS_M1)?;
            ck.need(at(s, m) + 2 == m, l, S_M_IS_M2)?;
            ck.need(j >= 3, r, J_GE_3)?;
            ck.need(at(t, 2) == 1, r, T2_IS_1)?;
            let y = y as usize;
            let mut out: Vec<usize> = (1..m + y)
                .map(|k| {
                    if k == i {
                        m + j - 3 + y
                    } else if k == i + 2 {
                        m + j - 4 + y
                    } else {
                        s[k - 1]
                    }
                })
                .collect();
            // tau values above j sit one higher than those below it, to make
            // room for the lifted m-1
            out.extend((3..=n).map(|k| t[k - 1] + m - 4 + y + usize::from(t[k - 1] > j)));
            out
        }
        (3, 0) => {
            ck.need(i + 5 <= m, l, I_LE_M5)?;
            ck.need(at(s, m - 2) + 1 == m, l, S_M2_IS_M1)?;
            ck.need(at(s, m) + 2 == m, l, S_M_IS_M2)?;
            let sp = Perm::from_one_line(s).expect("validated");
            let alpha = last_value_chain_312(&sp).filter(|(c, _)| c.len() >= 2);
            ck.need(alpha.is_some(), l, ALPHA)?;
            ck.need(j >= 6, r, J_GE_6)?;
            ck.need(at(t, 2) == 3, r, T2_IS_3)?;
            ck.need(at(t, 3) == 1, r, T3_IS_1)?;
            let tp = Perm::from_one_line(t).expect("validated");
            let beta = least_position_chain_312(&tp);
            ck.need(beta.is_some(), r, BETA)?;
            let (alpha, _) = alpha.expect("checked");
            let (beta, bpos) = beta.expect("checked");
            let ell = beta.len();
            let layout: Vec<usize> = (2..=ell + 2).filter(|&k| k != ell + 1).collect();
            ck.need(bpos == layout && ell + 3 <= n, r, BETA_LAYOUT)?;
            ck.need(
                similar_patterns(&alpha.pattern(), &beta.pattern()),
                Side::Both,
                SIMILAR,
            )?;
            let h = t[ell];
            if j < ell + 3 || h < ell + 2 || m < ell + 3 {
                return Err(GlueError::StructureViolation(
                    "chain lengths do not fit".into(),
                ));
            }
            let mut out: Vec<usize> = (1..m)
                .map(|k| {
                    if k == i {
                        m + j - ell - 3
                    } else if k == m - 2 {
                        m - 1 + h - ell - 2
                    } else {
                        s[k - 1]
                    }
                })
                .collect();
            out.extend((ell + 3..=n).map(|k| t[k - 1] + m - ell - 3));
            out
        }
        (4, 0) => {
            ck.need(i + 4 <= m, l, I_LE_M4)?;
            ck.need(at(s, m - 1) + 1 == m, l, S_M1_IS_M1)?;
            ck.need(at(s, m) + 3 == m, l, S_M_IS_M3)?;
            ck.need(j >= 5, r, J_GE_5)?;
            ck.need(at(t, 2) + 2 == j, r, T2_IS_J2)?;
            ck.need(at(t, 3) == 1, r, T3_IS_1)?;
            let sp = s.iter().position(|&v| v + 2 == m).expect("present") + 1;
            ck.need(sp == i + 1 || sp == i + 2, l, S_NEXT_M2)?;
            let mut out: Vec<usize> = (1..m - 1)
                .map(|k| {
                    if k == i {
                        m + j - 5
                    } else if k == sp {
                        m + j - 7
                    } else {
                        s[k - 1]
                    }
                })
                .collect();
            out.extend((4..=n).map(|k| t[k - 1] + m - 5));
            out
        }
        _ => return Err(GlueError::UnknownGlueType(format!("{x}-{y}"))),
    };
    Ok(out)
}

/// Glues `sigma` and `tau` with the given glue sum after checking every
/// condition of the table row.
pub fn glue(sigma: &Perm, tau: &Perm, g: GlueType) -> Result<Perm, GlueError> {
    if sigma.is_empty() || tau.is_empty() {
        return Err(GlueError::EmptyOperand);
    }
    let ck = Check {
        orientation: g.orientation,
    };
    let (s, t) = match g.orientation {
        Orientation::NW => (sigma.to_vec(), tau.to_vec()),
        Orientation::SE => (sigma.inverse().to_vec(), tau.inverse().to_vec()),
    };
    let out = nw_core(&s, &t, g.x, g.y, &ck)?;
    let p = Perm::from_one_line(&out).map_err(|e| {
        GlueError::StructureViolation(format!("glue {g} produced a non-permutation: {e}"))
    })?;
    Ok(match g.orientation {
        Orientation::NW => p,
        Orientation::SE => p.inverse(),
    })
}

/// SE glue sums of type 1-0 and 1-1 evaluated from their own formula rather
/// than by duality: `sigma(1..m-2+y) tau'(2..n)` with `tau'(j) = sigma(m)`
/// (`j = tau^-1(1)`) and the other entries of tau raised by `m-3+y`.
pub fn glue_se_type1_direct(sigma: &Perm, tau: &Perm, y: u8) -> Result<Perm, GlueError> {
    if sigma.is_empty() || tau.is_empty() {
        return Err(GlueError::EmptyOperand);
    }
    let ck = Check {
        orientation: Orientation::SE,
    };
    let (s, t) = (sigma.to_vec(), tau.to_vec());
    let (m, n) = (s.len(), t.len());
    let i = s[m - 1];
    let j = tau.pos(1);
    ck.need(i + 2 <= m, Side::Left, I_LE_M2)?;
    ck.need(at(&s, m - 1) == m, Side::Left, S_M_IS_M1)?;
    ck.need(j >= 3, Side::Right, J_GE_3)?;
    ck.need(t[0] == 2, Side::Right, T2_IS_1)?;
    let y = y as usize;
    let mut out = s[..m - 2 + y].to_vec();
    out.extend((2..=n).map(|k| if k == j { i } else { t[k - 1] + m - 3 + y }));
    Perm::from_one_line(&out).map_err(|e| GlueError::StructureViolation(e.to_string()))
}

/// Folds `factors` left to right with `types[k]` joining factor `k+1`.
pub fn glue_all(factors: &[Perm], types: &[GlueType]) -> Result<Perm, GlueError> {
    let first = factors.first().ok_or(GlueError::EmptyOperand)?;
    if types.len() + 1 != factors.len() {
        return Err(GlueError::StructureViolation(format!(
            "{} factors need {} glue types, got {}",
            factors.len(),
            factors.len() - 1,
            types.len()
        )));
    }
    let mut acc = first.clone();
    for (f, &g) in factors[1..].iter().zip(types) {
        acc = glue(&acc, f, g)?;
    }
    Ok(acc)
}

/// The two domains of the structure theorems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// Simple members of the smaller class with `n >= 4` and `pi(2) != 1`.
    H,
    /// Simple members of the larger class with `n >= 4`,
    /// `2 <= pi(1) <= 4` and `pi(2) != 1`.
    HPrime,
}

impl FromStr for Domain {
    type Err = GlueError;
    fn from_str(s: &str) -> Result<Domain, GlueError> {
        match s.to_ascii_lowercase().as_str() {
            "h" => Ok(Domain::H),
            "h'" | "hprime" | "h_prime" => Ok(Domain::HPrime),
            _ => Err(GlueError::NotInDomain(s.to_string())),
        }
    }
}

pub fn membership(p: &Perm, domain: Domain) -> bool {
    let n = p.len();
    if n < 4 || p.at(2) == 1 {
        return false;
    }
    match domain {
        Domain::H => p.avoids_all(&basis_a()) && is_simple(p),
        Domain::HPrime => {
            (2..=4).contains(&p.at(1)) && p.avoids_all(&basis_a_prime()) && is_simple(p)
        }
    }
}

/// Unique factorisation of a member of H or H' into alternating simple
/// factors of extreme patterns 2413 and 3142.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlueDecomposition {
    pub factors: Vec<Perm>,
    pub types: Vec<GlueType>,
}

impl GlueDecomposition {
    pub fn m(&self) -> usize {
        self.factors.len()
    }

    pub fn reglue(&self) -> Result<Perm, GlueError> {
        glue_all(&self.factors, &self.types)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serialisable")
    }

    /// Infix form such as `2413 NW1-0 5162473`.
    pub fn to_infix(&self) -> String {
        let mut out = self.factors[0].to_string();
        for (f, g) in self.factors[1..].iter().zip(&self.types) {
            let f = if f.len() > 9 {
                format!("({f})")
            } else {
                f.to_string()
            };
            out.push_str(&format!(" {g} {f}"));
        }
        out
    }
}

/// Undoes one NW glue sum of the given variant whose left operand has
/// length `m`. Returns candidate operands; the caller re-glues to confirm.
fn nw_inverse(p: &[usize], x: u8, y: u8, m: usize) -> Option<(Vec<usize>, Vec<usize>)> {
    let big = p.len();
    let argmax = |len: usize| -> Option<usize> {
        let pre = p.get(..len)?;
        Some(pre.iter().enumerate().max_by_key(|&(_, v)| *v)?.0 + 1)
    };
    match (x, y) {
        (1, _) | (2, _) => {
            let y = y as usize;
            let kept = m - 1 + y;
            if kept + 1 > big || m < 4 {
                return None;
            }
            let i = argmax(kept)?;
            let mut sigma: Vec<usize> = p[..kept].to_vec();
            sigma[i - 1] = m;
            let j = p[i - 1].checked_sub(m + y)? + 3;
            let below = if x == 2 {
                if i + 2 > kept {
                    return None;
                }
                let v = p[i + 1];
                sigma[i + 1] = m - 1;
                Some(v)
            } else {
                None
            };
            if y == 0 {
                sigma.push(if x == 1 { m - 1 } else { m - 2 });
            }
            let mut tau = vec![j, 1];
            for &w in &p[kept..] {
                let v = match below {
                    Some(b) if w > b => w.checked_sub(m - 3 + y)?,
                    Some(_) => w.checked_sub(m - 4 + y)?,
                    None => w.checked_sub(m - 3 + y)?,
                };
                tau.push(v);
            }
            Some((sigma, tau))
        }
        (3, 0) => {
            if m < 6 || m > big {
                return None;
            }
            let i = argmax(m - 1)?;
            let mut sigma: Vec<usize> = p[..m - 1].to_vec();
            let lifted = p[m - 3];
            sigma[i - 1] = m;
            sigma[m - 3] = m - 1;
            sigma.push(m - 2);
            let sp = Perm::from_one_line(&sigma).ok()?;
            let (alpha, _) = last_value_chain_312(&sp)?;
            let ell = alpha.len();
            if m < ell + 3 {
                return None;
            }
            let j = (p[i - 1] + ell + 3).checked_sub(m)?;
            let h = (lifted + ell + 3).checked_sub(m)?;
            // beta is read off 21 +_1 alpha with its two largest values removed
            let framed = interchange_sum(&perm("21"), &alpha.pattern(), SumMode::Value).ok()?;
            let beta: Vec<usize> = framed.to_vec().into_iter().filter(|&v| v <= ell).collect();
            let mut tau = vec![j];
            tau.extend_from_slice(&beta[..ell - 1]);
            tau.push(h);
            tau.push(beta[ell - 1]);
            for &w in &p[m - 1..] {
                tau.push(w.checked_sub(m - ell - 3)?);
            }
            Some((sigma, tau))
        }
        (4, 0) => {
            let kept = m - 2;
            if m < 6 || kept + 1 > big {
                return None;
            }
            let i = argmax(kept)?;
            let top = p[i - 1];
            let s = p[..kept].iter().position(|&v| v + 2 == top)? + 1;
            let mut sigma: Vec<usize> = p[..kept].to_vec();
            sigma[i - 1] = m;
            sigma[s - 1] = m - 2;
            sigma.push(m - 1);
            sigma.push(m - 3);
            let j = (top + 5).checked_sub(m)?;
            let mut tau = vec![j, j.checked_sub(2)?, 1];
            for &w in &p[kept..] {
                tau.push(w.checked_sub(m - 5)?);
            }
            Some((sigma, tau))
        }
        _ => None,
    }
}

/// Every way to write `p` as `left <g> right` with `right` a simple factor of
/// the extreme pattern the orientation calls for.
fn last_glue_candidates(p: &Perm) -> Vec<(Perm, Perm, GlueType)> {
    let mut out = Vec::new();
    for g in GlueType::all() {
        let (work, want) = match g.orientation {
            Orientation::NW => (p.clone(), ExtremePattern::P3142),
            Orientation::SE => (p.inverse(), ExtremePattern::P3142),
        };
        let w = work.to_vec();
        for m in 4..=w.len() + 5 {
            let Some((s, t)) = nw_inverse(&w, g.x, g.y, m) else {
                continue;
            };
            let (Ok(s), Ok(t)) = (Perm::from_one_line(&s), Perm::from_one_line(&t)) else {
                continue;
            };
            if extreme_pattern(&t) != want || !is_simple(&t) {
                continue;
            }
            let nw = GlueType {
                orientation: Orientation::NW,
                ..g
            };
            if glue(&s, &t, nw).ok().as_ref() != Some(&work) {
                continue;
            }
            match g.orientation {
                Orientation::NW => out.push((s, t, g)),
                Orientation::SE => out.push((s.inverse(), t.inverse(), g)),
            }
        }
    }
    out
}

type Memo = HashMap<Perm, Vec<GlueDecomposition>>;

fn decompositions(p: &Perm, memo: &mut Memo) -> Vec<GlueDecomposition> {
    if let Some(found) = memo.get(p) {
        return found.clone();
    }
    let mut found = Vec::new();
    if extreme_pattern(p) == ExtremePattern::P2413 && is_simple(p) {
        found.push(GlueDecomposition {
            factors: vec![p.clone()],
            types: vec![],
        });
    } else {
        for (left, right, g) in last_glue_candidates(p) {
            for d in decompositions(&left, memo) {
                // glue k joins factor k+1 and is NW exactly when k is odd
                let k = d.factors.len();
                let want = if k % 2 == 1 {
                    Orientation::NW
                } else {
                    Orientation::SE
                };
                if g.orientation != want {
                    continue;
                }
                let mut d = d;
                d.factors.push(right.clone());
                d.types.push(g);
                found.push(d);
            }
        }
    }
    memo.insert(p.clone(), found.clone());
    found
}

fn in_some_domain(p: &Perm) -> bool {
    membership(p, Domain::HPrime) || membership(p, Domain::H)
}

/// Factorises a member of H or H' into alternating glue sums.
pub fn glue_decompose(p: &Perm) -> Result<GlueDecomposition, GlueError> {
    if !in_some_domain(p) {
        return Err(GlueError::NotInDomain(p.to_string()));
    }
    let mut all = decompositions(p, &mut Memo::new());
    match all.len() {
        1 => Ok(all.pop().expect("one")),
        0 => Err(GlueError::StructureViolation(format!(
            "no glue decomposition of {p}"
        ))),
        k => Err(GlueError::StructureViolation(format!(
            "{k} glue decompositions of {p}"
        ))),
    }
}

/// The sequence `d_1 = pi(1)`, then alternately the right-most value below
/// the previous one and the greatest value to the left of it, until a value
/// repeats.
pub fn d_sequence(p: &Perm) -> Result<Vec<usize>, GlueError> {
    if !in_some_domain(p) {
        return Err(GlueError::NotInDomain(p.to_string()));
    }
    let n = p.len();
    let mut d = vec![p.at(1)];
    loop {
        let prev = *d.last().expect("nonempty");
        let next = if d.len() % 2 == 1 {
            (1..=n).rev().map(|k| p.at(k)).find(|&v| v < prev)
        } else {
            (1..p.pos(prev)).map(|k| p.at(k)).max()
        };
        match next {
            Some(v) if !d.contains(&v) => d.push(v),
            _ => break,
        }
    }
    Ok(d)
}

/// How the tracing algorithm finished.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TraceExit {
    /// The value right of `p` does not start a chain.
    Step2,
    /// The position chain ended on its own.
    Step4a,
    /// The position chain ended with a scissor on its left.
    Step4b,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceValues {
    pub p: usize,
    pub q: usize,
    pub q_prime: Option<usize>,
    pub r: usize,
    pub exit: TraceExit,
}

/// Locates where the last NW glue sum joined its operands. Defined when the
/// d-sequence has `m+4` entries for odd `m`, ending in `n`.
pub fn trace(pi: &Perm) -> Result<TraceValues, GlueError> {
    let d = d_sequence(pi)?;
    let n = pi.len();
    let outside = || GlueError::NotInDomain(format!("{pi} does not end in an NW glue sum"));
    if d.len() < 5 || d.len() % 2 == 0 || *d.last().expect("nonempty") != n {
        return Err(outside());
    }
    let m = d.len() - 4;
    let dv = |k: usize| d[k - 1];
    let pos = |v: usize| pi.pos(v);
    let val = |k: usize| pi.at(k);
    let p = ((pos(dv(m + 1)) + 1)..=n)
        .map(val)
        .find(|&v| v > dv(m + 3))
        .ok_or_else(outside)?;
    if pos(p) >= n || pos(p) <= 1 {
        return Err(outside());
    }
    let u = val(pos(p) + 1);
    let (mut t1, mut t2) = (u, u + 1);
    let (q, q_prime, exit) = if !(t1 < p && p < dv(m + 2) && t2 <= n && pos(t2) < pos(t1)) {
        (val(pos(p) - 1), None, TraceExit::Step2)
    } else {
        let after = |t2: usize| if pos(t2) < n { val(pos(t2) + 1) } else { 0 };
        while after(t2) + 1 < t1 && pos(t2) > pos(dv(m + 1)) {
            t1 = after(t2);
            t2 = t1 + 1;
        }
        if after(t2) + 1 >= t1 {
            if pos(t2) < 2 {
                return Err(outside());
            }
            (val(pos(t2) - 1), None, TraceExit::Step4a)
        } else {
            (u, Some(t2), TraceExit::Step4b)
        }
    };
    let r = (1..=pos(q))
        .map(val)
        .filter(|&v| v < dv(m + 3))
        .max()
        .ok_or_else(outside)?;
    Ok(TraceValues {
        p,
        q,
        q_prime,
        r,
        exit,
    })
}

/// Outcome of the structural checks on one simple permutation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub extreme: ExtremePattern,
    /// "N" for increasing/decreasing/increasing runs on the three segments of
    /// a 2413 type, "S" for the inverse shape of a 3142 type.
    pub shape: Option<String>,
    pub passed: bool,
    pub violation: Option<String>,
}

/// Checks the segment structure of a simple permutation of extreme pattern
/// 2413 (or, through the inverse, 3142) against the larger class's
/// structure propositions, reporting the first failed clause.
pub fn verify_structure(p: &Perm) -> StructureReport {
    let extreme = extreme_pattern(p);
    let fail = |why: &str| StructureReport {
        extreme,
        shape: None,
        passed: false,
        violation: Some(why.to_string()),
    };
    if p.len() < 4 || !is_simple(p) {
        return fail("not a simple permutation of length at least 4");
    }
    let (q, shape) = match extreme {
        ExtremePattern::P2413 => (p.clone(), "N"),
        ExtremePattern::P3142 => (p.inverse(), "S"),
        ExtremePattern::P3412 => return fail("extreme pattern 3412 admits no simple member"),
        _ => return fail("extreme pattern outside 2413 and 3142"),
    };
    let shaped = n_shaped(&q).then(|| shape.to_string());
    let violation = check_2413(&q).err().map(|why| {
        if extreme == ExtremePattern::P3142 {
            format!("inverse: {why}")
        } else {
            why
        }
    });
    StructureReport {
        extreme,
        shape: shaped,
        passed: violation.is_none(),
        violation,
    }
}

/// Increasing on `[pos b, pos d]`, decreasing on `[pos d, pos a]`,
/// increasing on `[pos a, n]`.
fn n_shaped(p: &Perm) -> bool {
    let v = p.to_vec();
    let (pd, pa) = (p.pos(p.len()), p.pos(1));
    v[..pd].windows(2).all(|w| w[0] < w[1])
        && v[pd - 1..pa].windows(2).all(|w| w[0] > w[1])
        && v[pa - 1..].windows(2).all(|w| w[0] < w[1])
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Seg {
    A,
    B,
    C,
}

fn check_2413(p: &Perm) -> Result<(), String> {
    let n = p.len();
    let (pd, pa) = (p.pos(n), p.pos(1));
    let seg = |v: usize| {
        let k = p.pos(v);
        if k < pd {
            Seg::A
        } else if k <= pa {
            Seg::B
        } else {
            Seg::C
        }
    };
    let va: Vec<usize> = (1..pd).map(|k| p.at(k)).collect();
    let vb: Vec<usize> = (pd..=pa).map(|k| p.at(k)).collect();
    let vc: Vec<usize> = (pa + 1..=n).map(|k| p.at(k)).collect();
    let blocks = |vals: &[usize], sizes: Vec<usize>| -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut k = 0;
        for s in sizes {
            out.push(vals[k..k + s].to_vec());
            k += s;
        }
        out
    };
    let between = |lo: usize, hi: usize, segs: &[Seg]| {
        (lo + 1..hi)
            .filter(|&x| segs.contains(&seg(x)))
            .collect::<Vec<_>>()
    };

    // segment A: sum of 1s and 231-value chains
    let ablocks = blocks(&va, sum_components(&va));
    for b in &ablocks {
        if b.len() > 1 {
            let pat = flatten(b).expect("distinct");
            if ChainSpec::from_pattern(ChainFamily::Value231, &pat).is_none() {
                return Err(format!("segment A block {pat} is not a 231-value chain"));
            }
            let (lo, hi) = (
                *b.iter().min().expect("nonempty"),
                *b.iter().max().expect("nonempty"),
            );
            if (lo..=hi).any(|x| x != hi - 1 && seg(x) != Seg::A) || seg(hi - 1) != Seg::B {
                return Err(format!(
                    "231-value chain {pat} in A is not cut by a scissor in B"
                ));
            }
        }
    }
    for w in ablocks.windows(2) {
        if w[0].len() == 1
            && w[1].len() == 1
            && between(w[0][0], w[1][0], &[Seg::B, Seg::C]).is_empty()
        {
            return Err(format!(
                "no value from B or C separates {} and {} in A",
                w[0][0], w[1][0]
            ));
        }
    }

    // segment B: skew sum of 1s and 12s
    let bblocks = blocks(&vb, skew_components(&vb));
    for b in &bblocks {
        match b.len() {
            1 => {}
            2 if b[0] < b[1] => {
                let mid = between(b[0], b[1], &[Seg::A, Seg::C]);
                let (xs, ys): (Vec<usize>, Vec<usize>) =
                    mid.iter().partition(|&&x| seg(x) == Seg::A);
                if mid.is_empty()
                    || xs.len() > 2
                    || ys.len() > 2
                    || xs.iter().any(|x| ys.iter().any(|y| x > y))
                {
                    return Err(format!(
                        "values between {} and {} in B are misplaced",
                        b[0], b[1]
                    ));
                }
            }
            _ => return Err("segment B is not a skew sum of 1 and 12".into()),
        }
    }
    for w in bblocks.windows(2) {
        if w[0].len() == 1
            && w[1].len() == 1
            && between(w[1][0], w[0][0], &[Seg::A, Seg::C]).is_empty()
        {
            return Err(format!(
                "no value from A or C separates {} and {} in B",
                w[0][0], w[1][0]
            ));
        }
    }

    // segment C: sum of 1s and 312-value chains
    let cblocks = blocks(&vc, sum_components(&vc));
    for b in &cblocks {
        if b.len() > 1 {
            let pat = flatten(b).expect("distinct");
            if ChainSpec::from_pattern(ChainFamily::Value312, &pat).is_none() {
                return Err(format!("segment C block {pat} is not a 312-value chain"));
            }
            let (lo, hi) = (
                *b.iter().min().expect("nonempty"),
                *b.iter().max().expect("nonempty"),
            );
            if (lo..=hi).any(|x| x != lo + 1 && seg(x) != Seg::C) || seg(lo + 1) != Seg::B {
                return Err(format!(
                    "312-value chain {pat} in C is not cut by a scissor in B"
                ));
            }
        }
    }
    for w in cblocks.windows(2) {
        if w[0].len() == 1
            && w[1].len() == 1
            && between(w[0][0], w[1][0], &[Seg::A, Seg::B]).is_empty()
        {
            return Err(format!(
                "no value from A or B separates {} and {} in C",
                w[0][0], w[1][0]
            ));
        }
    }

    if seg(2) == Seg::C {
        return Err("the value 2 sits in segment C".into());
    }
    if seg(n - 1) == Seg::A {
        return Err(format!("the value {} sits in segment A", n - 1));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Perm {
        perm(s)
    }

    #[test]
    fn extreme_patterns() {
        assert_eq!(extreme_pattern(&p("47128365")), ExtremePattern::P2143);
        assert_eq!(extreme_pattern(&p("52413")), ExtremePattern::Short);
        assert_eq!(extreme_pattern(&p("2413")), ExtremePattern::P2413);
        assert_eq!(extreme_pattern(&p("3142")), ExtremePattern::P3142);
        assert_eq!(extreme_pattern(&p("3412")), ExtremePattern::P3412);
    }

    #[test]
    fn interchange_sums() {
        assert_eq!(
            interchange_sum(&p("1342"), &p("312"), SumMode::Value).unwrap(),
            p("1352746")
        );
        assert_eq!(
            interchange_sum(&p("21"), &p("21"), SumMode::Value).unwrap(),
            p("3142")
        );
        assert_eq!(
            interchange_sum(&p("312"), &p("21"), SumMode::Position).unwrap(),
            p("31524")
        );
        assert_eq!(
            interchange_sum(&Perm::empty(), &p("1"), SumMode::Value),
            Err(GlueError::EmptyOperand)
        );
    }

    #[test]
    fn similarity() {
        let alpha = ChainSpec::new(ChainFamily::Value312, vec![p("21"), p("312")]).unwrap();
        let beta = ChainSpec::new(ChainFamily::Position312, vec![p("312"), p("21")]).unwrap();
        assert!(chains_similar(&alpha, &beta).unwrap());
        let two = |f| ChainSpec::new(f, vec![p("21")]).unwrap();
        // 21 +_1 21 = 3142 but 21 +^1 21 = 2413
        assert!(
            !chains_similar(&two(ChainFamily::Value312), &two(ChainFamily::Position312)).unwrap()
        );
        let beta2 = ChainSpec::new(ChainFamily::Position312, vec![p("21"), p("21")]).unwrap();
        assert!(!chains_similar(&alpha, &beta2).unwrap());
        assert!(matches!(
            chains_similar(&alpha, &two(ChainFamily::Position231)),
            Err(GlueError::FamilyMismatch(..))
        ));
    }

    #[test]
    fn chain_patterns_roundtrip() {
        let alpha =
            ChainSpec::new(ChainFamily::Value312, vec![p("21"), p("312"), p("21")]).unwrap();
        let back = ChainSpec::from_pattern(ChainFamily::Value312, &alpha.pattern()).unwrap();
        assert_eq!(back.summands, alpha.summands);
        let beta = ChainSpec::new(ChainFamily::Position231, vec![p("231"), p("21")]).unwrap();
        let back = ChainSpec::from_pattern(ChainFamily::Position231, &beta.pattern()).unwrap();
        assert_eq!(back.summands, beta.summands);
        assert!(ChainSpec::from_pattern(ChainFamily::Value312, &p("2413")).is_none());
    }

    #[test]
    fn known_glues() {
        let cases = [
            ("2753146", "5162473", "NW1-0", "2 9 5 3 1 4 10 6 8 11 7"),
            ("2753146", "5162473", "NW1-1", "2 10 5 3 1 4 6 11 7 9 12 8"),
            ("5146372", "2475136", "SE1-0", "5 1 4 6 3 8 11 9 2 7 10"),
            (
                "2 10 5 1 3 7 4 9 6 8",
                "831527496",
                "NW3-0",
                "2 10 5 1 3 7 4 9 6 11 8",
            ),
            ("264135", "71426385", "NW1-0", "2 10 4 1 3 7 5 9 6 11 8"),
        ];
        for (s, t, g, want) in cases {
            assert_eq!(
                glue(&p(s), &p(t), g.parse().unwrap()).unwrap(),
                p(want),
                "{s} {g} {t}"
            );
        }
    }

    #[test]
    fn se_direct_matches_duality() {
        let (s, t) = (p("5146372"), p("2475136"));
        for y in 0..2 {
            assert_eq!(
                glue_se_type1_direct(&s, &t, y).unwrap(),
                glue(&s, &t, GlueType::se(1, y)).unwrap()
            );
        }
    }

    #[test]
    fn violated_clause_is_named() {
        let err = glue(&p("2413"), &p("3142"), GlueType::nw(2, 0)).unwrap_err();
        assert_eq!(
            err,
            GlueError::ConditionViolated {
                side: Side::Left,
                clause: "i <= m-4"
            }
        );
        let err = glue(&p("2753146"), &p("2413"), GlueType::nw(1, 0)).unwrap_err();
        assert_eq!(
            err,
            GlueError::ConditionViolated {
                side: Side::Right,
                clause: "j >= 3"
            }
        );
    }

    #[test]
    fn long_example_decomposes() {
        let pi = p("2 5 9 3 1 4 8 6 10 12 17 7 11 16 13 15 19 22 20 18 14 21");
        let d = glue_decompose(&pi).unwrap();
        let factors: Vec<String> = d.factors.iter().map(|f| f.to_string()).collect();
        assert_eq!(
            factors,
            ["2573146", "514263", "246135", "6152473", "2475316"]
        );
        let types: Vec<String> = d.types.iter().map(|g| g.to_string()).collect();
        assert_eq!(types, ["NW1-0", "SE1-1", "NW1-0", "SE1-0"]);
        assert_eq!(d.reglue().unwrap(), pi);
        assert_eq!(d_sequence(&pi).unwrap(), vec![2, 1, 9, 7, 17, 14, 22, 21]);
        assert_eq!(
            d.to_json(),
            r#"{"factors":["2573146","514263","246135","6152473","2475316"],"types":[["NW",1,0],["SE",1,1],["NW",1,0],["SE",1,0]]}"#
        );
    }

    #[test]
    fn traces() {
        let t = trace(&p("2 10 4 1 3 7 5 9 6 11 8")).unwrap();
        assert_eq!(
            (t.p, t.q, t.q_prime, t.exit),
            (9, 3, None, TraceExit::Step4a)
        );
        let t = trace(&p("2 10 5 1 3 7 4 9 6 11 8")).unwrap();
        assert_eq!(
            (t.p, t.q, t.q_prime, t.exit),
            (9, 6, Some(5), TraceExit::Step4b)
        );
        let t = trace(&p("2 10 5 3 1 4 6 11 7 9 12 8")).unwrap();
        assert_eq!(t.q, t.r);
    }

    #[test]
    fn small_cases() {
        assert_eq!(d_sequence(&p("2413")).unwrap(), vec![2, 1, 4, 3]);
        assert!(matches!(
            d_sequence(&p("3142")),
            Err(GlueError::NotInDomain(_))
        ));
        assert!(membership(&p("2413"), Domain::H) && membership(&p("2413"), Domain::HPrime));
        assert!(!membership(&p("3142"), Domain::H) && !membership(&p("3142"), Domain::HPrime));
        assert!(membership(&p("25864137"), Domain::H));
        let d = glue_decompose(&p("2413")).unwrap();
        assert_eq!((d.m(), d.types.len()), (1, 0));
    }

    #[test]
    fn structure_reports() {
        let r = verify_structure(&p("25864137"));
        assert!(r.passed);
        assert_eq!(r.shape.as_deref(), Some("N"));
        let r = verify_structure(&p("3412"));
        assert!(!r.passed);
    }
}
