//! Word encodings of simple permutations.
//!
//! The smaller class uses `encode_a`/`decode_a` over the five-letter
//! alphabet. The larger class goes through a pipeline: glue decomposition,
//! one factor word per simple factor (`factor_encode`), joining the factor
//! words (`w_combine`) and rewriting the outer affixes (`affix_convert`).
//! `phi_prime` and `psi_prime` run the whole pipeline in each direction.
//!
//! Decoders place points with exact rational coordinates and flatten at the
//! end, so no tie-breaking is ever needed.

pub mod lang;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::glue::{
    extreme_pattern, glue, glue_all, glue_decompose, interchange_sum, membership, Domain,
    ExtremePattern, GlueError, GlueType, Orientation, SumMode,
};
use crate::perm::{perm, Perm};
use crate::simple::is_simple;
use crate::word::{format_word, Letter, Word};

pub use lang::{
    accepts, check_language, first_violation, l_bar_index, Language, LanguageReport, Violation,
    L_BAR_PREFIXES,
};

use Letter::*;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("{0} is not in H")]
    NotInH(String),
    #[error("{0} is not in H'")]
    NotInHPrime(String),
    #[error("{perm} is not a simple permutation of extreme pattern {expected}")]
    WrongShape {
        perm: String,
        expected: &'static str,
    },
    #[error("word is not in L: {0}")]
    NotInL(Violation),
    #[error("word is not in K1: {0}")]
    NotInK1(Violation),
    #[error("word is not in K3: {0}")]
    NotInK3(Violation),
    #[error("word is not in L': {0}")]
    NotInLPrime(Violation),
    #[error("join {index}: expected a suffix {expected_suffix} and a prefix {expected_prefix}")]
    JoinMismatch {
        index: usize,
        expected_suffix: String,
        expected_prefix: String,
    },
    #[error("{words} factor words need {} glue types, got {types}", words.saturating_sub(1))]
    Arity { words: usize, types: usize },
    #[error("no affix rule matches {0}")]
    UnknownAffix(String),
    #[error("malformed word: {0}")]
    Malformed(String),
    #[error(transparent)]
    Glue(#[from] GlueError),
}

/// The two kinds of factor: extreme pattern 2413 (`N`) and 3142 (`S`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shape {
    N,
    S,
}

impl Shape {
    /// Shape of the `k`-th factor (0-based) of a glue decomposition.
    pub fn of_factor(k: usize) -> Shape {
        if k % 2 == 0 {
            Shape::N
        } else {
            Shape::S
        }
    }

    fn pattern(self) -> ExtremePattern {
        match self {
            Shape::N => ExtremePattern::P2413,
            Shape::S => ExtremePattern::P3142,
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Shape::N => "N",
            Shape::S => "S",
        })
    }
}

impl FromStr for Shape {
    type Err = String;
    fn from_str(s: &str) -> Result<Shape, String> {
        match s.trim().to_ascii_uppercase().as_str() {
            "N" => Ok(Shape::N),
            "S" => Ok(Shape::S),
            _ => Err(format!("unknown shape {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

type Q = BigRational;

fn q(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

fn mid(a: &Q, b: &Q) -> Q {
    (a + b) / q(2)
}

/// Ranks distinct sort keys into a permutation.
fn rank<T: Ord>(keys: &[T]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    idx.sort_by(|&i, &j| keys[i].cmp(&keys[j]));
    let mut out = vec![0; keys.len()];
    for (r, i) in idx.into_iter().enumerate() {
        out[i] = r + 1;
    }
    out
}

/// Flattens points given as `(x, y)`.
fn flatten_points(points: &[(Q, Q)]) -> Perm {
    let xr = rank(&points.iter().map(|p| &p.0).collect::<Vec<_>>());
    let yr = rank(&points.iter().map(|p| &p.1).collect::<Vec<_>>());
    let mut line = vec![0; points.len()];
    for (k, &x) in xr.iter().enumerate() {
        line[x - 1] = yr[k];
    }
    Perm::from_one_line(&line).expect("ranks form a permutation")
}

// ---------------------------------------------------------------------------
// the smaller class

/// Encodes a member of H as a word of `L`.
pub fn encode_a(p: &Perm) -> Result<Word, CodecError> {
    if !membership(p, Domain::H) {
        return Err(CodecError::NotInH(p.to_string()));
    }
    let dec = glue_decompose(p)?;
    if dec.types.iter().any(|g| g.x != 1) {
        return Err(CodecError::NotInH(p.to_string()));
    }
    let origin = provenance(&dec.factors, &dec.types)?;
    let m = dec.factors.len();
    let mut comps: Vec<Vec<(usize, Letter)>> = vec![Vec::new(); m];
    for (q0, &(k, lp)) in origin.iter().enumerate() {
        let survivor = k + 1 < m && dec.types[k].y == 1;
        let shape = Shape::of_factor(k);
        if let Some(l) = component_letter(&dec.factors[k], lp, shape, survivor) {
            // N components are read bottom to top, S components left to right
            let key = match shape {
                Shape::N => p.at(q0 + 1),
                Shape::S => q0 + 1,
            };
            comps[k].push((key, l));
        }
    }
    let mut w = vec![D, D];
    for (k, mut c) in comps.into_iter().enumerate() {
        if k > 0 {
            w.push(D);
        }
        c.sort_unstable();
        w.extend(c.into_iter().map(|(_, l)| l));
    }
    w.extend([D, Dl]);
    Ok(w)
}

/// For every point of the glued permutation, the factor it comes from and its
/// position there. Only valid for glue sums of type 1-x.
fn provenance(factors: &[Perm], types: &[GlueType]) -> Result<Vec<(usize, usize)>, CodecError> {
    let mut acc = factors[0].clone();
    let mut org: Vec<(usize, usize)> = (1..=acc.len()).map(|p| (0, p)).collect();
    for (k, (f, &g)) in factors[1..].iter().zip(types).enumerate() {
        let next = glue(&acc, f, g)?;
        let m = acc.len();
        let keep = m - 1 + g.y as usize;
        let shift = m - 3 + g.y as usize;
        let norg = (1..=next.len())
            .map(|q| match g.orientation {
                Orientation::NW if q <= keep => org[q - 1],
                Orientation::NW => (k + 1, q - shift),
                Orientation::SE => {
                    let v = next.at(q);
                    if v <= keep {
                        org[acc.pos(v) - 1]
                    } else {
                        (k + 1, f.pos(v - shift))
                    }
                }
            })
            .collect();
        acc = next;
        org = norg;
    }
    Ok(org)
}

/// Letter of a factor point in its component, or `None` for the extreme
/// points, which become `d`. Under a following 1-1 glue one extreme survives
/// as a `c`.
fn component_letter(f: &Perm, p: usize, shape: Shape, survivor: bool) -> Option<Letter> {
    let n = f.len();
    let v = f.at(p);
    match shape {
        Shape::N => {
            let kept = survivor && p == n;
            if !kept && (p == 1 || p == n || v == 1 || v == n) {
                return None;
            }
            Some(if p < f.pos(n) {
                A
            } else if p < f.pos(1) {
                B
            } else {
                C
            })
        }
        Shape::S => {
            let kept = survivor && v == n;
            if !kept && (p == 1 || p == n || v == 1 || v == n) {
                return None;
            }
            Some(if v < f.at(n) {
                A
            } else if v < f.at(1) {
                B
            } else {
                C
            })
        }
    }
}

/// Decodes a word of `L` into a member of H.
pub fn decode_a(w: &[Letter]) -> Result<Perm, CodecError> {
    if let Some(v) = first_violation(w, Language::L) {
        return Err(CodecError::NotInL(v));
    }
    let body = &w[2..w.len() - 2];
    let comps: Vec<&[Letter]> = body.split(|&l| l == D).collect();
    let m = comps.len();

    let mut pts: Vec<(Q, Q)> = vec![(q(1), q(2)), (q(2), q(1))];
    let mut pa = (q(1), q(2));
    let mut pb = (q(2), q(1));
    let mut pc = pb.clone();
    let mut t = q(2);
    for (i, comp) in comps.iter().enumerate() {
        let odd = i % 2 == 0;
        for &l in comp.iter() {
            let pt = match (odd, l) {
                (true, C) => (&pc.0 + q(1), &t + q(1)),
                (true, _) => (mid(&pa.0, &pb.0), &t + q(1)),
                (false, C) => (&t + q(1), &pc.1 + q(1)),
                (false, _) => (&t + q(1), mid(&pa.1, &pb.1)),
            };
            t = if odd { pt.1.clone() } else { pt.0.clone() };
            match l {
                A => pa = pt.clone(),
                B => pb = pt.clone(),
                _ => pc = pt.clone(),
            }
            pts.push(pt);
        }
        if i + 1 < m {
            if odd {
                let pt = (mid(&pa.0, &pb.0), &t + q(1));
                pa = (pc.0.clone(), t.clone());
                t = pa.0.clone();
                pb = pt.clone();
                pc = pt.clone();
                pts.push(pt);
            } else {
                let pt = (&t + q(1), mid(&pa.1, &pb.1));
                pa = (t.clone(), pc.1.clone());
                t = pa.1.clone();
                pb = pt.clone();
                pc = pt.clone();
                pts.push(pt);
            }
        }
    }
    // the last d is drawn like a c and d_l like a b
    let odd = m % 2 == 1;
    let last_d = if odd {
        (&pc.0 + q(1), &t + q(1))
    } else {
        (&t + q(1), &pc.1 + q(1))
    };
    t = if odd {
        last_d.1.clone()
    } else {
        last_d.0.clone()
    };
    pts.push(last_d);
    pts.push(if odd {
        (mid(&pa.0, &pb.0), &t + q(1))
    } else {
        (&t + q(1), mid(&pa.1, &pb.1))
    });
    Ok(flatten_points(&pts))
}

// ---------------------------------------------------------------------------
// factor words

/// Encodes a simple factor of extreme pattern 2413 (`N`) or 3142 (`S`).
pub fn factor_encode(p: &Perm, shape: Shape) -> Result<Word, CodecError> {
    if extreme_pattern(p) != shape.pattern() || !is_simple(p) {
        return Err(CodecError::WrongShape {
            perm: p.to_string(),
            expected: shape_name(shape),
        });
    }
    Ok(encode_factor(p, shape))
}

fn shape_name(shape: Shape) -> &'static str {
    match shape {
        Shape::N => "2413",
        Shape::S => "3142",
    }
}

fn encode_factor(p: &Perm, shape: Shape) -> Word {
    match shape {
        Shape::N => n_encode(p),
        Shape::S => n_encode(&p.inverse()),
    }
}

/// Reads the values from 1 to n and writes one letter each.
fn n_encode(p: &Perm) -> Word {
    let n = p.len();
    let (pn, p1) = (p.pos(n), p.pos(1));
    let val = |k: usize| (1..=n).contains(&k).then(|| p.at(k));
    // some r > t sits left of some s < t, both inside positions lo..=hi
    let straddles = |lo: usize, hi: usize, t: usize| {
        let mut big = false;
        for k in lo..=hi {
            let v = p.at(k);
            if v > t {
                big = true;
            } else if v < t && big {
                return true;
            }
        }
        false
    };
    (1..=n)
        .map(|t| {
            let k = p.pos(t);
            let left = k.checked_sub(1).and_then(val);
            let right = val(k + 1);
            if k < pn || k > p1 {
                let (plain, one, two) = if k < pn { (A, A1, A2) } else { (C, C1, C2) };
                if left.is_some_and(|v| v > t) {
                    one
                } else if right.is_some_and(|v| v < t) {
                    two
                } else {
                    plain
                }
            } else if right.is_some_and(|v| v > t) && t != 1 {
                B1
            } else if left.is_some_and(|v| v < t) && t != n {
                B2
            } else if straddles(1, pn, t) || straddles(p1, n, t) {
                Bs
            } else {
                B
            }
        })
        .collect()
}

/// Decodes a word of `K1` into a factor of the given shape.
pub fn factor_decode(w: &[Letter], shape: Shape) -> Result<Perm, CodecError> {
    if let Some(v) = first_violation(w, Language::K1) {
        return Err(CodecError::NotInK1(v));
    }
    decode_factor(w, shape)
}

fn decode_factor(w: &[Letter], shape: Shape) -> Result<Perm, CodecError> {
    let p = n_decode(w)?;
    Ok(match shape {
        Shape::N => p,
        Shape::S => p.inverse(),
    })
}

/// Horizontal placement state of the factor decoder. The `y` coordinate of
/// every point is the index of its letter, because the encoder reads values
/// in increasing order.
struct Placer<'a> {
    w: &'a [Letter],
    x: Vec<Option<Q>>,
    pa: Q,
    pb: Q,
    pc: Q,
    pl: Option<Q>,
}

impl Placer<'_> {
    fn put(&mut self, k: usize, x: Q) -> Q {
        self.x[k] = Some(x.clone());
        x
    }

    fn malformed(&self, k: usize) -> CodecError {
        CodecError::Malformed(format!(
            "unexpected letter {} at {} in {}",
            self.w[k].token(),
            k + 1,
            format_word(self.w)
        ))
    }

    fn ell(&self, k: usize) -> Result<Q, CodecError> {
        self.pl.clone().ok_or_else(|| self.malformed(k))
    }

    /// The letters after an opening `b'`, up to its `b"` or a 312 chain.
    fn after_open(&mut self, mut k: usize) -> Result<usize, CodecError> {
        let n = self.w.len();
        if k < n && self.w[k] == A {
            let x = mid(&self.pa, &self.ell(k)?);
            self.pa = self.put(k, x);
            k += 1;
        }
        if k < n && self.w[k] == C {
            let x = &self.pc + q(1);
            self.pc = self.put(k, x);
            k += 1;
        }
        match self.w.get(k) {
            Some(B2) => {
                let pl = self.ell(k)?;
                let x = mid(&pl, &self.pb);
                self.put(k, x);
                self.pb = pl;
                Ok(k + 1)
            }
            Some(C1) => self.chain_312(k),
            _ => Err(self.malformed(k.min(n - 1))),
        }
    }

    /// The balanced run of primed letters starting at `k`, closing at the
    /// letter that equalises the counts.
    fn balanced_end(&self, k: usize, open: Letter, close: Letter) -> Result<usize, CodecError> {
        let mut depth = 0i32;
        for (j, &l) in self.w.iter().enumerate().skip(k) {
            if l == open {
                depth += 1;
            } else if l == close {
                depth -= 1;
                if depth == 0 {
                    return Ok(j);
                }
            }
        }
        Err(self.malformed(k))
    }

    /// Builds a chain from the letters at `idx` (in word order): repeatedly
    /// take the first `open`, the first `close` and a `mid` between them.
    fn chain(
        &self,
        idx: &[usize],
        open: Letter,
        close: Letter,
        inner: Letter,
        long: &Perm,
    ) -> Result<Perm, CodecError> {
        let mut left: Vec<usize> = idx.to_vec();
        let mut acc: Option<Perm> = None;
        while !left.is_empty() {
            let i1 = *left
                .iter()
                .find(|&&i| self.w[i] == open)
                .ok_or_else(|| self.malformed(left[0]))?;
            let i2 = *left
                .iter()
                .find(|&&i| self.w[i] == close && i > i1)
                .ok_or_else(|| self.malformed(i1))?;
            let im = left
                .iter()
                .copied()
                .find(|&i| self.w[i] == inner && i1 < i && i < i2);
            left.retain(|&i| i != i1 && i != i2 && Some(i) != im);
            let summand = if im.is_some() {
                long.clone()
            } else {
                perm("21")
            };
            acc = Some(match acc {
                None => summand,
                Some(a) => interchange_sum(&a, &summand, SumMode::Value)?,
            });
        }
        acc.ok_or_else(|| self.malformed(idx.first().copied().unwrap_or(0)))
    }

    fn chain_231(&mut self, k: usize) -> Result<usize, CodecError> {
        let e = self.balanced_end(k, A1, A2)?;
        let scissor = (k..=e)
            .find(|&i| matches!(self.w[i], Bs | B1))
            .ok_or_else(|| self.malformed(k))?;
        let idx: Vec<usize> = (k..=e).filter(|&i| i != scissor).collect();
        let c = self.chain(&idx, A1, A2, A, &perm("231"))?;
        let len = idx.len();
        let step = (&self.pb - &self.pa) / q(len as i64 + 1);
        for (r, &i) in idx.iter().enumerate() {
            let x = &self.pa + &step * q(c.pos(r + 1) as i64);
            self.put(i, x);
        }
        self.pa = &self.pa + &step * q(len as i64);
        let x = mid(&self.pa, &self.pb);
        let x = self.put(scissor, x);
        if self.w[scissor] == Bs {
            self.pb = x;
            Ok(e + 1)
        } else {
            self.pl = Some(x);
            self.after_open(e + 1)
        }
    }

    fn chain_312(&mut self, k: usize) -> Result<usize, CodecError> {
        let e = self.balanced_end(k, C1, C2)?;
        let scissor = k + 1;
        if !matches!(self.w.get(scissor), Some(Bs | B2)) {
            return Err(self.malformed(k));
        }
        let idx: Vec<usize> = (k..=e).filter(|&i| i != scissor).collect();
        let c = self.chain(&idx, C1, C2, C, &perm("312"))?;
        for (r, &i) in idx.iter().enumerate() {
            let x = &self.pc + q(c.pos(r + 1) as i64);
            self.put(i, x);
        }
        self.pc = &self.pc + q(idx.len() as i64);
        if self.w[scissor] == Bs {
            let x = mid(&self.pa, &self.pb);
            self.pb = self.put(scissor, x);
        } else {
            let pl = self.ell(scissor)?;
            let x = mid(&pl, &self.pb);
            self.put(scissor, x);
            self.pb = pl;
        }
        Ok(e + 1)
    }
}

fn n_decode(w: &[Letter]) -> Result<Perm, CodecError> {
    let n = w.len();
    if n == 0 || w[0] != B {
        return Err(CodecError::Malformed(format!(
            "factor word must start with b: {}",
            format_word(w)
        )));
    }
    let mut pl = Placer {
        w,
        x: vec![None; n],
        pa: q(0),
        pb: q(1),
        pc: q(1),
        pl: None,
    };
    pl.put(0, q(1));
    let mut k = 1;
    while k < n {
        k = match w[k] {
            A1 => pl.chain_231(k)?,
            B1 => {
                let x = mid(&pl.pa, &pl.pb);
                pl.pl = Some(pl.put(k, x));
                pl.after_open(k + 1)?
            }
            C1 => pl.chain_312(k)?,
            A => {
                let x = mid(&pl.pa, &pl.pb);
                pl.pa = pl.put(k, x);
                k + 1
            }
            B => {
                let x = mid(&pl.pa, &pl.pb);
                pl.pb = pl.put(k, x);
                k + 1
            }
            C => {
                let x = &pl.pc + q(1);
                pl.pc = pl.put(k, x);
                k + 1
            }
            _ => return Err(pl.malformed(k)),
        };
    }
    let xs: Vec<Q> =
        pl.x.into_iter()
            .map(|x| x.expect("every letter placed"))
            .collect();
    let pts: Vec<(Q, Q)> = xs
        .into_iter()
        .enumerate()
        .map(|(i, x)| (x, q(i as i64)))
        .collect();
    Ok(flatten_points(&pts))
}

// ---------------------------------------------------------------------------
// joining factor words

fn ends(w: &[Letter], s: &[Letter]) -> bool {
    w.ends_with(s)
}

fn replace_last(w: &mut [Letter], from: Letter, to: Letter) -> bool {
    match w.iter().rposition(|&l| l == from) {
        Some(i) => {
            w[i] = to;
            true
        }
        None => false,
    }
}

fn replace_first(w: &mut [Letter], from: Letter, to: Letter) -> bool {
    match w.iter().position(|&l| l == from) {
        Some(i) => {
            w[i] = to;
            true
        }
        None => false,
    }
}

/// Length of a prefix `b a' a (a'a" | a'a"a)*` of `w`, if present.
fn chain_prefix_len(w: &[Letter]) -> Option<usize> {
    if !w.starts_with(&[B, A1, A]) {
        return None;
    }
    let mut k = 3;
    while w[k..].starts_with(&[A1, A2]) {
        k += 2;
        if w.get(k) == Some(&A) {
            k += 1;
        }
    }
    Some(k)
}

/// Joins factor words along glue types of the given variants into one word.
pub fn w_combine(words: &[Word], types: &[GlueType]) -> Result<Word, CodecError> {
    if words.is_empty() || types.len() + 1 != words.len() {
        return Err(CodecError::Arity {
            words: words.len(),
            types: types.len(),
        });
    }
    let mut w = words[0].clone();
    for (i, (next, g)) in words[1..].iter().zip(types).enumerate() {
        let mismatch = |suffix: &str, prefix: &str| CodecError::JoinMismatch {
            index: i + 1,
            expected_suffix: suffix.to_string(),
            expected_prefix: prefix.to_string(),
        };
        let mut next = next.clone();
        match (g.x, g.y) {
            (1, y) => {
                if !ends(&w, &[C, B]) || !next.starts_with(&[B, A]) {
                    return Err(mismatch("c b", "b a"));
                }
                w.truncate(w.len() - 2 + y as usize);
                w.push(D);
                next.drain(..2);
            }
            (2, y) => {
                if !next.starts_with(&[B, A]) {
                    return Err(mismatch("c b\" b", "b a"));
                }
                let mid = match w.len().checked_sub(2).map(|k| w[k]) {
                    Some(m @ (B2 | BU | Y2)) if ends(&w, &[C, m, B]) => m,
                    _ => return Err(mismatch("c b\" b", "b a")),
                };
                w.truncate(w.len() - 3 + y as usize);
                w.extend([DU, D]);
                match mid {
                    B2 => {
                        replace_last(&mut w, B1, BO);
                    }
                    Y2 => {
                        replace_last(&mut w, Y1, YO);
                    }
                    _ => {}
                }
                next.drain(..2);
            }
            (3, 0) => {
                let second = match w.len().checked_sub(4).map(|k| w[k]) {
                    Some(s @ (Bs | B2 | BU | C2 | Y2)) if ends(&w, &[C1, s, C, C2, B]) => s,
                    _ => return Err(mismatch("c' b_s c c\" b", "b a' a")),
                };
                let k = chain_prefix_len(&next).ok_or_else(|| mismatch("c c\" b", "b a' a"))?;
                let sc = match next.get(k..k + 2) {
                    Some([s @ (Bs | B1), A2]) => *s,
                    _ => return Err(mismatch("c c\" b", "b a' a")),
                };
                w.truncate(w.len() - 5);
                let x = match second {
                    Bs => X,
                    B2 => X2,
                    BU => XU,
                    other => other,
                };
                w.extend([Z, x, D]);
                if second == B2 {
                    replace_last(&mut w, B1, X1);
                }
                next.drain(..k + 2);
                if sc == Bs {
                    next.insert(0, Y);
                } else {
                    next.insert(0, Y1);
                    replace_first(&mut next, B2, Y2);
                }
            }
            (4, 0) => {
                if !next.starts_with(&[B, B1, A]) {
                    return Err(mismatch("c' b_s c\" b", "b b' a"));
                }
                let second = match w.len().checked_sub(3).map(|k| w[k]) {
                    Some(s @ (Bs | B2 | BU | Y2)) if ends(&w, &[C1, s, C2, B]) => s,
                    _ => return Err(mismatch("c' b_s c\" b", "b b' a")),
                };
                w.truncate(w.len() - 4);
                w.extend([if second == Bs { DO } else { DUO }, D]);
                match second {
                    B2 => {
                        replace_last(&mut w, B1, BO);
                    }
                    Y2 => {
                        replace_last(&mut w, Y1, YO);
                    }
                    _ => {}
                }
                next.drain(..3);
                replace_first(&mut next, B2, BU);
            }
            (x, y) => return Err(GlueError::UnknownGlueType(format!("{x}-{y}")).into()),
        }
        w.extend(next);
    }
    Ok(w)
}

/// Splits a word of `K3` back into factor words and glue types. The types
/// alternate NW, SE, NW, ... from the left.
pub fn w_decompose(w: &[Letter]) -> Result<(Vec<Word>, Vec<GlueType>), CodecError> {
    if let Some(v) = first_violation(w, Language::K3) {
        return Err(CodecError::NotInK3(v));
    }
    split_words(w)
}

fn split_words(w: &[Letter]) -> Result<(Vec<Word>, Vec<GlueType>), CodecError> {
    let bad = |what: &str| CodecError::Malformed(format!("{what} in {}", format_word(w)));
    let mut cur = w.to_vec();
    let mut parts: Vec<Word> = Vec::new();
    let mut kinds: Vec<(u8, u8)> = Vec::new();
    while let Some(dpos) = cur.iter().rposition(|&l| l == D) {
        let tail = cur[dpos + 1..].to_vec();
        let mut left = cur[..dpos].to_vec();
        let prev = left.last().copied();
        let before = left.len().checked_sub(2).map(|k| left[k]);
        let (right, kind) = match prev {
            Some(DU) => {
                left.pop();
                let o = left
                    .iter()
                    .rposition(|l| matches!(l, BO | YO | DO | DUO))
                    .ok_or_else(|| bad("no overline"))?;
                let tail_letters = match left[o] {
                    BO => {
                        left[o] = B1;
                        [B2, B]
                    }
                    YO => {
                        left[o] = Y1;
                        [Y2, B]
                    }
                    _ => [BU, B],
                };
                let y = u8::from(left.last() == Some(&C));
                if y == 0 {
                    left.push(C);
                }
                left.extend(tail_letters);
                ([vec![B, A], tail].concat(), (2, y))
            }
            Some(s @ (X | X2 | XU | C2 | Y2)) if before == Some(Z) => {
                let mut v = tail;
                match v.first() {
                    Some(Y) => {
                        v.splice(0..1, [Bs, A2]);
                    }
                    Some(Y1) => {
                        v.splice(0..1, [B1, A2]);
                        replace_first(&mut v, Y2, B2);
                    }
                    _ => return Err(bad("type 3-0 join without y")),
                }
                let mut u = vec![B, A1, A];
                if s == C2 {
                    u.extend(chain_groups(&left).ok_or_else(|| bad("broken c' chain"))?);
                }
                u.extend(v);
                left.truncate(left.len() - 2);
                let second = match s {
                    X => Bs,
                    X2 => {
                        replace_last(&mut left, X1, B1);
                        B2
                    }
                    XU => BU,
                    other => other,
                };
                left.extend([C1, second, C, C2, B]);
                (u, (3, 0))
            }
            Some(s @ (DO | DUO)) => {
                left.pop();
                let second = if s == DO {
                    Bs
                } else {
                    let o = left
                        .iter()
                        .rposition(|l| matches!(l, BO | YO | DO | DUO))
                        .ok_or_else(|| bad("no overline"))?;
                    match left[o] {
                        BO => {
                            left[o] = B1;
                            B2
                        }
                        YO => {
                            left[o] = Y1;
                            Y2
                        }
                        _ => BU,
                    }
                };
                left.extend([C1, second, C2, B]);
                let mut right = vec![B, B1, A];
                right.extend(tail);
                replace_first(&mut right[3..], BU, B2);
                (right, (4, 0))
            }
            _ => {
                let y = u8::from(prev == Some(C));
                if y == 0 {
                    left.push(C);
                }
                left.push(B);
                ([vec![B, A], tail].concat(), (1, y))
            }
        };
        parts.push(right);
        kinds.push(kind);
        cur = left;
    }
    parts.push(cur);
    parts.reverse();
    kinds.reverse();
    let types = kinds
        .into_iter()
        .enumerate()
        .map(|(k, (x, y))| {
            let o = if k % 2 == 0 {
                Orientation::NW
            } else {
                Orientation::SE
            };
            GlueType::new(o, x, y)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((parts, types))
}

/// For a word ending `... z c"` (the `d` already removed), the `a' a" [a]`
/// groups mirroring the c' chain the final `z c"` belongs to.
fn chain_groups(left: &[Letter]) -> Option<Vec<Letter>> {
    let n = left.len();
    // final group: z c" or c z c"
    let mut k = n - 2;
    let mut groups = vec![k > 0 && left[k - 1] == C];
    if groups[0] {
        k -= 1;
    }
    // earlier groups: c' c" or c c' c", back to the head c' s
    loop {
        if k >= 2 && left[k - 2] == C1 && left[k - 1] == C2 {
            k -= 2;
            let with_c = k > 0 && left[k - 1] == C;
            if with_c {
                k -= 1;
            }
            groups.push(with_c);
        } else if k >= 2 && left[k - 2] == C1 && matches!(left[k - 1], Bs | B2 | BU | Y2) {
            break;
        } else {
            return None;
        }
    }
    groups.reverse();
    Some(
        groups
            .into_iter()
            .flat_map(|c| if c { vec![A1, A2, A] } else { vec![A1, A2] })
            .collect(),
    )
}

// ---------------------------------------------------------------------------
// affixes

const PREFIXES: [(&str, &str); 10] = [
    ("b a", "d d"),
    ("b b' a", "d b' d"),
    ("b a' a", "d a' d"),
    ("b a' bs a\"", "d da' bs da\""),
    ("b a' b' a\"", "d da' b' da\""),
    ("b a' a' a\"", "d da' a' da\""),
    ("b b^ a", "d b^ d"),
    ("b a' b^ a\"", "d da' b^ da\""),
    ("b x' a", "d x' d"),
    ("b a' x' a\"", "d da' x' da\""),
];

const SUFFIXES: [(&str, &str); 10] = [
    ("c b", "d dl"),
    ("c b\" b", "d b\" dl"),
    ("c c\" b", "d c\" dl"),
    ("c' bs c\" b", "dc' bs dc\" dl"),
    ("c' b\" c\" b", "dc' b\" dc\" dl"),
    ("c' c\" c\" b", "dc' c\" dc\" dl"),
    ("c b_ b", "d b_ dl"),
    ("c' b_ c\" b", "dc' b_ dc\" dl"),
    ("c y\" b", "d y\" dl"),
    ("c' y\" c\" b", "dc' y\" dc\" dl"),
];

/// Rewrites the prefix and suffix of a word (`Forward`: `K3` to `L'`).
pub fn affix_convert(w: &[Letter], direction: Direction) -> Result<Word, CodecError> {
    let pick = |(from, to): (&str, &str)| {
        let (from, to) = (crate::word::word(from), crate::word::word(to));
        match direction {
            Direction::Forward => (from, to),
            Direction::Backward => (to, from),
        }
    };
    let unknown = || CodecError::UnknownAffix(format_word(w));
    let prefix = PREFIXES
        .iter()
        .map(|&r| pick(r))
        .filter(|(f, _)| w.starts_with(f))
        .max_by_key(|(f, _)| f.len());
    let suffix = SUFFIXES
        .iter()
        .map(|&r| pick(r))
        .filter(|(f, _)| w.ends_with(f))
        .max_by_key(|(f, _)| f.len());
    let ((pf, pt), (sf, st)) = (prefix.ok_or_else(unknown)?, suffix.ok_or_else(unknown)?);
    if pf.len() + sf.len() > w.len() {
        return Err(unknown());
    }
    let mut out = pt;
    out.extend_from_slice(&w[pf.len()..w.len() - sf.len()]);
    out.extend(st);
    Ok(out)
}

// ---------------------------------------------------------------------------
// the larger class

/// Encodes a member of H' as a word of `L'`.
pub fn phi_prime(p: &Perm) -> Result<Word, CodecError> {
    if !membership(p, Domain::HPrime) {
        return Err(CodecError::NotInHPrime(p.to_string()));
    }
    let dec = glue_decompose(p)?;
    let words: Vec<Word> = dec
        .factors
        .iter()
        .enumerate()
        .map(|(k, f)| encode_factor(f, Shape::of_factor(k)))
        .collect();
    affix_convert(&w_combine(&words, &dec.types)?, Direction::Forward)
}

/// Decodes a word of `L'` into a member of H'.
pub fn psi_prime(w: &[Letter]) -> Result<Perm, CodecError> {
    if let Some(v) = first_violation(w, Language::LPrime) {
        return Err(CodecError::NotInLPrime(v));
    }
    let inner = affix_convert(w, Direction::Backward)?;
    let (words, types) = split_words(&inner)?;
    let factors = words
        .iter()
        .enumerate()
        .map(|(k, fw)| decode_factor(fw, Shape::of_factor(k)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(glue_all(&factors, &types)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::word;

    const BIG: &str = "2 5 9 3 1 4 8 6 10 12 17 7 11 16 13 15 19 22 20 18 14 21";
    const BIG_WORD: &str = "d d b c a d b a c d c a d b a b d b a b d dl";

    #[test]
    fn smaller_class_examples() {
        assert_eq!(encode_a(&perm(BIG)).unwrap(), word(BIG_WORD));
        assert_eq!(decode_a(&word(BIG_WORD)).unwrap(), perm(BIG));
        assert_eq!(encode_a(&perm("2413")).unwrap(), word("d d d dl"));
        assert_eq!(decode_a(&word("d d d dl")).unwrap(), perm("2413"));
        assert!(matches!(
            encode_a(&perm("3142")),
            Err(CodecError::NotInH(_))
        ));
        assert!(matches!(
            decode_a(&word("d d b d a d dl")),
            Err(CodecError::NotInL(_))
        ));
    }

    #[test]
    fn factor_examples() {
        assert_eq!(
            factor_encode(&perm("2413"), Shape::N).unwrap(),
            word("b a c b")
        );
        assert_eq!(
            factor_encode(&perm("25314"), Shape::N).unwrap(),
            word("b a b c b")
        );
        assert_eq!(
            factor_encode(&perm("3142"), Shape::S).unwrap(),
            word("b a c b")
        );
        assert!(matches!(
            factor_encode(&perm("3142"), Shape::N),
            Err(CodecError::WrongShape { .. })
        ));
        assert_eq!(
            factor_decode(&word("b a c b"), Shape::N).unwrap(),
            perm("2413")
        );
        assert_eq!(
            factor_decode(&word("b a b c b"), Shape::N).unwrap(),
            perm("25314")
        );
        assert!(matches!(
            factor_decode(&word("b a a c b"), Shape::N),
            Err(CodecError::NotInK1(_))
        ));
    }

    #[test]
    fn affixes() {
        assert_eq!(
            affix_convert(&word("b a c b"), Direction::Forward).unwrap(),
            word("d d d dl")
        );
        assert_eq!(
            affix_convert(&word("d d d dl"), Direction::Backward).unwrap(),
            word("b a c b")
        );
        assert_eq!(
            affix_convert(&word("b a' bs a\" c b"), Direction::Forward).unwrap(),
            word("d da' bs da\" d dl")
        );
        assert!(matches!(
            affix_convert(&word("a c b"), Direction::Forward),
            Err(CodecError::UnknownAffix(_))
        ));
        assert!(matches!(
            affix_convert(&word("b a b"), Direction::Forward),
            Err(CodecError::UnknownAffix(_))
        ));
    }

    #[test]
    fn combine_type_one_and_two() {
        let nw10 = GlueType::nw(1, 0);
        assert_eq!(
            w_combine(&[word("b a c b"), word("b a c b")], &[nw10]).unwrap(),
            word("b a d c b")
        );
        let nw20 = GlueType::nw(2, 0);
        assert_eq!(
            w_combine(&[word("b b' a c b\" b"), word("b a c b")], &[nw20]).unwrap(),
            word("b b^ a d_ d c b")
        );
        let err = w_combine(&[word("b a c b"), word("b b' a c b\" b")], &[nw10]).unwrap_err();
        assert!(matches!(err, CodecError::JoinMismatch { index: 1, .. }));
        assert!(matches!(
            w_combine(&[word("b a c b")], &[nw10]),
            Err(CodecError::Arity { .. })
        ));
    }

    #[test]
    fn single_factor_pipeline() {
        assert_eq!(phi_prime(&perm("2413")).unwrap(), word("d d d dl"));
        assert_eq!(psi_prime(&word("d d d dl")).unwrap(), perm("2413"));
        let (ws, ts) = w_decompose(&word("b a c b")).unwrap();
        assert_eq!(ws, vec![word("b a c b")]);
        assert!(ts.is_empty());
    }
}
