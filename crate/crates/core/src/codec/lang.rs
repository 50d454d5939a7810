//! Condition checkers for the word languages: `L` and `L_bar` for the
//! smaller class, and `K1`, `K3`, `L'` and the ten `L_bar_i` for the larger
//! one.
//!
//! Every language is a numbered list of conditions. A condition is a set of
//! rules over regular patterns; the checker reports the first condition that
//! fails. Condition 0 is the alphabet. The checkers share nothing with the
//! automata, so the two can be compared against each other.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use regex::Regex;
use serde::Serialize;

use crate::word::{Letter, Word};

/// The languages that can be checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Language {
    L,
    LBar,
    K1,
    K3,
    LPrime,
    /// `L_bar_i` for `i` in `1..=10`.
    LBarI(u8),
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Language::L => f.write_str("L"),
            Language::LBar => f.write_str("L_bar"),
            Language::K1 => f.write_str("K1"),
            Language::K3 => f.write_str("K3"),
            Language::LPrime => f.write_str("L_prime"),
            Language::LBarI(i) => write!(f, "L_bar_{i}"),
        }
    }
}

impl FromStr for Language {
    type Err = String;
    fn from_str(s: &str) -> Result<Language, String> {
        let t = s.trim();
        match t {
            "L" => Ok(Language::L),
            "L_bar" | "Lbar" => Ok(Language::LBar),
            "K1" => Ok(Language::K1),
            "K3" => Ok(Language::K3),
            "L_prime" | "Lprime" | "L'" => Ok(Language::LPrime),
            _ => {
                let i = t
                    .strip_prefix("L_bar_")
                    .or_else(|| t.strip_prefix("Lbar"))
                    .and_then(|r| r.parse::<u8>().ok())
                    .filter(|i| (1..=10).contains(i));
                i.map(Language::LBarI)
                    .ok_or_else(|| format!("unknown language {s:?}"))
            }
        }
    }
}

/// A failed numbered condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub number: u8,
    pub name: &'static str,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "condition {} ({})", self.number, self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LanguageReport {
    pub language: String,
    pub passed: bool,
    pub violated: Option<Violation>,
}

/// The prefixes stripped from words of `L'` to obtain `L_bar_1 .. L_bar_10`.
pub const L_BAR_PREFIXES: [&str; 10] = [
    "d d",
    "d da' bs da\"",
    "d a' d",
    "d da' a' da\"",
    "d b' d",
    "d da' b' da\"",
    "d x' d",
    "d da' x' da\"",
    "d b^ d",
    "d da' b^ da\"",
];

pub fn check_language(w: &[Letter], lang: Language) -> LanguageReport {
    LanguageReport {
        language: lang.to_string(),
        passed: first_violation(w, lang).is_none(),
        violated: first_violation(w, lang),
    }
}

/// The first condition of `lang` that `w` breaks, if any.
pub fn first_violation(w: &[Letter], lang: Language) -> Option<Violation> {
    match lang {
        Language::L => run(&rules().l, w),
        Language::LBar => run(&rules().l, &prefixed("d d", w)),
        Language::K1 => run(&rules().k1, w),
        Language::K3 => run(&rules().k3, w),
        Language::LPrime => run(&rules().l_prime, w),
        Language::LBarI(i) => {
            let Some(p) = (i as usize)
                .checked_sub(1)
                .and_then(|k| L_BAR_PREFIXES.get(k))
            else {
                return Some(Violation {
                    number: 0,
                    name: "prefix index",
                });
            };
            if w.iter().any(|l| matches!(l, Letter::Da1 | Letter::Da2)) {
                return Some(Violation {
                    number: 0,
                    name: "alphabet",
                });
            }
            run(&rules().l_prime, &prefixed(p, w))
        }
    }
}

pub fn accepts(w: &[Letter], lang: Language) -> bool {
    first_violation(w, lang).is_none()
}

/// Which of the ten prefixes a word of `L'` starts with, as `i` in `1..=10`,
/// together with the prefix length.
pub fn l_bar_index(w: &[Letter]) -> Option<(u8, usize)> {
    // longest first: "d d" is a prefix of none of the others, but keep the
    // search independent of the table order
    let mut best: Option<(u8, usize)> = None;
    for (k, p) in L_BAR_PREFIXES.iter().enumerate() {
        let p = crate::word::word(p);
        if w.starts_with(&p) && best.is_none_or(|(_, len)| p.len() > len) {
            best = Some((k as u8 + 1, p.len()));
        }
    }
    best
}

fn prefixed(p: &str, w: &[Letter]) -> Word {
    let mut v = crate::word::word(p);
    v.extend_from_slice(w);
    v
}

// ---------------------------------------------------------------------------
// patterns

/// Letters are mapped to single Greek characters so that `regex` can work on
/// them; each takes two bytes in UTF-8.
fn glyph(l: Letter) -> char {
    char::from_u32(0x3B1 + l.index() as u32).expect("valid code point")
}

fn glyphs(w: &[Letter]) -> String {
    w.iter().map(|&l| glyph(l)).collect()
}

/// Where a pattern may sit in the word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Span {
    Any,
    Prefix,
    Suffix,
    Whole,
}

#[derive(Debug, Clone)]
struct Pattern {
    span: Span,
    re: Regex,
}

/// Compiles a pattern written with letter tokens and `( ) | * ?`, e.g.
/// `"( a' | a' a ) ( a' a\" )* bs a\""`. A leading `^ ` ties the pattern to
/// the start of the word and a trailing ` $` to its end.
fn pat(src: &str) -> Pattern {
    let mut s = src.trim();
    let mut at_start = false;
    let mut at_end = false;
    if let Some(r) = s.strip_prefix("^ ") {
        s = r;
        at_start = true;
    }
    if let Some(r) = s.strip_suffix(" $") {
        s = r;
        at_end = true;
    }
    let span = match (at_start, at_end) {
        (false, false) => Span::Any,
        (true, false) => Span::Prefix,
        (false, true) => Span::Suffix,
        (true, true) => Span::Whole,
    };
    let mut re = String::from("^(?:");
    let mut tok = String::new();
    let flush = |tok: &mut String, re: &mut String| {
        if !tok.is_empty() {
            let l: Letter = tok
                .parse()
                .unwrap_or_else(|_| panic!("bad letter {tok:?} in pattern {src:?}"));
            re.push(glyph(l));
            tok.clear();
        }
    };
    for ch in s.chars() {
        match ch {
            '(' | ')' | '|' | '*' | '?' | '.' => {
                flush(&mut tok, &mut re);
                re.push_str(if ch == '(' { "(?:" } else { "" });
                if ch != '(' {
                    re.push(ch);
                }
            }
            c if c.is_whitespace() => flush(&mut tok, &mut re),
            c => tok.push(c),
        }
    }
    flush(&mut tok, &mut re);
    re.push_str(")$");
    Pattern {
        span,
        re: Regex::new(&re).unwrap_or_else(|e| panic!("pattern {src:?}: {e}")),
    }
}

/// Expands the shorthands used in the condition lists.
fn expand(src: &str) -> String {
    const MACROS: [(&str, &str); 8] = [
        ("A_TAIL3", "( bs a\" | b' a\" | b^ a\" | x' a\" )"),
        ("A_MID", "( a' a\" | a' a\" a )*"),
        ("C_HEAD3", "( c' bs | c' b\" | c' b_ | c' y\" )"),
        ("C_MID", "( c' c\" | c c' c\" )*"),
        ("V1", "( z x | z x_ | z c\" | z y\" | x' a\"? a? c? z x\" )"),
        ("V2", "( y | y^ | y' a? c? ( y\" | c' y\" | z y\" ) )"),
        ("DUND", "( d_ d | d_^ d )"),
        ("DBAR", "( d^ d | d_^ d )"),
    ];
    let mut out = src.to_string();
    for (k, v) in MACROS {
        out = out.replace(k, v);
    }
    out
}

fn pats(srcs: &[&str]) -> Vec<Pattern> {
    srcs.iter().map(|s| pat(&expand(s))).collect()
}

// ---------------------------------------------------------------------------
// rules

#[derive(Debug, Clone)]
enum Rule {
    Alphabet(Vec<Letter>),
    /// Some pattern occurs within its span.
    Exists(Vec<Pattern>),
    /// No pattern occurs within its span.
    Absent(Vec<Pattern>),
    /// Every occurrence of the letters lies inside an occurrence of one of
    /// the patterns.
    Cover(Vec<Letter>, Vec<Pattern>),
    Forbid(Vec<Word>),
}

struct Condition {
    number: u8,
    name: &'static str,
    rules: Vec<Rule>,
}

struct Rules {
    l: Vec<Condition>,
    k1: Vec<Condition>,
    k3: Vec<Condition>,
    l_prime: Vec<Condition>,
}

fn cond(number: u8, name: &'static str, rules: Vec<Rule>) -> Condition {
    Condition {
        number,
        name,
        rules,
    }
}

fn letters(text: &str) -> Vec<Letter> {
    crate::word::word(text)
}

fn forbid(words: &[&str]) -> Rule {
    Rule::Forbid(words.iter().map(|w| letters(w)).collect())
}

fn rules() -> &'static Rules {
    static RULES: OnceLock<Rules> = OnceLock::new();
    RULES.get_or_init(build_rules)
}

const SIGMA1: &str = "a a' a\" b bs b' b\" c c' c\"";
const SIGMA2_EXTRA: &str = "b_ b^ d d_ d^ d_^ x x' x\" x_ y y' y\" y^ z";

fn build_rules() -> Rules {
    let l = vec![
        cond(0, "alphabet", vec![Rule::Alphabet(Letter::SMALL.to_vec())]),
        cond(
            1,
            "begins with dd and ends with dd_l",
            vec![Rule::Exists(pats(&["^ d d .* d dl $"]))],
        ),
        cond(2, "no aa, bb or cc", vec![forbid(&["a a", "b b", "c c"])]),
        cond(
            3,
            "d_l only at the very end",
            vec![Rule::Cover(letters("dl"), pats(&["dl $"]))],
        ),
        cond(
            4,
            "does not begin with dda or end with cdd_l",
            vec![Rule::Absent(pats(&["^ d d a", "c d dl $"]))],
        ),
        cond(5, "no da", vec![forbid(&["d a"])]),
    ];

    let k1_prefixes = [
        "^ b a",
        "^ b b' a",
        "^ b a' a",
        "^ b a' bs a\"",
        "^ b a' b' a\"",
        "^ b a' a' a\"",
    ];
    let k1_suffixes = [
        "c b $",
        "c b\" b $",
        "c c\" b $",
        "c' bs c\" b $",
        "c' b\" c\" b $",
        "c' c\" c\" b $",
    ];
    let k1_a = "( a' | a' a ) A_MID ( bs a\" | b' a\" )";
    let k1_c = "( c' bs | c' b\" ) C_MID ( c\" | c c\" )";
    let b_pair = "b' ( a\" a? c? c'? | a c? c'? | c c'? | c' ) b\"";
    let k1 = vec![
        cond(0, "alphabet", vec![Rule::Alphabet(letters(SIGMA1))]),
        cond(1, "prefix", vec![Rule::Exists(pats(&k1_prefixes))]),
        cond(2, "suffix", vec![Rule::Exists(pats(&k1_suffixes))]),
        cond(
            3,
            "a' and a\" chains",
            vec![Rule::Cover(letters("a' a\""), pats(&[k1_a]))],
        ),
        cond(
            4,
            "c' and c\" chains",
            vec![Rule::Cover(letters("c' c\""), pats(&[k1_c]))],
        ),
        cond(
            5,
            "b_s only as a scissor",
            vec![Rule::Cover(letters("bs"), pats(&[k1_a, k1_c]))],
        ),
        cond(
            6,
            "b' and b\" pairs",
            vec![Rule::Cover(letters("b' b\""), pats(&[b_pair]))],
        ),
        cond(7, "no aa, bb or cc", vec![forbid(&["a a", "b b", "c c"])]),
    ];

    let mut k3_prefixes = k1_prefixes.to_vec();
    k3_prefixes.extend(["^ b b^ a", "^ b a' b^ a\"", "^ b x' a", "^ b a' x' a\""]);
    let mut k3_suffixes = k1_suffixes.to_vec();
    k3_suffixes.extend(["c b_ b $", "c' b_ c\" b $", "c y\" b $", "c' y\" c\" b $"]);
    let k3_a = "( a' | a' a ) A_MID A_TAIL3";
    let k3_c = "C_HEAD3 C_MID ( c\" | c c\" | z c\" | c z c\" )";
    let xyz = "x x' x\" x_ y y' y\" y^ z";
    let k3 = vec![
        cond(
            0,
            "alphabet",
            vec![Rule::Alphabet(letters(&format!("{SIGMA1} {SIGMA2_EXTRA}")))],
        ),
        cond(1, "prefix", vec![Rule::Exists(pats(&k3_prefixes))]),
        cond(2, "suffix", vec![Rule::Exists(pats(&k3_suffixes))]),
        cond(
            3,
            "a' and a\" chains",
            vec![Rule::Cover(letters("a' a\""), pats(&[k3_a]))],
        ),
        cond(
            4,
            "c' and c\" chains",
            vec![Rule::Cover(letters("c' c\""), pats(&[k3_c]))],
        ),
        cond(
            5,
            "b_s only as a scissor",
            vec![Rule::Cover(letters("bs"), pats(&[k3_a, k3_c]))],
        ),
        cond(
            6,
            "b' and b\" pairs",
            vec![Rule::Cover(letters("b' b\""), pats(&[b_pair]))],
        ),
        cond(
            7,
            "overlines and underlines",
            vec![
                Rule::Cover(letters("b^"), pats(&["b^ a\"? a? c? DUND"])),
                Rule::Cover(letters("y^"), pats(&["y^ a? c? DUND"])),
                Rule::Cover(
                    letters("d^ d_^"),
                    pats(&["DBAR c? c'? b_", "DBAR c? z x_", "DBAR c? DUND"]),
                ),
            ],
        ),
        cond(
            8,
            "x, y and z",
            vec![Rule::Cover(letters(xyz), pats(&["V1 d V2"]))],
        ),
        cond(
            9,
            "no aa, bb, cc or da",
            vec![forbid(&["a a", "b b", "c c", "d a"])],
        ),
    ];

    let lp_prefixes = [
        "^ d d",
        "^ d da' bs da\"",
        "^ d a' d A_MID A_TAIL3",
        "^ d da' a' da\" a? A_MID A_TAIL3",
        "^ d b' d ( c? c'? b\" | d b\" dl | c? dc' b\" dc\" dl )",
        "^ d da' b' da\" a? ( c? c'? b\" | d b\" dl | c? dc' b\" dc\" dl )",
        "^ d b^ d c? DUND",
        "^ d da' b^ da\" a? c? DUND",
        "^ d x' d c? z x\" d V2",
        "^ d da' x' da\" a? c? z x\" d V2",
    ];
    let lp_suffixes = [
        "d dl $",
        "( b' a\"? a? d | ^ d b' d d | ^ d da' b' da\" a? d ) b\" dl $",
        "C_HEAD3 C_MID d c\" dl $",
        "dc' bs dc\" dl $",
        "( b' a\"? a? c? | ^ d b' d c? | ^ d da' b' da\" a? c? ) dc' b\" dc\" dl $",
        "C_HEAD3 C_MID c? dc' c\" dc\" dl $",
        "DBAR d b_ dl $",
        "DBAR c? dc' b_ dc\" dl $",
        "V1 d ( y' | y' a ) d y\" dl $",
        "V1 d y' a? c? dc' y\" dc\" dl $",
    ];
    let lp_a = "( a' | a' a ) A_MID A_TAIL3";
    let lp_c = "C_HEAD3 C_MID ( c\" | c c\" | z c\" | c z c\" )";
    let l_prime = vec![
        cond(0, "alphabet", vec![Rule::Alphabet(Letter::ALL.to_vec())]),
        cond(
            1,
            "prefix",
            vec![
                Rule::Exists(pats(&lp_prefixes)),
                Rule::Cover(letters("da' da\""), pats(&lp_prefixes)),
            ],
        ),
        cond(
            2,
            "suffix",
            vec![
                Rule::Exists(suffix_pats(&lp_suffixes)),
                Rule::Cover(letters("dc' dc\" dl"), suffix_pats(&lp_suffixes)),
                // the prefix and suffix may not share their letters
                Rule::Absent(pats(&["^ d d dl $", "^ d b' d b\" dl $"])),
            ],
        ),
        cond(
            3,
            "a' and a\" chains",
            vec![Rule::Cover(
                letters("a' a\""),
                pats(&[lp_prefixes[2], lp_prefixes[3], lp_a]),
            )],
        ),
        cond(
            4,
            "c' and c\" chains",
            vec![Rule::Cover(
                letters("c' c\""),
                suffix_pats(&[lp_suffixes[2], lp_suffixes[5], lp_c]),
            )],
        ),
        cond(
            5,
            "b_s only as a scissor",
            vec![Rule::Cover(
                letters("bs"),
                [
                    pats(&[lp_prefixes[1], lp_prefixes[2], lp_prefixes[3], lp_a, lp_c]),
                    suffix_pats(&[lp_suffixes[2], lp_suffixes[3], lp_suffixes[5]]),
                ]
                .concat(),
            )],
        ),
        cond(
            6,
            "b' and b\" pairs",
            vec![Rule::Cover(
                letters("b' b\""),
                [
                    pats(&[lp_prefixes[4], lp_prefixes[5], b_pair]),
                    suffix_pats(&[lp_suffixes[1], lp_suffixes[4]]),
                ]
                .concat(),
            )],
        ),
        cond(
            7,
            "overlines and underlines",
            vec![
                Rule::Cover(
                    letters("b^"),
                    pats(&[lp_prefixes[6], lp_prefixes[7], "b^ a\"? a? c? DUND"]),
                ),
                Rule::Cover(letters("y^"), pats(&["y^ a? c? DUND"])),
                Rule::Cover(
                    letters("d^ d_^"),
                    pats(&[
                        "DBAR d b_ dl $",
                        "DBAR c? dc' b_ dc\" dl $",
                        "DBAR c? c'? b_",
                        "DBAR c? z x_",
                        "DBAR c? DUND",
                    ]),
                ),
                Rule::Cover(
                    letters("b_"),
                    pats(&[
                        "DBAR d b_ dl $",
                        "DBAR c? dc' b_ dc\" dl $",
                        "DBAR c? c'? b_",
                    ]),
                ),
                Rule::Cover(
                    letters("d_ d_^"),
                    pats(&[
                        lp_prefixes[6],
                        lp_prefixes[7],
                        "b^ a\"? a? c? DUND",
                        "y^ a? c? DUND",
                        "DBAR c? DUND",
                    ]),
                ),
                Rule::Absent(pats(&["DUND dl $"])),
            ],
        ),
        cond(
            8,
            "x, y and z",
            vec![Rule::Cover(
                letters(xyz),
                [
                    pats(&[lp_prefixes[8], lp_prefixes[9], "V1 d V2"]),
                    suffix_pats(&[lp_suffixes[8], lp_suffixes[9]]),
                ]
                .concat(),
            )],
        ),
        cond(
            9,
            "no aa, bb, cc, da or cdd_l",
            vec![forbid(&["a a", "b b", "c c", "d a", "c d dl"])],
        ),
    ];

    Rules { l, k1, k3, l_prime }
}

/// Suffix patterns may carry alternatives tied to the start of the word
/// (`... | ^ d b' d | ...`); those alternatives are split out into patterns
/// spanning the whole word.
fn suffix_pats(srcs: &[&str]) -> Vec<Pattern> {
    let mut out = Vec::new();
    for src in srcs {
        let src = expand(src);
        let Some(body) = src.strip_prefix("( ").filter(|_| src.contains("| ^ ")) else {
            out.push(pat(&src));
            continue;
        };
        // "( alt1 | ^ alt2 | ^ alt3 ) rest"
        let close = body.find(" ) ").expect("grouped alternatives");
        let (alts, rest) = (&body[..close], &body[close + 3..]);
        for alt in alts.split(" | ") {
            out.push(pat(&format!("{alt} {rest}")));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// evaluation

struct Subject<'a> {
    w: &'a [Letter],
    s: String,
}

impl Subject<'_> {
    fn sub(&self, i: usize, j: usize) -> &str {
        // every glyph is two bytes long
        &self.s[2 * i..2 * j]
    }

    fn matches(&self, p: &Pattern, i: usize, j: usize) -> bool {
        let n = self.w.len();
        let ok_span = match p.span {
            Span::Any => true,
            Span::Prefix => i == 0,
            Span::Suffix => j == n,
            Span::Whole => i == 0 && j == n,
        };
        ok_span && p.re.is_match(self.sub(i, j))
    }

    fn exists(&self, ps: &[Pattern]) -> bool {
        let n = self.w.len();
        ps.iter().any(|p| match p.span {
            Span::Prefix => (0..=n).any(|j| self.matches(p, 0, j)),
            Span::Suffix => (0..=n).any(|i| self.matches(p, i, n)),
            Span::Whole => self.matches(p, 0, n),
            Span::Any => (0..=n).any(|i| (i..=n).any(|j| self.matches(p, i, j))),
        })
    }

    fn covered(&self, targets: &[Letter], ps: &[Pattern]) -> bool {
        let n = self.w.len();
        let need: Vec<usize> = (0..n).filter(|&k| targets.contains(&self.w[k])).collect();
        if need.is_empty() {
            return true;
        }
        let mut cov = vec![false; n];
        for p in ps {
            for i in 0..n {
                for j in i + 1..=n {
                    if cov[i..j].iter().all(|&c| c) || !need.iter().any(|&k| i <= k && k < j) {
                        continue;
                    }
                    if self.matches(p, i, j) {
                        cov[i..j].iter_mut().for_each(|c| *c = true);
                    }
                }
            }
        }
        need.iter().all(|&k| cov[k])
    }
}

fn holds(rule: &Rule, sub: &Subject<'_>) -> bool {
    match rule {
        Rule::Alphabet(set) => sub.w.iter().all(|l| set.contains(l)),
        Rule::Exists(ps) => sub.exists(ps),
        Rule::Absent(ps) => !sub.exists(ps),
        Rule::Cover(ls, ps) => sub.covered(ls, ps),
        Rule::Forbid(ws) => ws
            .iter()
            .all(|f| !sub.w.windows(f.len()).any(|win| win == f.as_slice())),
    }
}

fn run(conds: &[Condition], w: &[Letter]) -> Option<Violation> {
    let sub = Subject { w, s: glyphs(w) };
    conds
        .iter()
        .find(|c| !c.rules.iter().all(|r| holds(r, &sub)))
        .map(|c| Violation {
            number: c.number,
            name: c.name,
        })
}
