//! Partial deterministic automata read from line-based tables, and the
//! transfer-matrix series of their weighted walks.
//!
//! Table format, one transition per line:
//!
//! ```text
//! # comment
//! !initial A A''      (first listed state is the default start)
//! !accept Dl
//! STATE ; LETTER ; NEXT_STATE
//! ```
//!
//! Weight tables use the same layout with `x`, `F` or `G` in the last column.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::PathBuf;

use num_traits::Zero;
use thiserror::Error;

use crate::series::PowerSeries;
use crate::word::Letter;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("line {line}: {msg}")]
    ParseError { line: usize, msg: String },
    #[error("line {line}: second transition for ({state}, {letter})")]
    DuplicateTransition {
        line: usize,
        state: String,
        letter: Letter,
    },
    #[error("letter {0} is not in the automaton's alphabet")]
    AlphabetMismatch(Letter),
    #[error("unknown state {0:?}")]
    UnknownState(String),
    #[error("weight on ({0}, {1}) has a nonzero constant term")]
    NonNilpotentConstantTerm(String, Letter),
    #[error("no weight given for ({0}, {1})")]
    MissingWeight(String, Letter),
    #[error("cannot read data file {0}: {1}")]
    Io(String, String),
}

/// A partial DFA. Missing transitions lead to an implicit jail state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    states: Vec<String>,
    index: HashMap<String, usize>,
    delta: BTreeMap<(usize, Letter), usize>,
    initial: Vec<usize>,
    accepting: Vec<usize>,
}

fn split3(line: &str, lineno: usize) -> Result<(String, Letter, String), AutomatonError> {
    let cols: Vec<&str> = line.split(';').map(str::trim).collect();
    if cols.len() != 3 || cols.iter().any(|c| c.is_empty()) {
        return Err(AutomatonError::ParseError {
            line: lineno,
            msg: "expected STATE ; LETTER ; VALUE".into(),
        });
    }
    let letter = cols[1]
        .parse::<Letter>()
        .map_err(|e| AutomatonError::ParseError {
            line: lineno,
            msg: e.to_string(),
        })?;
    Ok((cols[0].to_string(), letter, cols[2].to_string()))
}

impl Automaton {
    pub fn parse(text: &str) -> Result<Automaton, AutomatonError> {
        let mut m = Automaton {
            states: vec![],
            index: HashMap::new(),
            delta: BTreeMap::new(),
            initial: vec![],
            accepting: vec![],
        };
        let mut initial_names = vec![];
        let mut accept_names = vec![];
        let mut rows = vec![];
        for (k, raw) in text.lines().enumerate() {
            let lineno = k + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('!') {
                let mut parts = rest.split_whitespace();
                match parts.next() {
                    Some("initial") => initial_names.extend(parts.map(String::from)),
                    Some("accept") => accept_names.extend(parts.map(String::from)),
                    _ => {
                        return Err(AutomatonError::ParseError {
                            line: lineno,
                            msg: format!("unknown directive {line:?}"),
                        })
                    }
                }
                continue;
            }
            rows.push((lineno, split3(line, lineno)?));
        }
        // source states first, so state order follows the rows of the table
        for (_, (from, _, _)) in &rows {
            m.intern(from);
        }
        for (lineno, (from, letter, to)) in rows {
            let u = m.intern(&from);
            let v = m.intern(&to);
            if m.delta.insert((u, letter), v).is_some() {
                return Err(AutomatonError::DuplicateTransition {
                    line: lineno,
                    state: from,
                    letter,
                });
            }
        }
        if m.states.is_empty() {
            return Err(AutomatonError::ParseError {
                line: 0,
                msg: "no transitions".into(),
            });
        }
        if initial_names.is_empty() {
            initial_names.push(m.states[0].clone());
        }
        for name in &initial_names {
            let i = m.intern(name);
            m.initial.push(i);
        }
        for name in &accept_names {
            let i = m.intern(name);
            m.accepting.push(i);
        }
        Ok(m)
    }

    fn intern(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        self.states.push(name.to_string());
        self.index.insert(name.to_string(), self.states.len() - 1);
        self.states.len() - 1
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_index(&self, name: &str) -> Result<usize, AutomatonError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| AutomatonError::UnknownState(name.to_string()))
    }

    pub fn initial_states(&self) -> Vec<&str> {
        self.initial
            .iter()
            .map(|&i| self.states[i].as_str())
            .collect()
    }

    pub fn accepting_states(&self) -> Vec<&str> {
        self.accepting
            .iter()
            .map(|&i| self.states[i].as_str())
            .collect()
    }

    pub fn transition_count(&self) -> usize {
        self.delta.len()
    }

    /// Letters that label at least one transition.
    pub fn alphabet(&self) -> Vec<Letter> {
        let mut v: Vec<Letter> = self.delta.keys().map(|&(_, l)| l).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn step(&self, state: &str, letter: Letter) -> Option<&str> {
        let u = *self.index.get(state)?;
        self.delta
            .get(&(u, letter))
            .map(|&v| self.states[v].as_str())
    }

    /// All transitions as `(from, letter, to)` names.
    pub fn transitions(&self) -> impl Iterator<Item = (&str, Letter, &str)> + '_ {
        self.delta
            .iter()
            .map(|(&(u, l), &v)| (self.states[u].as_str(), l, self.states[v].as_str()))
    }

    /// Runs the word from the default (or given) initial state.
    pub fn accepts(&self, w: &[Letter], initial: Option<&str>) -> Result<bool, AutomatonError> {
        let alphabet = self.alphabet();
        if let Some(&l) = w.iter().find(|l| !alphabet.contains(l)) {
            return Err(AutomatonError::AlphabetMismatch(l));
        }
        let mut s = match initial {
            Some(name) => self.state_index(name)?,
            None => self.initial[0],
        };
        for &l in w {
            match self.delta.get(&(s, l)) {
                Some(&t) => s = t,
                None => return Ok(false),
            }
        }
        Ok(self.accepting.contains(&s))
    }

    /// Removes one transition (used to build corrupted copies for negative
    /// controls). Returns whether it existed.
    pub fn remove_transition(&mut self, state: &str, letter: Letter) -> bool {
        match self.index.get(state) {
            Some(&u) => self.delta.remove(&(u, letter)).is_some(),
            None => false,
        }
    }

    /// Redirects an existing transition, adding the target state if needed.
    pub fn set_transition(&mut self, state: &str, letter: Letter, to: &str) {
        let u = self.intern(state);
        let v = self.intern(to);
        self.delta.insert((u, letter), v);
    }

    /// Canonical text: directives, then transitions grouped by source state
    /// in order of first appearance and by letter within a state.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let names = |ids: &[usize]| {
            ids.iter()
                .map(|&i| self.states[i].as_str())
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(out, "!initial {}", names(&self.initial)).unwrap();
        if !self.accepting.is_empty() {
            writeln!(out, "!accept {}", names(&self.accepting)).unwrap();
        }
        for (&(u, l), &v) in &self.delta {
            writeln!(out, "{} ; {} ; {}", self.states[u], l, self.states[v]).unwrap();
        }
        out
    }

    /// Number of length-`n` walks from `from` to `to`, by dynamic programming
    /// over the transitions.
    pub fn count_walks(&self, from: &str, to: &str, n: usize) -> Result<u128, AutomatonError> {
        let (s, t) = (self.state_index(from)?, self.state_index(to)?);
        let mut cur = vec![0u128; self.states.len()];
        cur[s] = 1;
        for _ in 0..n {
            let mut next = vec![0u128; self.states.len()];
            for (&(u, _), &v) in &self.delta {
                next[v] += cur[u];
            }
            cur = next;
        }
        Ok(cur[t])
    }
}

/// The three weight symbols of the weight tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightSymbol {
    X,
    F,
    G,
}

/// Per-transition weight symbols keyed by `(state, letter)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WeightTable {
    pub entries: BTreeMap<(String, Letter), WeightSymbol>,
}

impl WeightTable {
    pub fn parse(text: &str) -> Result<WeightTable, AutomatonError> {
        let mut t = WeightTable::default();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (state, letter, w) = split3(line, k + 1)?;
            let sym = match w.as_str() {
                "x" => WeightSymbol::X,
                "F" => WeightSymbol::F,
                "G" => WeightSymbol::G,
                _ => {
                    return Err(AutomatonError::ParseError {
                        line: k + 1,
                        msg: format!("unknown weight {w:?}"),
                    })
                }
            };
            if t.entries.insert((state.clone(), letter), sym).is_some() {
                return Err(AutomatonError::DuplicateTransition {
                    line: k + 1,
                    state,
                    letter,
                });
            }
        }
        Ok(t)
    }

    pub fn get(&self, state: &str, letter: Letter) -> Option<WeightSymbol> {
        self.entries.get(&(state.to_string(), letter)).copied()
    }

    /// Binds the symbols to series and returns a per-transition weight map.
    pub fn bind(&self, x: &PowerSeries, f: &PowerSeries, g: &PowerSeries) -> Weights {
        Weights::PerTransition(
            self.entries
                .iter()
                .map(|(k, s)| {
                    let v = match s {
                        WeightSymbol::X => x.clone(),
                        WeightSymbol::F => f.clone(),
                        WeightSymbol::G => g.clone(),
                    };
                    (k.clone(), v)
                })
                .collect(),
        )
    }
}

/// How transition weights are assigned.
#[derive(Debug, Clone)]
pub enum Weights {
    /// The same series on every transition.
    Uniform(PowerSeries),
    /// By letter; letters without an entry are an error.
    PerLetter(HashMap<Letter, PowerSeries>),
    /// By `(state, letter)`.
    PerTransition(BTreeMap<(String, Letter), PowerSeries>),
}

impl Weights {
    fn lookup(&self, state: &str, letter: Letter) -> Option<&PowerSeries> {
        match self {
            Weights::Uniform(s) => Some(s),
            Weights::PerLetter(m) => m.get(&letter),
            Weights::PerTransition(m) => m.get(&(state.to_string(), letter)),
        }
    }
}

/// The weighted adjacency matrix `P`, stored sparsely by row.
#[derive(Debug, Clone)]
pub struct TransferMatrix {
    pub index: Vec<String>,
    rows: Vec<BTreeMap<usize, PowerSeries>>,
    order: usize,
}

impl TransferMatrix {
    pub fn new(
        m: &Automaton,
        weights: &Weights,
        order: usize,
    ) -> Result<TransferMatrix, AutomatonError> {
        let mut rows: Vec<BTreeMap<usize, PowerSeries>> = vec![BTreeMap::new(); m.states.len()];
        for (&(u, l), &v) in &m.delta {
            let name = &m.states[u];
            let w = weights
                .lookup(name, l)
                .ok_or_else(|| AutomatonError::MissingWeight(name.clone(), l))?;
            if !w.coeff(0).is_zero() {
                return Err(AutomatonError::NonNilpotentConstantTerm(name.clone(), l));
            }
            let w = w.with_order(order);
            let e = rows[u].entry(v).or_insert_with(|| PowerSeries::zero(order));
            *e = &*e + &w;
        }
        Ok(TransferMatrix {
            index: m.states.clone(),
            rows,
            order,
        })
    }

    pub fn entry(&self, u: usize, v: usize) -> PowerSeries {
        self.rows[u]
            .get(&v)
            .cloned()
            .unwrap_or_else(|| PowerSeries::zero(self.order))
    }

    /// Column `to` of `(I - P)^-1`, by Gaussian elimination on the sparse
    /// system `(I - P) y = e_to`. Every pivot has constant term 1.
    pub fn inverse_column(&self, to: usize) -> Vec<PowerSeries> {
        let n = self.rows.len();
        let order = self.order;
        // rows of I - P together with the right-hand side
        let mut a: Vec<BTreeMap<usize, PowerSeries>> = self
            .rows
            .iter()
            .enumerate()
            .map(|(u, row)| {
                let mut r: BTreeMap<usize, PowerSeries> =
                    row.iter().map(|(&v, s)| (v, -s)).collect();
                let d = r.entry(u).or_insert_with(|| PowerSeries::zero(order));
                *d = &PowerSeries::one(order) + &*d;
                r
            })
            .collect();
        let mut rhs: Vec<PowerSeries> = (0..n)
            .map(|u| {
                if u == to {
                    PowerSeries::one(order)
                } else {
                    PowerSeries::zero(order)
                }
            })
            .collect();
        // column k -> rows that currently have a nonzero entry there
        let mut col_rows: Vec<Vec<usize>> = vec![vec![]; n];
        for (u, r) in a.iter().enumerate() {
            for &v in r.keys() {
                col_rows[v].push(u);
            }
        }
        for k in 0..n {
            let inv = a[k][&k].recip().expect("pivot has constant term 1");
            let pivot_row: Vec<(usize, PowerSeries)> = a[k]
                .iter()
                .filter(|(&v, _)| v > k)
                .map(|(&v, s)| (v, s * &inv))
                .collect();
            let pivot_rhs = &rhs[k] * &inv;
            let mut targets = std::mem::take(&mut col_rows[k]);
            targets.sort_unstable();
            targets.dedup();
            for &u in targets.iter().filter(|&&u| u > k) {
                let Some(f) = a[u].remove(&k) else { continue };
                if f.is_zero() {
                    continue;
                }
                for (v, s) in &pivot_row {
                    let delta = &f * s;
                    match a[u].get_mut(v) {
                        Some(e) => *e = &*e - &delta,
                        None => {
                            a[u].insert(*v, -&delta);
                            col_rows[*v].push(u);
                        }
                    }
                }
                if !pivot_rhs.is_zero() {
                    rhs[u] = &rhs[u] - &(&f * &pivot_rhs);
                }
            }
            // normalise row k so back substitution only subtracts
            a[k] = pivot_row.into_iter().collect();
            rhs[k] = pivot_rhs;
        }
        let mut y: Vec<PowerSeries> = vec![PowerSeries::zero(order); n];
        for k in (0..n).rev() {
            let mut v = rhs[k].clone();
            for (&j, s) in &a[k] {
                v = &v - &(s * &y[j]);
            }
            y[k] = v;
        }
        y
    }

    /// The same column as a truncated walk sum `sum_k P^k e_to`; exact since
    /// `P` has no constant term.
    pub fn inverse_column_by_powers(&self, to: usize) -> Vec<PowerSeries> {
        let n = self.rows.len();
        let order = self.order;
        let mut y: Vec<PowerSeries> = (0..n)
            .map(|u| {
                if u == to {
                    PowerSeries::one(order)
                } else {
                    PowerSeries::zero(order)
                }
            })
            .collect();
        for _ in 0..=order {
            let mut next: Vec<PowerSeries> = (0..n)
                .map(|u| {
                    if u == to {
                        PowerSeries::one(order)
                    } else {
                        PowerSeries::zero(order)
                    }
                })
                .collect();
            for (u, row) in self.rows.iter().enumerate() {
                for (&v, s) in row {
                    if !y[v].is_zero() {
                        next[u] = &next[u] + &(s * &y[v]);
                    }
                }
            }
            y = next;
        }
        y
    }
}

/// Entry `(from, to)` of `(I - P)^-1` truncated at `order`.
pub fn transfer_series(
    m: &Automaton,
    weights: &Weights,
    from: &str,
    to: &str,
    order: usize,
) -> Result<PowerSeries, AutomatonError> {
    let (u, v) = (m.state_index(from)?, m.state_index(to)?);
    let p = TransferMatrix::new(m, weights, order)?;
    Ok(p.inverse_column(v).swap_remove(u))
}

/// Shipped data files.
pub mod data {
    use super::*;

    const FILES: &[(&str, &str)] = &[
        ("example.txt", include_str!("../data/example.txt")),
        ("m.txt", include_str!("../data/m.txt")),
        ("m_weights.txt", include_str!("../data/m_weights.txt")),
        ("m_prime.txt", include_str!("../data/m_prime.txt")),
        (
            "m_prime_weights.txt",
            include_str!("../data/m_prime_weights.txt"),
        ),
    ];

    /// Environment variable naming a directory that overrides the built-in tables.
    pub const DATA_DIR_ENV: &str = "PERMCLASS_DATA_DIR";

    /// Reads a table, preferring `$PERMCLASS_DATA_DIR/<name>` when the variable is set.
    pub fn read(name: &str) -> Result<String, AutomatonError> {
        if let Some(dir) = std::env::var_os(DATA_DIR_ENV) {
            let path = PathBuf::from(dir).join(name);
            return std::fs::read_to_string(&path)
                .map_err(|e| AutomatonError::Io(path.display().to_string(), e.to_string()));
        }
        builtin(name)
            .map(String::from)
            .ok_or_else(|| AutomatonError::Io(name.to_string(), "no such table".into()))
    }

    pub fn builtin(name: &str) -> Option<&'static str> {
        FILES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
    }

    pub fn builtin_names() -> Vec<&'static str> {
        FILES.iter().map(|(n, _)| *n).collect()
    }

    pub fn example() -> Result<Automaton, AutomatonError> {
        Automaton::parse(&read("example.txt")?)
    }

    pub fn m() -> Result<(Automaton, WeightTable), AutomatonError> {
        Ok((
            Automaton::parse(&read("m.txt")?)?,
            WeightTable::parse(&read("m_weights.txt")?)?,
        ))
    }

    pub fn m_prime() -> Result<(Automaton, WeightTable), AutomatonError> {
        Ok((
            Automaton::parse(&read("m_prime.txt")?)?,
            WeightTable::parse(&read("m_prime_weights.txt")?)?,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::word;

    fn builtin(name: &str) -> Automaton {
        Automaton::parse(data::builtin(name).unwrap()).unwrap()
    }

    #[test]
    fn parse_shipped_tables() {
        let m = builtin("m.txt");
        assert_eq!(m.states().len(), 6);
        let mp = builtin("m_prime.txt");
        assert_eq!(mp.states().len(), 83);
        assert_eq!(mp.accepting_states(), vec!["Dl"]);
        assert_eq!(mp.initial_states().len(), 10);
    }

    #[test]
    fn parse_errors() {
        let dup = "A ; b ; B\nA ; b ; C\n";
        assert!(matches!(
            Automaton::parse(dup),
            Err(AutomatonError::DuplicateTransition { line: 2, .. })
        ));
        assert!(matches!(
            Automaton::parse("A ; b\n"),
            Err(AutomatonError::ParseError { line: 1, .. })
        ));
        assert!(matches!(
            Automaton::parse("A ; q ; B\n"),
            Err(AutomatonError::ParseError { line: 1, .. })
        ));
    }

    #[test]
    fn runs() {
        let m = builtin("m.txt");
        assert!(m.accepts(&word("d dl"), None).unwrap());
        assert!(!m.accepts(&[], None).unwrap());
        assert!(!m.accepts(&word("a d dl"), None).unwrap());
        assert!(matches!(
            m.accepts(&word("z"), None),
            Err(AutomatonError::AlphabetMismatch(Letter::Z))
        ));
    }

    #[test]
    fn dump_is_canonical() {
        for name in ["m.txt", "m_prime.txt", "example.txt"] {
            let text = data::builtin(name).unwrap();
            let body: String = text
                .lines()
                .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
                .map(|l| format!("{l}\n"))
                .collect();
            let m = Automaton::parse(text).unwrap();
            assert_eq!(m.dump(), body, "{name}");
            assert_eq!(Automaton::parse(&m.dump()).unwrap(), m);
        }
    }

    #[test]
    fn worked_example_series() {
        let m = builtin("example.txt");
        let s = transfer_series(&m, &Weights::Uniform(PowerSeries::x(6)), "A", "C", 6).unwrap();
        assert_eq!(s.to_i128().unwrap(), vec![0, 1, 2, 4, 8, 16, 32]);
        for n in 0..=6 {
            assert_eq!(
                s.to_i128().unwrap()[n] as u128,
                m.count_walks("A", "C", n).unwrap()
            );
        }
    }

    #[test]
    fn elimination_matches_walk_sum() {
        let (m, w) = data::m_prime().unwrap();
        let n = 9;
        let fbar = crate::series::fibonacci(n).bar();
        let gbar = crate::series::g_series(n).bar();
        let p = TransferMatrix::new(&m, &w.bind(&PowerSeries::x(n), &fbar, &gbar), n).unwrap();
        let dl = m.state_index("Dl").unwrap();
        assert_eq!(p.inverse_column(dl), p.inverse_column_by_powers(dl));
    }

    #[test]
    fn rejects_weight_with_constant_term() {
        let m = builtin("example.txt");
        let r = transfer_series(&m, &Weights::Uniform(PowerSeries::one(3)), "A", "C", 3);
        assert!(matches!(
            r,
            Err(AutomatonError::NonNilpotentConstantTerm(..))
        ));
    }
}
