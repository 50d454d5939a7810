//! Letters and words of the encoding alphabets.
//!
//! The smaller class uses the five letters `a b c d dl`; the larger one uses
//! thirty letters with primes, underlines and overlines spelled in ASCII:
//! `'` and `"` for single and double primes, a trailing `_` for an underline,
//! `^` for an overline, `bs` and `dl` for the subscripted letters and
//! `da'`, `da"`, `dc'`, `dc"` for the letters with subscripts.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown letter {0:?}")]
pub struct UnknownLetter(pub String);

macro_rules! letters {
    ($($v:ident => $t:literal),* $(,)?) => {
        /// One letter of the thirty-letter alphabet (the five-letter one is a subset).
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum Letter { $($v),* }

        impl Letter {
            pub const ALL: &'static [Letter] = &[$(Letter::$v),*];

            pub fn token(self) -> &'static str {
                match self { $(Letter::$v => $t),* }
            }
        }
    };
}

letters! {
    A => "a", A1 => "a'", A2 => "a\"",
    B => "b", B1 => "b'", B2 => "b\"", Bs => "bs", BU => "b_", BO => "b^",
    C => "c", C1 => "c'", C2 => "c\"",
    D => "d", Da1 => "da'", Da2 => "da\"", Dc1 => "dc'", Dc2 => "dc\"",
    DU => "d_", DO => "d^", DUO => "d_^", Dl => "dl",
    X => "x", X1 => "x'", X2 => "x\"", XU => "x_",
    Y => "y", Y1 => "y'", Y2 => "y\"", YO => "y^",
    Z => "z",
}

impl Letter {
    /// The five letters used for the smaller class.
    pub const SMALL: &'static [Letter] = &[Letter::A, Letter::B, Letter::C, Letter::D, Letter::Dl];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Letter {
    type Err = UnknownLetter;
    fn from_str(s: &str) -> Result<Letter, UnknownLetter> {
        // '' is accepted as a spelling of "
        let norm = s.trim().replace("''", "\"");
        Letter::ALL
            .iter()
            .copied()
            .find(|l| l.token() == norm)
            .ok_or_else(|| UnknownLetter(s.to_string()))
    }
}

impl Serialize for Letter {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.token())
    }
}

impl<'de> Deserialize<'de> for Letter {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Letter, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub type Word = Vec<Letter>;

/// Parses a whitespace-separated word.
pub fn parse_word(text: &str) -> Result<Word, UnknownLetter> {
    text.split_whitespace().map(str::parse).collect()
}

pub fn format_word(w: &[Letter]) -> String {
    w.iter().map(|l| l.token()).collect::<Vec<_>>().join(" ")
}

/// Shorthand for literals in tests and tables; panics on a bad token.
pub fn word(text: &str) -> Word {
    parse_word(text).expect("valid word literal")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thirty_letters_roundtrip() {
        assert_eq!(Letter::ALL.len(), 30);
        for &l in Letter::ALL {
            assert_eq!(l.token().parse::<Letter>().unwrap(), l);
        }
        assert_eq!("a''".parse::<Letter>().unwrap(), Letter::A2);
        assert!("q".parse::<Letter>().is_err());
    }

    #[test]
    fn words() {
        let w = word("d d b c a d dl");
        assert_eq!(w.len(), 7);
        assert_eq!(format_word(&w), "d d b c a d dl");
        assert_eq!(format_word(&word("da' bs da\"")), "da' bs da\"");
    }
}
