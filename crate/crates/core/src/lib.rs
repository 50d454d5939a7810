//! Enumeration and structure of two permutation classes defined by small
//! bases: brute-force counting, simple decomposition, gluing of simple
//! permutations, word encodings, automata and generating functions.

pub mod automata;
pub mod classes;
pub mod codec;
pub mod gf;
pub mod glue;
pub mod perm;
pub mod series;
pub mod simple;
pub mod word;

pub use perm::{Perm, PermError};
pub use series::{PowerSeries, SeriesError};
