//! Gap instances for 3XOR, 3SAT, label cover and vertex cover, the
//! reductions between them, pebble-game and refinement solvers for
//! counting-logic equivalence, and exact brute-force oracles to check
//! every construction against at small scale.
//!
//! Everything is deterministic: randomized generators take explicit seeds,
//! parallel searches reduce with fixed tie-breaks, and all weights are exact
//! integers.

pub mod error;
pub mod formats;
pub mod gadgets;
pub mod games;
pub mod generators;
pub mod graph;
pub mod graphreductions;
pub mod labelcover;
pub mod longcode;
pub mod oracles;
pub mod structures;
pub mod vcwidth;

pub use error::{Error, Result};
pub use graph::{CoPartiteGraph, Graph, WeightedGraph};
pub use structures::{
    Assignment, Clause, CnfSystem, Encoding, Language, Literal, RelStructure, Vocabulary, Weight,
    XorEquation, XorSystem,
};

/// Exact non-negative rationals used for satisfaction fractions.
pub type Fraction = num_rational::Ratio<u128>;

/// `num / den` as a [`Fraction`]; an empty total counts as fully satisfied.
pub fn fraction(num: u64, den: u64) -> Fraction {
    if den == 0 {
        Fraction::from_integer(1)
    } else {
        Fraction::new(num as u128, den as u128)
    }
}
