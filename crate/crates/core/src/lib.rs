//! Exact analysis of non-overlapping word sets.
//!
//! A pair of words `(w, u)` of length `n` overlaps when some final segment
//! of `w` equals the initial segment of `u` of the same length. For a set
//! `A` the crate computes `U(A)`, the words that no member of `A` overlaps
//! into, and checks the bound `mu(A) mu(U(A)) <= (1/n)(n/(n+1))^(n+1)` on
//! concrete sets step by step.
//!
//! * [`wordspace`]: words, dense word sets, shift and cylinder maps.
//! * [`overlap`]: `U(A)` by two independent routes, coverage counts.
//! * [`certificates`]: density profiles and the checkable bound.
//! * [`families`]: the product constructions `Omega^(n-k) x S^k`.
//! * [`extremal`]: exhaustive and greedy search for the best `mu(U)`.
//! * [`corollary`]: level sets of the coverage function.
//!
//! All measures are exact [`Ratio`]s.

pub mod certificates;
pub mod corollary;
pub mod error;
pub mod extremal;
pub mod families;
pub mod format;
pub mod overlap;
pub mod ratio;
pub mod sampling;
pub mod wordspace;

pub use error::{Error, Result};
pub use ratio::Ratio;
pub use wordspace::{Word, WordSet};
