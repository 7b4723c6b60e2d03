//! Doubly adjacent pattern-replacement equivalences on permutations.
//!
//! A replacement partition `P` groups patterns of a fixed size `c`. Two
//! permutations are `P`-equivalent when one can be turned into the other by
//! repeatedly rearranging a contiguous window whose values are consecutive
//! integers (a *hit*) into another pattern from the same part.
//!
//! The crate provides:
//!
//! * [`perm`]: permutations, patterns, hits, tail size and leaning.
//! * [`partition`]: replacement partitions and straightening sets.
//! * [`rewrite`]: polarization, the straightening step and normal forms.
//! * [`equivalence`]: class enumeration over `S_n` and confluence checks.
//! * [`counting`]: the inclusion-exclusion class-count formula.
//! * [`sc_family`]: the `S_c`-equivalence, irreducible blocks and
//!   `c`-toothed permutations.
//! * [`lemmas`]: exhaustive and randomized property suites.
//!
//! The crate is `no_std` and only needs `alloc`.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod counting;
pub mod equivalence;
mod error;
pub mod lemmas;
pub mod partition;
pub mod perm;
pub mod rank;
pub mod rewrite;
pub mod sc_family;
pub mod union_find;

pub use error::Error;
pub use partition::{ReplacementPartition, StraighteningSet};
pub use perm::{Leaning, Pattern, Permutation};
pub use rank::SymmetricGroup;
pub use rewrite::Polarization;

pub type Result<T, E = Error> = core::result::Result<T, E>;
