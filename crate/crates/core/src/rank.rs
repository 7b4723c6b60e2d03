//! Lehmer-code ranking of permutations and the exhaustive `S_n` universe.

use alloc::vec;

use crate::perm::{relative_rank, Permutation};
use crate::{Error, Result};

const FACTORIALS: [u64; 21] = {
    let mut table = [1u64; 21];
    let mut i = 1;
    while i < 21 {
        table[i] = table[i - 1] * i as u64;
        i += 1;
    }
    table
};

/// `n!` for `n <= 20`.
#[inline]
pub fn factorial(n: usize) -> u64 {
    FACTORIALS[n]
}

/// Writes the permutation of `1..=out.len()` with lexicographic rank `rank`.
pub fn unrank_into(mut rank: u64, out: &mut [u32]) {
    let n = out.len();
    // Small n only; a linear scan over the unused letters is fine.
    let mut unused: [u32; 20] = [0; 20];
    for (i, slot) in unused.iter_mut().enumerate().take(n) {
        *slot = i as u32 + 1;
    }
    let mut remaining = n;
    for (i, slot) in out.iter_mut().enumerate() {
        let f = factorial(n - 1 - i);
        let idx = (rank / f) as usize;
        rank %= f;
        *slot = unused[idx];
        unused.copy_within(idx + 1..remaining, idx);
        remaining -= 1;
    }
}

/// Hard ceiling for exhaustive work: ranks must fit in `u32`.
pub const MAX_ENUMERABLE_N: usize = 12;
/// Default guard for exhaustive enumeration.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 11;

/// The set `S_n`, indexed by lexicographic rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymmetricGroup {
    n: usize,
}

impl SymmetricGroup {
    /// `S_n` under the default enumeration guard.
    pub fn new(n: usize) -> Result<Self> {
        Self::with_limit(n, DEFAULT_ENUMERATION_LIMIT)
    }

    /// `S_n` under a caller-chosen guard (never above [`MAX_ENUMERABLE_N`]).
    pub fn with_limit(n: usize, limit: usize) -> Result<Self> {
        let limit = limit.min(MAX_ENUMERABLE_N);
        if n == 0 || n > limit {
            return Err(Error::TooLarge { n, limit });
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `n!`.
    pub fn order(&self) -> u64 {
        factorial(self.n)
    }

    pub fn rank(&self, w: &[u32]) -> u64 {
        debug_assert_eq!(w.len(), self.n);
        relative_rank(w)
    }

    pub fn unrank(&self, rank: u64) -> Permutation {
        let mut values = vec![0; self.n];
        unrank_into(rank, &mut values);
        Permutation::from_vec_unchecked(values)
    }

    pub fn unrank_into(&self, rank: u64, out: &mut [u32]) {
        unrank_into(rank, out)
    }

    /// Every permutation in rank order.
    pub fn iter(&self) -> impl Iterator<Item = Permutation> + '_ {
        (0..self.order()).map(move |r| self.unrank(r))
    }
}
