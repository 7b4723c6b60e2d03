//! Exact class counts by inclusion-exclusion over non-straightened hits.
//!
//! When the straightening operator is confluent and no two overlapping hits
//! can both be unstraightened, classes are in bijection with permutations
//! without unstraightened hits. Counting those by inclusion-exclusion over
//! `j` disjoint unstraightened hits gives
//!
//! ```text
//! f(n) = sum_j (-1)^j * (n - cj + j)!^2 * k^j / (j! * (n - cj)!)
//! ```
//!
//! where `k` is the number of unstraightened arrangements a hit can take once
//! its position, value range and polarization are fixed: `c!` minus the number
//! of parts of the partition padded to all of `S_c`.

use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Range, RangeInclusive};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::equivalence::count_classes;
use crate::partition::{default_straightening_set, ReplacementPartition, StraighteningSet};
use crate::perm::{Leaning, Pattern};
use crate::rank::{factorial, SymmetricGroup};
use crate::rewrite::pending_into;
use crate::{Error, Result};

/// How `k` is derived from the partition.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum KReading {
    /// `k = c! - |P|`.
    #[default]
    PatternFactorial,
    /// `k = n! - |P|`, kept only to show that it disagrees with enumeration.
    HostFactorial,
}

fn big_factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, i| acc * i)
}

/// The inclusion-exclusion sum `f(n)` for hits of size `c` with `k`
/// unstraightened arrangements each.
///
/// This is the class count whenever the overlap hypothesis holds. For other
/// `k` it is just the value of the sum, which can be negative.
pub fn formula_count(n: usize, c: usize, k: u64) -> Result<BigInt> {
    if c == 0 || c > n {
        return Err(Error::PatternLongerThanHost { c, n });
    }
    let k = BigUint::from(k);
    let mut total = BigInt::zero();
    for j in 0..=n / c {
        let m = n - c * j + j;
        let numerator = big_factorial(m).pow(2) * k.pow(j as u32);
        let denominator = big_factorial(j) * big_factorial(n - c * j);
        let (term, rem) = numerator.div_rem(&denominator);
        assert!(rem.is_zero(), "summand j={j} of f({n}) is not an integer");
        let term = BigInt::from(term);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    Ok(total)
}

/// `k` for `p` (padded to all of `S_c`) under the chosen reading.
pub fn partition_k(p: &ReplacementPartition, n: usize, reading: KReading) -> u64 {
    let parts = p.padded().part_count() as u64;
    match reading {
        KReading::PatternFactorial => factorial(p.c()) - parts,
        KReading::HostFactorial => factorial(n).saturating_sub(parts),
    }
}

fn patterns_with(c: usize, leaning: Leaning) -> Vec<Pattern> {
    Pattern::all(c).into_iter().filter(|u| u.leaning() == leaning).collect()
}

/// Largest `k` for which `k` disjoint pairs `{a_i, b_i}` exist with
/// `a_i` left or omni leaning and `b_i` right or omni leaning.
pub fn max_pairs(c: usize) -> usize {
    let left = patterns_with(c, Leaning::Left).len();
    let right = patterns_with(c, Leaning::Right).len();
    let omni = patterns_with(c, Leaning::Omni).len();
    (left + omni).min(right + omni).min((left + right + omni) / 2)
}

/// A partition `{a_1, b_1} ... {a_k, b_k}` with each `a_i` left or omni
/// leaning, each `b_i` right or omni leaning, and all `2k` patterns distinct.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairFamily {
    c: usize,
    pairs: Vec<(Pattern, Pattern)>,
}

impl PairFamily {
    pub fn new(c: usize, pairs: Vec<(Pattern, Pattern)>) -> Result<Self> {
        let mut seen = Vec::new();
        for (a, b) in &pairs {
            if !matches!(a.leaning(), Leaning::Left | Leaning::Omni) {
                return Err(Error::InvalidPairing(alloc::format!("`{a}` must be left or omni leaning")));
            }
            if !matches!(b.leaning(), Leaning::Right | Leaning::Omni) {
                return Err(Error::InvalidPairing(alloc::format!("`{b}` must be right or omni leaning")));
            }
            for u in [a, b] {
                if u.size() != c {
                    return Err(Error::PatternSize {
                        pattern: u.to_string(),
                        expected: c,
                        found: u.size(),
                    });
                }
                if seen.contains(u) {
                    return Err(Error::DuplicatePattern(u.to_string()));
                }
                seen.push(u.clone());
            }
        }
        Ok(Self { c, pairs })
    }

    pub fn pairs(&self) -> &[(Pattern, Pattern)] {
        &self.pairs
    }

    pub fn k(&self) -> usize {
        self.pairs.len()
    }

    pub fn to_partition(&self) -> ReplacementPartition {
        let parts = self.pairs.iter().map(|(a, b)| vec![a.clone(), b.clone()]).collect();
        ReplacementPartition::new(self.c, parts).expect("pairs are disjoint")
    }
}

/// Class count of the partition given by any valid family of `k` pairs.
pub fn easy_family_count(n: usize, c: usize, k: usize) -> Result<BigInt> {
    let max = max_pairs(c);
    if k > max {
        return Err(Error::TooManyPairs { c, k, max });
    }
    formula_count(n, c, k as u64)
}

/// Every family of `k` pairs, deduplicated by the partition it induces.
/// Only practical for small `c`.
pub fn pair_families(c: usize, k: usize) -> Vec<PairFamily> {
    let a_side: Vec<Pattern> = Pattern::all(c)
        .into_iter()
        .filter(|u| u.leaning() != Leaning::Right)
        .collect();
    let b_side: Vec<Pattern> = Pattern::all(c)
        .into_iter()
        .filter(|u| u.leaning() != Leaning::Left)
        .collect();
    let mut found = BTreeMap::new();
    let mut chosen: Vec<(Pattern, Pattern)> = Vec::new();
    fn extend(
        c: usize,
        k: usize,
        from: usize,
        a_side: &[Pattern],
        b_side: &[Pattern],
        chosen: &mut Vec<(Pattern, Pattern)>,
        found: &mut BTreeMap<alloc::string::String, PairFamily>,
    ) {
        if chosen.len() == k {
            if let Ok(family) = PairFamily::new(c, chosen.clone()) {
                found.entry(family.to_partition().to_string()).or_insert(family);
            }
            return;
        }
        for i in from..a_side.len() {
            let a = &a_side[i];
            if chosen.iter().any(|(x, y)| x == a || y == a) {
                continue;
            }
            for b in b_side {
                if b == a || chosen.iter().any(|(x, y)| x == b || y == b) {
                    continue;
                }
                chosen.push((a.clone(), b.clone()));
                extend(c, k, i + 1, a_side, b_side, chosen, found);
                chosen.pop();
            }
        }
    }
    extend(c, k, 0, &a_side, &b_side, &mut chosen, &mut found);
    found.into_values().collect()
}

/// A random family of `k` pairs. Omni-leaning patterns are split at random
/// between the two sides, so any `k <= max_pairs(c)` is reachable.
pub fn sample_pair_family<R: Rng + ?Sized>(c: usize, k: usize, rng: &mut R) -> Result<PairFamily> {
    let max = max_pairs(c);
    if k > max {
        return Err(Error::TooManyPairs { c, k, max });
    }
    let mut omni = patterns_with(c, Leaning::Omni);
    omni.shuffle(rng);
    let half = omni.len().div_ceil(2);
    let mut a_side = patterns_with(c, Leaning::Left);
    let mut b_side = patterns_with(c, Leaning::Right);
    // The smaller side gets the extra omni pattern.
    if a_side.len() <= b_side.len() {
        a_side.extend(omni[..half].iter().cloned());
        b_side.extend(omni[half..].iter().cloned());
    } else {
        b_side.extend(omni[..half].iter().cloned());
        a_side.extend(omni[half..].iter().cloned());
    }
    a_side.shuffle(rng);
    b_side.shuffle(rng);
    let pairs = a_side.into_iter().zip(b_side).take(k).collect();
    PairFamily::new(c, pairs)
}

/// Searches `S_m` for `c <= m <= m_max` for two overlapping P-hits that are
/// both unstraightened. Returns the first witness found.
///
/// Polarization only looks one letter past each end of a hit and depends on
/// relative order alone, so `m_max = 2c + 1` covers every configuration.
pub fn overlap_hypothesis_witness(sys: &StraighteningSet, m_max: usize) -> Result<Option<crate::Permutation>> {
    let c = sys.partition().c();
    let mut pending = Vec::new();
    let mut buf = Vec::new();
    for m in c..=m_max {
        let group = SymmetricGroup::with_limit(m, crate::rank::MAX_ENUMERABLE_N)?;
        buf.resize(m, 0);
        for r in 0..group.order() {
            group.unrank_into(r, &mut buf);
            pending_into(&buf, sys, &mut pending);
            if pending.windows(2).any(|pair| pair[1] - pair[0] < c) {
                return Ok(Some(group.unrank(r)));
            }
        }
    }
    Ok(None)
}

/// Whether no two overlapping P-hits can both be unstraightened.
pub fn check_overlap_hypothesis(sys: &StraighteningSet, m_max: usize) -> Result<bool> {
    Ok(overlap_hypothesis_witness(sys, m_max)?.is_none())
}

/// Default search bound for [`check_overlap_hypothesis`].
pub fn default_overlap_bound(c: usize) -> usize {
    2 * c + 1
}

/// Number of permutations in `S_n` without an unstraightened P-hit.
pub fn count_roots(group: &SymmetricGroup, sys: &StraighteningSet) -> u64 {
    count_roots_in(group, sys, 0..group.order())
}

/// [`count_roots`] restricted to the ranks in `ranks`.
pub fn count_roots_in(group: &SymmetricGroup, sys: &StraighteningSet, ranks: Range<u64>) -> u64 {
    let mut buf = vec![0u32; group.n()];
    let mut pending = Vec::new();
    ranks
        .filter(|&r| {
            group.unrank_into(r, &mut buf);
            pending_into(&buf, sys, &mut pending);
            pending.is_empty()
        })
        .count() as u64
}

/// One line of [`compare_counts`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountRow {
    pub n: usize,
    pub brute: u64,
    /// Absent when the overlap hypothesis fails.
    pub formula: Option<BigInt>,
    pub roots: u64,
    pub agree: bool,
}

/// Class counts by enumeration, by formula and by counting roots.
///
/// The partition is padded with singleton parts; the straightening set is
/// the default one of the padded partition.
pub fn compare_counts(
    ns: RangeInclusive<usize>,
    p: &ReplacementPartition,
    reading: KReading,
    max_n: usize,
) -> Result<Vec<CountRow>> {
    let padded = p.padded();
    let sys = default_straightening_set(&padded);
    let c = p.c();
    let hypothesis = check_overlap_hypothesis(&sys, default_overlap_bound(c))?;
    let mut rows = Vec::new();
    for n in ns {
        if n < c {
            return Err(Error::PatternLongerThanHost { c, n });
        }
        let group = SymmetricGroup::with_limit(n, max_n)?;
        let brute = count_classes(&group, &padded);
        let roots = count_roots(&group, &sys);
        let formula = if hypothesis {
            Some(formula_count(n, c, partition_k(&padded, n, reading))?)
        } else {
            None
        };
        let agree = brute == roots && formula.as_ref().is_none_or(|f| *f == BigInt::from(brute));
        rows.push(CountRow {
            n,
            brute,
            formula,
            roots,
            agree,
        });
    }
    Ok(rows)
}
