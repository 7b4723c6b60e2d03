//! Permutations, patterns and the value-interval "forms" relation.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Deref;
use core::str::FromStr;

use crate::rank::factorial;
use crate::{Error, Result};

/// A permutation of `1..=n` in one-line notation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    values: Vec<u32>,
}

/// A permutation of `1..=c` used as a replacement-rule symbol.
///
/// Ordering is lexicographic, which for equal sizes coincides with
/// [`Pattern::rank`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern {
    values: Vec<u32>,
}

/// Classification of a word by where its small values sit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Leaning {
    /// Tail size is less than the word length.
    Right,
    /// The reversed word is right leaning.
    Left,
    /// Neither.
    Omni,
}

fn is_bijection(values: &[u32]) -> bool {
    let n = values.len();
    let mut seen = vec![false; n];
    for &v in values {
        if v == 0 || v as usize > n || seen[v as usize - 1] {
            return false;
        }
        seen[v as usize - 1] = true;
    }
    true
}

fn render(values: &[u32], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if values.len() <= 9 {
        for v in values {
            write!(f, "{v}")?;
        }
    } else {
        for (i, v) in values.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
    }
    Ok(())
}

/// Parses `125436` (one digit per letter) or `10,2,1,...` (comma separated).
fn parse_letters(s: &str) -> Result<Vec<u32>> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::EmptyWord);
    }
    let bad = || Error::MalformedPermutation(s.to_string());
    if s.contains(',') {
        s.split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|_| bad()))
            .collect()
    } else {
        s.chars()
            .map(|ch| ch.to_digit(10).filter(|&d| d > 0).ok_or_else(bad))
            .collect()
    }
}

impl Permutation {
    pub fn new(values: Vec<u32>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyWord);
        }
        if !is_bijection(&values) {
            return Err(Error::NotAPermutation(letters_to_string(&values)));
        }
        Ok(Self { values })
    }

    /// Wraps values already known to be a bijection onto `1..=n`.
    pub(crate) fn from_vec_unchecked(values: Vec<u32>) -> Self {
        debug_assert!(is_bijection(&values));
        Self { values }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            values: (1..=n as u32).collect(),
        }
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.values
    }

    pub fn reversed(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self { values }
    }
}

impl Deref for Permutation {
    type Target = [u32];
    fn deref(&self) -> &[u32] {
        &self.values
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render(&self.values, f)
    }
}

impl FromStr for Permutation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let values = parse_letters(s)?;
        Self::new(values).map_err(|e| match e {
            Error::NotAPermutation(_) => Error::NotAPermutation(s.trim().to_string()),
            e => e,
        })
    }
}

impl Pattern {
    pub fn new(values: Vec<u32>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyWord);
        }
        if !is_bijection(&values) {
            return Err(Error::NotAPermutation(letters_to_string(&values)));
        }
        Ok(Self { values })
    }

    /// `12...c`.
    pub fn increasing(c: usize) -> Self {
        Self {
            values: (1..=c as u32).collect(),
        }
    }

    /// `c...21`.
    pub fn decreasing(c: usize) -> Self {
        Self {
            values: (1..=c as u32).rev().collect(),
        }
    }

    /// Every pattern of size `c`, in lexicographic order.
    pub fn all(c: usize) -> Vec<Pattern> {
        let total = factorial(c) as usize;
        (0..total)
            .map(|r| Pattern::from_rank(c, r as u64))
            .collect()
    }

    /// The pattern of size `c` with lexicographic rank `rank`.
    pub fn from_rank(c: usize, rank: u64) -> Self {
        let mut values = vec![0; c];
        crate::rank::unrank_into(rank, &mut values);
        Self { values }
    }

    pub fn size(&self) -> usize {
        self.values.len()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.values
    }

    /// Lexicographic rank among the patterns of the same size.
    pub fn rank(&self) -> u64 {
        relative_rank(&self.values)
    }

    pub fn leaning(&self) -> Leaning {
        leaning_of(&self.values)
    }

    pub fn reversed(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self { values }
    }

    /// Values of this pattern shifted so the smallest letter is `low`.
    pub fn shifted(&self, low: u32) -> impl Iterator<Item = u32> + '_ {
        self.values.iter().map(move |&v| v + low - 1)
    }
}

impl Deref for Pattern {
    type Target = [u32];
    fn deref(&self) -> &[u32] {
        &self.values
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render(&self.values, f)
    }
}

impl FromStr for Pattern {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let values = parse_letters(s)?;
        Self::new(values).map_err(|e| match e {
            Error::NotAPermutation(_) => Error::NotAPermutation(s.trim().to_string()),
            e => e,
        })
    }
}

pub(crate) fn letters_to_string(values: &[u32]) -> String {
    let mut out = String::new();
    for (i, v) in values.iter().enumerate() {
        if i > 0 && values.len() > 9 {
            out.push(',');
        }
        out.push_str(&v.to_string());
    }
    out
}

/// Smallest letter of `window` when its values are consecutive integers.
///
/// Letters are assumed distinct, which holds for every window of a
/// permutation.
#[inline]
pub(crate) fn interval_low(window: &[u32]) -> Option<u32> {
    let mut lo = u32::MAX;
    let mut hi = 0;
    for &v in window {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (!window.is_empty() && (hi - lo) as usize + 1 == window.len()).then_some(lo)
}

/// Lehmer rank of the relative order of `window` (distinct letters).
#[inline]
pub(crate) fn relative_rank(window: &[u32]) -> u64 {
    let len = window.len();
    let mut rank = 0u64;
    for i in 0..len {
        let smaller = window[i + 1..].iter().filter(|&&v| v < window[i]).count() as u64;
        rank += smaller * factorial(len - 1 - i);
    }
    rank
}

/// The pattern `window` forms, if its values are an interval of integers.
///
/// `7968` forms `2413`; `1426` forms nothing.
pub fn pattern_of(window: &[u32]) -> Option<Pattern> {
    let lo = interval_low(window)?;
    let mut seen = vec![false; window.len()];
    for &v in window {
        let slot = &mut seen[(v - lo) as usize];
        if *slot {
            return None;
        }
        *slot = true;
    }
    Some(Pattern {
        values: window.iter().map(|&v| v - lo + 1).collect(),
    })
}

/// Smallest `k > 0` such that the first `k` letters are the `k` smallest.
pub fn tail_size(word: &[u32]) -> Result<usize> {
    if word.is_empty() {
        return Err(Error::EmptyWord);
    }
    let mut sorted = word.to_vec();
    sorted.sort_unstable();
    let mut max = 0;
    for (k, &v) in word.iter().enumerate() {
        max = max.max(v);
        // Distinct letters: the prefix holds the k+1 smallest iff its max is
        // the (k+1)-th smallest.
        if max == sorted[k] {
            return Ok(k + 1);
        }
    }
    unreachable!("the whole word always qualifies")
}

/// Leaning of a word of distinct letters, measured against its own length.
///
/// The empty word is reported as [`Leaning::Omni`].
pub fn leaning_of(word: &[u32]) -> Leaning {
    let m = word.len();
    if m == 0 {
        return Leaning::Omni;
    }
    if tail_size(word).unwrap() < m {
        return Leaning::Right;
    }
    let mut reversed = word.to_vec();
    reversed.reverse();
    if tail_size(&reversed).unwrap() < m {
        Leaning::Left
    } else {
        Leaning::Omni
    }
}

/// All hits of size `c` in `w` as `(offset, pattern)`, offsets increasing.
pub fn hit_windows(w: &[u32], c: usize) -> Vec<(usize, Pattern)> {
    if c == 0 || c > w.len() {
        return Vec::new();
    }
    w.windows(c)
        .enumerate()
        .filter_map(|(start, win)| {
            interval_low(win).map(|lo| {
                let values = win.iter().map(|&v| v - lo + 1).collect();
                (start, Pattern { values })
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Pattern {
        s.parse().unwrap()
    }

    #[test]
    fn forms_examples() {
        assert_eq!(pattern_of(&[7, 9, 6, 8]), Some(p("2413")));
        assert_eq!(pattern_of(&[2, 4, 1, 3]), Some(p("2413")));
        assert_eq!(pattern_of(&[1, 4, 2, 6]), None);
        assert_eq!(pattern_of(&[3, 3, 4]), None);
    }

    #[test]
    fn tail_sizes() {
        // The first letter is already the minimum.
        let w: Permutation = "14238576".parse().unwrap();
        assert_eq!(tail_size(&w).unwrap(), 1);
        assert_eq!(tail_size(&[4, 1, 2, 3, 8, 5, 7, 6]).unwrap(), 4);
        assert_eq!(tail_size(&Permutation::identity(6)).unwrap(), 1);
        assert_eq!(tail_size(&[5, 4, 3, 2, 1]).unwrap(), 5);
        assert_eq!(tail_size(&[]), Err(Error::EmptyWord));
        // arbitrary distinct values, not 1..n
        assert_eq!(tail_size(&[40, 10, 30, 20]).unwrap(), 4);
        assert_eq!(tail_size(&[20, 10, 50, 40]).unwrap(), 2);
    }

    #[test]
    fn leanings() {
        assert_eq!(leaning_of(&[1, 4, 2, 3, 8, 5, 7, 6]), Leaning::Right);
        assert_eq!(leaning_of(&[6, 7, 5, 8, 3, 2, 4, 1]), Leaning::Left);
        // Reversed, 4213 starts with 312.
        assert_eq!(leaning_of(&[4, 2, 1, 3]), Leaning::Left);
        assert_eq!(leaning_of(&[2, 4, 1, 3]), Leaning::Omni);
        assert_eq!(leaning_of(&[3, 2, 1]), Leaning::Left);
        assert_eq!(leaning_of(&[1]), Leaning::Omni);
    }

    #[test]
    fn no_omni_patterns_of_size_three() {
        assert!(Pattern::all(3).iter().all(|u| u.leaning() != Leaning::Omni));
        let omni: Vec<_> = Pattern::all(4)
            .into_iter()
            .filter(|u| u.leaning() == Leaning::Omni)
            .collect();
        assert_eq!(omni, vec![p("2413"), p("3142")]);
    }

    #[test]
    fn hits_of_examples() {
        let w: Permutation = "157968324".parse().unwrap();
        assert!(hit_windows(&w, 4).contains(&(2, p("2413"))));
        let w: Permutation = "125436".parse().unwrap();
        assert!(hit_windows(&w, 3).contains(&(2, p("321"))));
        let id = Permutation::identity(7);
        let hits = hit_windows(&id, 3);
        assert_eq!(hits.len(), 5);
        assert!(hits.iter().all(|(_, u)| *u == p("123")));
        assert!(hit_windows(&id, 8).is_empty());
    }

    #[test]
    fn parsing() {
        let w: Permutation = "10,2,1,3,4,5,6,7,8,9".parse().unwrap();
        assert_eq!(w.len(), 10);
        assert_eq!(alloc::format!("{w}"), "10,2,1,3,4,5,6,7,8,9");
        assert!(matches!("1224".parse::<Permutation>(), Err(Error::NotAPermutation(_))));
        assert!(matches!("12a".parse::<Permutation>(), Err(Error::MalformedPermutation(_))));
        assert!(matches!("102".parse::<Permutation>(), Err(Error::MalformedPermutation(_))));
        assert_eq!("".parse::<Permutation>(), Err(Error::EmptyWord));
    }

    #[test]
    fn ranks_match_lexicographic_order() {
        let all = Pattern::all(4);
        assert_eq!(all.len(), 24);
        for (r, u) in all.iter().enumerate() {
            assert_eq!(u.rank(), r as u64);
        }
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }
}
