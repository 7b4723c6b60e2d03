//! The `S_c`-equivalence: every pattern of size `c` in a single part,
//! straightened into `alpha = 12...c` or `alpha_hat = c...21`.
//!
//! Classes factor along the monotone runs of their root, and the class of
//! the identity is exactly the set of `c`-toothed permutations, counted by
//! `T_{c,n}`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::equivalence::{class_labels, class_of};
use crate::partition::{ReplacementPartition, StraighteningSet};
use crate::perm::{interval_low, Pattern, Permutation};
use crate::rank::SymmetricGroup;
use crate::rewrite::normal_form;
use crate::{Error, Result};

/// `12...c`.
pub fn alpha(c: usize) -> Pattern {
    Pattern::increasing(c)
}

/// `c...21`.
pub fn alpha_hat(c: usize) -> Pattern {
    Pattern::decreasing(c)
}

/// The partition of `S_c` with a single part.
pub fn sc_partition(c: usize) -> Result<ReplacementPartition> {
    ReplacementPartition::one_part(c)
}

/// The single-part partition with straightening set `{alpha, alpha_hat}`.
pub fn sc_straightening_set(c: usize) -> Result<StraighteningSet> {
    StraighteningSet::new(sc_partition(c)?, [alpha(c), alpha_hat(c)])
}

/// Irreducible blocks: the prefix up to the tail size, then the blocks of
/// what remains.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BlockDecomposition {
    blocks: Vec<Vec<u32>>,
}

impl BlockDecomposition {
    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

fn block_sizes(w: &[u32]) -> Vec<usize> {
    let mut sorted = w.to_vec();
    sorted.sort_unstable();
    let mut sizes = Vec::new();
    let mut max_rank = 0;
    let mut start = 0;
    for (i, v) in w.iter().enumerate() {
        let rank = sorted.binary_search(v).expect("letter is present");
        max_rank = max_rank.max(rank);
        // Blocks cover increasing value ranges, so a block ends exactly when
        // the prefix holds the smallest `i + 1` values.
        if max_rank == i {
            sizes.push(i + 1 - start);
            start = i + 1;
        }
    }
    sizes
}

/// Splits a word of distinct letters into its irreducible blocks.
pub fn irreducible_blocks(w: &[u32]) -> BlockDecomposition {
    let mut rest = w;
    let blocks = block_sizes(w)
        .into_iter()
        .map(|size| {
            let (head, tail) = rest.split_at(size);
            rest = tail;
            head.to_vec()
        })
        .collect();
    BlockDecomposition { blocks }
}

/// Every block has at most `c` letters and some run of consecutive blocks
/// has exactly `c` letters in total.
pub fn is_c_toothed(w: &[u32], c: usize) -> bool {
    let sizes = block_sizes(w);
    if c == 0 || sizes.iter().any(|&s| s > c) {
        return false;
    }
    // Sizes are positive, so a two-pointer sweep finds any run summing to c.
    let (mut lo, mut sum) = (0, 0);
    for &s in &sizes {
        sum += s;
        while sum > c {
            sum -= sizes[lo];
            lo += 1;
        }
        if sum == c {
            return true;
        }
    }
    false
}

/// Offsets of the maximal runs of consecutive integers, each increasing or
/// decreasing by one at every step.
pub fn run_bounds(w: &[u32]) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut step = 0i64;
    for i in 1..=w.len() {
        let extends = i < w.len() && {
            let d = w[i] as i64 - w[i - 1] as i64;
            d.abs() == 1 && (i - start == 1 || d == step)
        };
        if extends {
            step = w[i] as i64 - w[i - 1] as i64;
        } else {
            out.push(start..i);
            start = i;
        }
    }
    out
}

/// `w` cut into the fewest monotone runs of consecutive integers.
pub fn run_decomposition(w: &[u32]) -> Vec<Vec<u32>> {
    run_bounds(w).into_iter().map(|r| w[r].to_vec()).collect()
}

/// The class of the identity of `S_n` by breadth-first closure.
pub fn id_class_by_closure(n: usize, c: usize) -> Result<Vec<Permutation>> {
    if c == 0 || c > n {
        return Err(Error::PatternLongerThanHost { c, n });
    }
    Ok(class_of(&Permutation::identity(n), &sc_partition(c)?))
}

/// The `c`-toothed permutations of `S_n`, in rank order.
pub fn toothed_permutations(group: &SymmetricGroup, c: usize) -> Vec<Permutation> {
    group.iter().filter(|w| is_c_toothed(w, c)).collect()
}

/// The class of the identity, computed by closure and by the `c`-toothed
/// filter. The two must agree.
pub fn id_class(n: usize, c: usize, limit: usize) -> Result<Vec<Permutation>> {
    let group = SymmetricGroup::with_limit(n, limit)?;
    let closure = id_class_by_closure(n, c)?;
    let teeth = toothed_permutations(&group, c);
    if closure != teeth {
        return Err(Error::IdClassMismatch {
            closure: closure.len(),
            teeth: teeth.len(),
        });
    }
    Ok(closure)
}

/// Number of `c`-toothed permutations among the ranks in `ranks`.
///
/// Disjoint rank ranges can be counted independently and summed.
pub fn count_toothed_in(group: &SymmetricGroup, c: usize, ranks: Range<u64>) -> u64 {
    let mut buf = vec![0u32; group.n()];
    ranks
        .filter(|&r| {
            group.unrank_into(r, &mut buf);
            is_c_toothed(&buf, c)
        })
        .count() as u64
}

/// `T_{3,n}` from `a_n = a_{n-1} + a_{n-2} + 3 a_{n-3}` with
/// `a_0 = a_1 = 1`, `a_2 = 2`, as `a_n - [n even]`. Meaningful for `n >= 3`.
///
/// The generating function is `1 / (1 - x - x^2 - 3x^3) - 1 / (1 - x^2)`.
pub fn t3_recurrence(n_max: usize) -> Vec<u64> {
    let mut a: Vec<u64> = vec![1, 1, 2];
    while a.len() <= n_max {
        let k = a.len();
        a.push(a[k - 1] + a[k - 2] + 3 * a[k - 3]);
    }
    a.truncate(n_max + 1);
    a.iter()
        .enumerate()
        .map(|(n, &x)| x - u64::from(n % 2 == 0))
        .collect()
}

/// Coefficients of `x / (1 - x - x^2 - 3x^3) - 1 / (1 - x^2)` for
/// `0..=n_max`: the recurrence with base `F_1 = 1`, `F_{<1} = 0`.
///
/// This series is shifted by one against enumeration and gives 2 rather
/// than 6 at `n = 3`.
pub fn t3_shifted_series(n_max: usize) -> Vec<i64> {
    let mut f: Vec<i64> = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let at = |k: usize| n.checked_sub(k).map_or(0, |i| f[i]);
        f.push(if n == 1 { 1 } else { at(1) + at(2) + 3 * at(3) });
    }
    f.iter()
        .enumerate()
        .map(|(n, &x)| x - i64::from(n % 2 == 0))
        .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SequenceMethod {
    #[default]
    Bruteforce,
    Recurrence,
    Both,
}

impl SequenceMethod {
    pub fn brute(self) -> bool {
        matches!(self, Self::Bruteforce | Self::Both)
    }

    pub fn recurrence(self) -> bool {
        matches!(self, Self::Recurrence | Self::Both)
    }
}

/// Counts for one `n`, by each method that was run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SequenceEntry {
    pub brute: Option<u64>,
    pub recurrence: Option<u64>,
}

impl SequenceEntry {
    pub fn value(&self) -> Option<u64> {
        self.brute.or(self.recurrence)
    }

    pub fn agrees(&self) -> bool {
        match (self.brute, self.recurrence) {
            (Some(a), Some(b)) => a == b,
            _ => true,
        }
    }
}

/// `T_{c,n}` for `n` from `max(c, 1)` up to a bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceTable {
    pub c: usize,
    pub entries: BTreeMap<usize, SequenceEntry>,
}

impl SequenceTable {
    pub fn agrees(&self) -> bool {
        self.entries.values().all(SequenceEntry::agrees)
    }
}

/// `T_{c,n}` for `c <= n <= n_max`. The recurrence is only known for `c = 3`.
pub fn t_sequence(c: usize, n_max: usize, method: SequenceMethod, limit: usize) -> Result<SequenceTable> {
    if c == 0 {
        return Err(Error::UnsupportedPatternSize(c));
    }
    if method.recurrence() && c != 3 {
        return Err(Error::MethodMismatch(format!("no recurrence is known for c = {c}")));
    }
    if method.brute() && n_max > limit {
        return Err(Error::TooLarge { n: n_max, limit });
    }
    let recurrence = if method.recurrence() { t3_recurrence(n_max) } else { Vec::new() };
    let mut entries = BTreeMap::new();
    for n in c..=n_max {
        let brute = if method.brute() {
            let group = SymmetricGroup::with_limit(n, limit)?;
            Some(count_toothed_in(&group, c, 0..group.order()))
        } else {
            None
        };
        entries.insert(
            n,
            SequenceEntry {
                brute,
                recurrence: recurrence.get(n).copied(),
            },
        );
    }
    Ok(SequenceTable { c, entries })
}

/// A class member that does not factor along its root's runs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureViolation {
    pub root: Permutation,
    pub member: Option<Permutation>,
    pub detail: String,
}

/// Outcome of [`sc_class_structure`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureReport {
    pub n: usize,
    pub c: usize,
    pub classes: usize,
    pub violations: Vec<StructureViolation>,
}

impl StructureReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn is_monotone_increasing(run: &[u32]) -> bool {
    run.windows(2).all(|p| p[0] < p[1])
}

/// Checks that every `S_c` class of `S_n` is the product, along the root's
/// monotone runs, of identity (or reversed identity) classes.
///
/// Each member must cut at the root's run boundaries into segments with the
/// same value sets, each segment `c`-toothed in the run's direction, and the
/// class size must be the product of the `T_{c,m}` for runs of length
/// `m >= c`.
pub fn sc_class_structure(n: usize, c: usize, limit: usize) -> Result<StructureReport> {
    let group = SymmetricGroup::with_limit(n, limit)?;
    let partition = sc_partition(c)?;
    let sys = sc_straightening_set(c)?;
    let (labels, count) = class_labels(&group, &partition);
    let mut members: Vec<Vec<u64>> = vec![Vec::new(); count as usize];
    for (rank, &label) in labels.iter().enumerate() {
        members[label as usize].push(rank as u64);
    }
    let id_sizes: Vec<u64> = (0..=n)
        .map(|m| {
            if m < c {
                1
            } else {
                let g = SymmetricGroup::new(m).expect("m <= n is enumerable");
                count_toothed_in(&g, c, 0..g.order())
            }
        })
        .collect();

    let mut violations = Vec::new();
    for class in &members {
        let first = group.unrank(class[0]);
        let root = normal_form(&first, &sys, None)?;
        let runs = run_bounds(&root);
        let expected: u64 = runs.iter().map(|r| id_sizes[r.len()]).product();
        if expected != class.len() as u64 {
            violations.push(StructureViolation {
                root: root.clone(),
                member: None,
                detail: format!("class has {} members, run product is {expected}", class.len()),
            });
        }
        for &rank in class {
            let u = group.unrank(rank);
            if let Some(detail) = segment_problem(&u, &root, &runs, c) {
                violations.push(StructureViolation {
                    root: root.clone(),
                    member: Some(u),
                    detail,
                });
            }
        }
    }
    Ok(StructureReport {
        n,
        c,
        classes: members.len(),
        violations,
    })
}

fn segment_problem(u: &[u32], root: &[u32], runs: &[Range<usize>], c: usize) -> Option<String> {
    for r in runs {
        let (seg, run) = (&u[r.clone()], &root[r.clone()]);
        let low = *run.iter().min().expect("runs are nonempty");
        if interval_low(seg) != Some(low) {
            return Some(format!("segment {r:?} holds different values than the run"));
        }
        let ok = if r.len() < c {
            seg == run
        } else if is_monotone_increasing(run) {
            is_c_toothed(seg, c)
        } else {
            let reversed: Vec<u32> = seg.iter().rev().copied().collect();
            is_c_toothed(&reversed, c)
        };
        if !ok {
            return Some(format!("segment {r:?} is outside the run's identity class"));
        }
    }
    None
}
