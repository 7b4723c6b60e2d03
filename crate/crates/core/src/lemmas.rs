//! Property suites for the structural facts the confluence results rest on.
//!
//! Each check inspects one word (or one pattern, or one pair of equivalent
//! words) and returns a description of the first violation found. The
//! drivers run every check exhaustively over `S_n` or on random words.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::counting::{max_pairs, sample_pair_family};
use crate::equivalence::{class_labels, for_each_rearrangement};
use crate::partition::{all_partitions, default_straightening_set, ReplacementPartition, StraighteningSet};
use crate::perm::{interval_low, leaning_of, Leaning, Pattern, Permutation};
use crate::rank::{factorial, SymmetricGroup};
use crate::rewrite::{hit_at, hits, pending_hits, straighten};
use crate::sc_family::{alpha, alpha_hat, sc_partition, sc_straightening_set};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Lemma {
    /// Overlapping hits are both forward with equal leaning.
    OverlappingHits,
    /// Equivalent words order letters `c` or more apart identically.
    LetterOrder,
    /// A rearrangement keeps every comparison involving a letter outside it.
    LocalOrderChange,
    /// Forward steps keep the number of pending backward hits; backward
    /// steps lower it by one.
    IgnoreBackwardHits,
    /// Sorting part of a right-leaning hit keeps it right leaning.
    StayInR,
    /// A straightening step leaves every other hit a hit.
    HitMaintaining,
}

impl Lemma {
    pub const ALL: [Lemma; 6] = [
        Lemma::OverlappingHits,
        Lemma::LetterOrder,
        Lemma::LocalOrderChange,
        Lemma::IgnoreBackwardHits,
        Lemma::StayInR,
        Lemma::HitMaintaining,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Lemma::OverlappingHits => "overlapping-hits",
            Lemma::LetterOrder => "letter-order",
            Lemma::LocalOrderChange => "local-order-change",
            Lemma::IgnoreBackwardHits => "ignore-backward-hits",
            Lemma::StayInR => "stay-in-r",
            Lemma::HitMaintaining => "hit-maintaining",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub word: Permutation,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaTally {
    pub lemma: Lemma,
    pub checks: u64,
    pub violations: u64,
    pub first: Option<Violation>,
}

/// Per-lemma check and violation counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub tallies: Vec<LemmaTally>,
}

impl SuiteReport {
    fn new() -> Self {
        Self {
            tallies: Lemma::ALL
                .iter()
                .map(|&lemma| LemmaTally {
                    lemma,
                    checks: 0,
                    violations: 0,
                    first: None,
                })
                .collect(),
        }
    }

    fn record(&mut self, lemma: Lemma, word: &[u32], outcome: Option<String>) {
        let tally = &mut self.tallies[lemma as usize];
        tally.checks += 1;
        if let Some(detail) = outcome {
            tally.violations += 1;
            tally.first.get_or_insert_with(|| Violation {
                word: Permutation::from_vec_unchecked(word.to_vec()),
                detail,
            });
        }
    }

    pub fn tally(&self, lemma: Lemma) -> &LemmaTally {
        &self.tallies[lemma as usize]
    }

    pub fn passed(&self) -> bool {
        self.tallies.iter().all(|t| t.violations == 0)
    }

    pub fn merge(&mut self, other: SuiteReport) {
        for (mine, theirs) in self.tallies.iter_mut().zip(other.tallies) {
            mine.checks += theirs.checks;
            mine.violations += theirs.violations;
            if mine.first.is_none() {
                mine.first = theirs.first;
            }
        }
    }
}

/// Every pair of overlapping size-`c` hits of `w` is forward with a common
/// leaning.
pub fn overlapping_hits_problem(w: &[u32], c: usize) -> Option<String> {
    let hs = hits(w, c);
    for (i, h) in hs.iter().enumerate() {
        for g in hs[i + 1..].iter().take_while(|g| g.start < h.start + c) {
            if !h.forward || !g.forward || h.leaning != g.leaning {
                return Some(format!(
                    "hits at {} ({}, {:?}, forward {}) and {} ({}, {:?}, forward {})",
                    h.start, h.pattern, h.leaning, h.forward, g.start, g.pattern, g.leaning, g.forward
                ));
            }
        }
    }
    None
}

/// Comparisons between `a` and `b` agree for every pair of positions at
/// distance `c` or more.
pub fn letter_order_problem(a: &[u32], b: &[u32], c: usize) -> Option<String> {
    for i in 0..a.len() {
        for j in i + c..a.len() {
            if (a[i] < a[j]) != (b[i] < b[j]) {
                return Some(format!("positions {i} and {j} compare differently"));
            }
        }
    }
    None
}

/// Every single rearrangement of `w` keeps each comparison that involves a
/// letter outside the rearranged hit.
pub fn local_order_change_problem(w: &[u32], p: &ReplacementPartition) -> Option<String> {
    let c = p.c();
    let original = w.to_vec();
    let mut buf = original.clone();
    let mut problem = None;
    for_each_rearrangement(&mut buf, p, |start, next| {
        if problem.is_some() {
            return;
        }
        for i in (0..next.len()).filter(|i| !(start..start + c).contains(i)) {
            for j in 0..next.len() {
                if (original[i] < original[j]) != (next[i] < next[j]) {
                    problem = Some(format!("rearranging at {start} flips positions {i} and {j}"));
                    return;
                }
            }
        }
    });
    problem
}

fn backward_pending(w: &[u32], sys: &StraighteningSet) -> usize {
    let c = sys.partition().c();
    pending_hits(w, sys)
        .into_iter()
        .filter(|&s| !hit_at(w, s, c).expect("pending hits are hits").forward)
        .count()
}

/// Straightening a forward hit keeps the number of pending backward hits;
/// straightening a pending backward hit lowers it by exactly one.
pub fn ignore_backward_hits_problem(w: &Permutation, sys: &StraighteningSet) -> Option<String> {
    let c = sys.partition().c();
    let before = backward_pending(w, sys);
    for s in pending_hits(w, sys) {
        let forward = hit_at(w, s, c).expect("pending hits are hits").forward;
        let next = straighten(w, s, sys).expect("pending hits are P-hits");
        let after = backward_pending(&next, sys);
        let expected = if forward { before } else { before - 1 };
        if after != expected {
            return Some(format!(
                "straightening the {} hit at {s} leaves {after} pending backward hits, expected {expected}",
                if forward { "forward" } else { "backward" }
            ));
        }
    }
    None
}

/// Sorting any contiguous part of a right-leaning pattern into increasing
/// order keeps it right leaning.
pub fn stay_in_r_pattern_problem(u: &Pattern) -> Option<String> {
    if u.leaning() != Leaning::Right {
        return None;
    }
    let mut buf = u.as_slice().to_vec();
    for a in 0..u.size() {
        for b in a + 2..=u.size() {
            buf.copy_from_slice(u);
            buf[a..b].sort_unstable();
            if leaning_of(&buf) != Leaning::Right {
                return Some(format!("sorting letters {a}..{b} of {u} leaves it not right leaning"));
            }
        }
    }
    None
}

/// Straightening any pending hit of `w` under `(R_c, {alpha})` leaves every
/// other hit that formed a right-leaning pattern still forming one.
pub fn stay_in_r_word_problem(w: &Permutation, right: &StraighteningSet) -> Option<String> {
    let c = right.partition().c();
    let in_r: Vec<usize> = hits(w, c)
        .into_iter()
        .filter(|h| h.leaning == Leaning::Right)
        .map(|h| h.start)
        .collect();
    for s in pending_hits(w, right) {
        let next = straighten(w, s, right).expect("pending hits are P-hits");
        for &t in in_r.iter().filter(|&&t| t != s) {
            let win = &next[t..t + c];
            if interval_low(win).is_none() || leaning_of(win) != Leaning::Right {
                return Some(format!("straightening at {s} moves the hit at {t} out of R_c"));
            }
        }
    }
    None
}

/// Straightening any pending hit of `w` under `(S_c, {alpha, alpha_hat})`
/// leaves every other hit's window an interval.
pub fn hit_maintaining_problem(w: &Permutation, sc: &StraighteningSet) -> Option<String> {
    let c = sc.partition().c();
    let starts: Vec<usize> = hits(w, c).into_iter().map(|h| h.start).collect();
    for s in pending_hits(w, sc) {
        let next = straighten(w, s, sc).expect("pending hits are P-hits");
        for &t in starts.iter().filter(|&&t| t != s) {
            if interval_low(&next[t..t + c]).is_none() {
                return Some(format!("straightening at {s} breaks the hit at {t}"));
            }
        }
    }
    None
}

/// The single-part partition of the right-leaning patterns with target
/// `alpha`.
pub fn right_straightening_set(c: usize) -> Result<StraighteningSet> {
    let right = Pattern::all(c).into_iter().filter(|u| u.leaning() == Leaning::Right).collect();
    StraighteningSet::new(ReplacementPartition::new(c, vec![right])?, [alpha(c)])
}

fn left_straightening_set(c: usize) -> Result<StraighteningSet> {
    let left = Pattern::all(c).into_iter().filter(|u| u.leaning() == Leaning::Left).collect();
    StraighteningSet::new(ReplacementPartition::new(c, vec![left])?, [alpha_hat(c)])
}

/// Straightening systems to run the backward-hit check against: every
/// partition of `S_c` with its default set when `c <= 3`, otherwise a fixed
/// selection of single-part and singleton systems.
pub fn lemma_systems(c: usize) -> Result<Vec<StraighteningSet>> {
    if c <= 3 {
        return Ok(all_partitions(c).map(|p| default_straightening_set(&p)).collect());
    }
    Ok(vec![
        sc_straightening_set(c)?,
        right_straightening_set(c)?,
        left_straightening_set(c)?,
        default_straightening_set(&ReplacementPartition::singletons(c)?),
    ])
}

struct Checker {
    c: usize,
    sc_partition: ReplacementPartition,
    sc: StraighteningSet,
    right: StraighteningSet,
}

impl Checker {
    fn new(c: usize) -> Result<Self> {
        Ok(Self {
            c,
            sc_partition: sc_partition(c)?,
            sc: sc_straightening_set(c)?,
            right: right_straightening_set(c)?,
        })
    }

    /// Every single-word check except the backward-hit one.
    fn word(&self, w: &Permutation, report: &mut SuiteReport) {
        report.record(Lemma::OverlappingHits, w, overlapping_hits_problem(w, self.c));
        report.record(Lemma::LocalOrderChange, w, local_order_change_problem(w, &self.sc_partition));
        report.record(Lemma::StayInR, w, stay_in_r_word_problem(w, &self.right));
        report.record(Lemma::HitMaintaining, w, hit_maintaining_problem(w, &self.sc));
    }
}

/// Runs every check on every word of `S_n` for `c <= n <= max_n`, on every
/// pattern of `S_c`, and compares every member of every `S_c` class against
/// its smallest member. The backward-hit check runs once per system.
pub fn exhaustive_suite(
    c: usize,
    max_n: usize,
    systems: &[StraighteningSet],
    limit: usize,
) -> Result<SuiteReport> {
    let checker = Checker::new(c)?;
    let mut report = SuiteReport::new();
    for u in Pattern::all(c) {
        report.record(Lemma::StayInR, &u, stay_in_r_pattern_problem(&u));
    }
    for n in c..=max_n {
        let group = SymmetricGroup::with_limit(n, limit)?;
        let (labels, count) = class_labels(&group, &checker.sc_partition);
        let mut first_member: Vec<Option<Permutation>> = vec![None; count as usize];
        for w in group.iter() {
            checker.word(&w, &mut report);
            for sys in systems {
                report.record(Lemma::IgnoreBackwardHits, &w, ignore_backward_hits_problem(&w, sys));
            }
            let label = labels[group.rank(&w) as usize] as usize;
            match &first_member[label] {
                None => first_member[label] = Some(w),
                Some(rep) => report.record(Lemma::LetterOrder, &w, letter_order_problem(rep, &w, c)),
            }
        }
    }
    Ok(report)
}

/// A random permutation of size `n`: uniform half of the time, otherwise
/// built from randomly arranged value intervals so that hits are common.
pub fn random_word<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Permutation {
    let mut values: Vec<u32> = (1..=n as u32).collect();
    if rng.gen_bool(0.5) {
        values.shuffle(rng);
        return Permutation::from_vec_unchecked(values);
    }
    let mut sizes = Vec::new();
    let mut left = n;
    while left > 0 {
        let s = rng.gen_range(1..=left.min(n.div_ceil(2)).max(1));
        sizes.push(s);
        left -= s;
    }
    let mut value_order: Vec<usize> = (0..sizes.len()).collect();
    value_order.shuffle(rng);
    let mut low = vec![0u32; sizes.len()];
    let mut next = 1u32;
    for &b in &value_order {
        low[b] = next;
        next += sizes[b] as u32;
    }
    values.clear();
    for (b, &s) in sizes.iter().enumerate() {
        let mut block: Vec<u32> = (low[b]..low[b] + s as u32).collect();
        block.shuffle(rng);
        values.extend(block);
    }
    Permutation::from_vec_unchecked(values)
}

fn random_walk<R: Rng + ?Sized>(w: &Permutation, p: &ReplacementPartition, steps: usize, rng: &mut R) -> Permutation {
    let mut cur = w.as_slice().to_vec();
    let mut options: Vec<Vec<u32>> = Vec::new();
    for _ in 0..steps {
        options.clear();
        for_each_rearrangement(&mut cur, p, |_, next| options.push(next.to_vec()));
        match options.choose(rng) {
            Some(next) => cur.clone_from(next),
            None => break,
        }
    }
    Permutation::from_vec_unchecked(cur)
}

/// Runs every check on `trials` random words of size `n`.
///
/// Each trial also walks up to 30 random `S_c` rearrangements away for the
/// letter-order check, draws a random right-leaning pattern, and draws the
/// backward-hit system from [`lemma_systems`] or a random pair family.
pub fn random_suite<R: Rng + ?Sized>(c: usize, n: usize, trials: u64, rng: &mut R) -> Result<SuiteReport> {
    let checker = Checker::new(c)?;
    let mut systems = if factorial(c) <= 24 { lemma_systems(c)? } else { Vec::new() };
    if systems.len() > 16 {
        systems.shuffle(rng);
        systems.truncate(16);
    }
    let right: Vec<Pattern> = checker.right.partition().support().cloned().collect();
    let mut report = SuiteReport::new();
    for _ in 0..trials {
        let w = random_word(n, rng);
        checker.word(&w, &mut report);

        let steps = rng.gen_range(1..=30);
        let other = random_walk(&w, &checker.sc_partition, steps, rng);
        report.record(Lemma::LetterOrder, &w, letter_order_problem(&w, &other, c));

        if let Some(u) = right.choose(rng) {
            report.record(Lemma::StayInR, u, stay_in_r_pattern_problem(u));
        }

        let sys = if systems.is_empty() || rng.gen_bool(0.5) {
            let k = rng.gen_range(1..=max_pairs(c));
            default_straightening_set(&sample_pair_family(c, k, rng)?.to_partition())
        } else {
            systems.choose(rng).expect("nonempty").clone()
        };
        report.record(Lemma::IgnoreBackwardHits, &w, ignore_backward_hits_problem(&w, &sys));
    }
    Ok(report)
}
