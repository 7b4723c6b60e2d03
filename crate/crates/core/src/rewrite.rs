//! Polarization of hits, the straightening step and normal forms.
//!
//! A hit is collapsed to a single letter holding its mean value; the
//! adjacent letter nearest in value decides whether the hit is left or
//! right polarized. A hit is *forward* when its leaning agrees with its
//! polarization. Straightening rearranges a hit into the member of the
//! straightening set chosen for its part and polarization.

use alloc::string::ToString;
use alloc::vec::Vec;

use crate::partition::StraighteningSet;
use crate::perm::{interval_low, leaning_of, relative_rank, Leaning, Pattern, Permutation};
use crate::rank::factorial;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarization {
    Left,
    Right,
}

/// A hit together with its derived classification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hit {
    /// 0-based offset of the first letter.
    pub start: usize,
    pub span: usize,
    pub pattern: Pattern,
    pub leaning: Leaning,
    pub polarization: Polarization,
    pub forward: bool,
}

/// Forward unless polarization and leaning disagree, or the hit is omni.
pub fn is_forward(leaning: Leaning, polarization: Polarization) -> bool {
    matches!(
        (leaning, polarization),
        (Leaning::Right, Polarization::Right) | (Leaning::Left, Polarization::Left)
    )
}

/// Polarization of a window already known to be a hit.
///
/// The mean may be fractional, so distances are compared after scaling by
/// the hit length.
#[inline]
pub(crate) fn polarize(w: &[u32], start: usize, c: usize) -> Polarization {
    let end = start + c;
    if start == 0 && end == w.len() {
        return Polarization::Left;
    }
    let sum: i64 = w[start..end].iter().map(|&v| v as i64).sum();
    let scaled = |x: u32| x as i64 * c as i64;
    let left = start.checked_sub(1).map(|i| w[i]);
    let right = w.get(end).copied();
    let take_left = match (left, right) {
        (Some(l), Some(r)) => (scaled(l) - sum).abs() <= (scaled(r) - sum).abs(),
        (Some(_), None) => true,
        _ => false,
    };
    let increasing = if take_left {
        scaled(left.unwrap()) < sum
    } else {
        sum < scaled(right.unwrap())
    };
    if increasing {
        Polarization::Right
    } else {
        Polarization::Left
    }
}

fn window(w: &[u32], start: usize, c: usize) -> Result<&[u32]> {
    let win = w
        .get(start..start.saturating_add(c))
        .filter(|_| c > 0)
        .ok_or(Error::NotAHit { start, len: c })?;
    interval_low(win).ok_or(Error::NotAHit { start, len: c })?;
    Ok(win)
}

/// Polarization of the hit of length `c` at 0-based offset `start`.
pub fn polarization(w: &[u32], start: usize, c: usize) -> Result<Polarization> {
    window(w, start, c)?;
    Ok(polarize(w, start, c))
}

/// Full classification of the hit at `start`.
pub fn hit_at(w: &[u32], start: usize, c: usize) -> Result<Hit> {
    let win = window(w, start, c)?;
    let pattern = crate::perm::pattern_of(win).expect("window is an interval");
    let leaning = leaning_of(&pattern);
    let polarization = polarize(w, start, c);
    Ok(Hit {
        start,
        span: c,
        forward: is_forward(leaning, polarization),
        pattern,
        leaning,
        polarization,
    })
}

/// Every hit of length `c`, classified, in offset order.
pub fn hits(w: &[u32], c: usize) -> Vec<Hit> {
    if c == 0 || c > w.len() {
        return Vec::new();
    }
    (0..=w.len() - c).filter_map(|s| hit_at(w, s, c).ok()).collect()
}

/// For a window at `start`: `Some((low, current pattern rank, target))` if it
/// is a P-hit.
#[inline]
fn resolve<'a>(w: &[u32], start: usize, sys: &'a StraighteningSet) -> Option<(u32, u64, &'a Pattern)> {
    let c = sys.partition().c();
    let win = &w[start..start + c];
    let low = interval_low(win)?;
    let rank = relative_rank(win);
    let part = sys.partition().part_of_rank(rank)?;
    Some((low, rank, sys.target(part, polarize(w, start, c))))
}

fn resolve_checked<'a>(w: &[u32], start: usize, sys: &'a StraighteningSet) -> Result<(u32, u64, &'a Pattern)> {
    let c = sys.partition().c();
    let win = window(w, start, c)?;
    resolve(w, start, sys).ok_or_else(|| Error::NotAPartitionHit {
        start,
        pattern: crate::perm::pattern_of(win).expect("interval").to_string(),
    })
}

/// Whether the P-hit at `start` is already straightened.
///
/// Polarization does not depend on how the hit's letters are arranged, so a
/// hit is straightened exactly when it already forms the target pattern of
/// its part.
pub fn is_straightened(w: &[u32], start: usize, sys: &StraighteningSet) -> Result<bool> {
    let (_, rank, target) = resolve_checked(w, start, sys)?;
    Ok(rank == target.rank())
}

/// Rearranges the P-hit at `start` into its straightened form.
pub fn straighten(w: &Permutation, start: usize, sys: &StraighteningSet) -> Result<Permutation> {
    let (low, _, target) = resolve_checked(w, start, sys)?;
    let mut values = w.as_slice().to_vec();
    for (slot, v) in values[start..].iter_mut().zip(target.shifted(low)) {
        *slot = v;
    }
    Ok(Permutation::from_vec_unchecked(values))
}

/// Offsets of P-hits that are not straightened.
pub fn pending_hits(w: &[u32], sys: &StraighteningSet) -> Vec<usize> {
    let mut out = Vec::new();
    pending_into(w, sys, &mut out);
    out
}

#[inline]
pub(crate) fn pending_into(w: &[u32], sys: &StraighteningSet, out: &mut Vec<usize>) {
    out.clear();
    let c = sys.partition().c();
    if c > w.len() {
        return;
    }
    for start in 0..=w.len() - c {
        if let Some((_, rank, target)) = resolve(w, start, sys) {
            if rank != target.rank() {
                out.push(start);
            }
        }
    }
}

/// Calls `f(start, successor)` for each straightening step out of `w`.
///
/// `w` is modified in place during the call and restored afterwards.
pub(crate) fn for_each_step(w: &mut [u32], sys: &StraighteningSet, mut f: impl FnMut(usize, &[u32])) {
    let c = sys.partition().c();
    if c > w.len() {
        return;
    }
    let mut saved = [0u32; crate::partition::MAX_PATTERN_SIZE];
    for start in 0..=w.len() - c {
        let Some((low, rank, target)) = resolve(w, start, sys) else {
            continue;
        };
        if rank == target.rank() {
            continue;
        }
        saved[..c].copy_from_slice(&w[start..start + c]);
        for (slot, v) in w[start..start + c].iter_mut().zip(target.shifted(low)) {
            *slot = v;
        }
        f(start, w);
        w[start..start + c].copy_from_slice(&saved[..c]);
    }
}

/// Every permutation reachable from `w` by one straightening step, sorted.
pub fn straightening_successors(w: &Permutation, sys: &StraighteningSet) -> Vec<Permutation> {
    let mut buf = w.as_slice().to_vec();
    let mut out = Vec::new();
    for_each_step(&mut buf, sys, |_, next| {
        out.push(Permutation::from_vec_unchecked(next.to_vec()))
    });
    out.sort();
    out.dedup();
    out
}

/// `2 * n * n!`, saturating.
pub fn default_step_budget(n: usize) -> u64 {
    if n > 20 {
        return u64::MAX;
    }
    factorial(n).saturating_mul(2 * n as u64)
}

/// One applied straightening.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    /// 0-based offset of the straightened hit.
    pub start: usize,
    pub from: Pattern,
    pub to: Pattern,
    pub after: Permutation,
}

/// Straightens until no P-hit is left unstraightened, choosing among pending
/// hits with `choose` (given the pending offsets, returns an index into them).
pub fn normal_form_by(
    w: &Permutation,
    sys: &StraighteningSet,
    budget: Option<u64>,
    mut choose: impl FnMut(&[usize]) -> usize,
) -> Result<Permutation> {
    let budget = budget.unwrap_or_else(|| default_step_budget(w.len()));
    let c = sys.partition().c();
    let mut cur = w.as_slice().to_vec();
    let mut pending = Vec::new();
    let mut steps = 0u64;
    loop {
        pending_into(&cur, sys, &mut pending);
        if pending.is_empty() {
            return Ok(Permutation::from_vec_unchecked(cur));
        }
        if steps == budget {
            return Err(Error::StepBudgetExceeded(budget));
        }
        let start = pending[choose(&pending)];
        let (low, _, target) = resolve(&cur, start, sys).expect("pending hit");
        for (slot, v) in cur[start..start + c].iter_mut().zip(target.shifted(low)) {
            *slot = v;
        }
        steps += 1;
    }
}

/// Normal form using the leftmost pending hit at every step.
pub fn normal_form(w: &Permutation, sys: &StraighteningSet, budget: Option<u64>) -> Result<Permutation> {
    normal_form_by(w, sys, budget, |_| 0)
}

/// [`normal_form`] together with every step taken.
pub fn normal_form_trace(
    w: &Permutation,
    sys: &StraighteningSet,
    budget: Option<u64>,
) -> Result<(Permutation, Vec<Step>)> {
    let budget = budget.unwrap_or_else(|| default_step_budget(w.len()));
    let mut cur = w.clone();
    let mut steps = Vec::new();
    while let Some(&start) = pending_hits(&cur, sys).first() {
        if steps.len() as u64 == budget {
            return Err(Error::StepBudgetExceeded(budget));
        }
        let c = sys.partition().c();
        let from = crate::perm::pattern_of(&cur[start..start + c]).expect("hit");
        let after = straighten(&cur, start, sys)?;
        let to = crate::perm::pattern_of(&after[start..start + c]).expect("hit");
        steps.push(Step {
            start,
            from,
            to,
            after: after.clone(),
        });
        cur = after;
    }
    Ok((cur, steps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{default_straightening_set, parse_partition};

    fn w(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn sys(spec: &str, members: &str) -> StraighteningSet {
        let p: crate::ReplacementPartition = spec.parse().unwrap();
        StraighteningSet::parse(p, members).unwrap()
    }

    #[test]
    fn polarization_examples() {
        assert_eq!(polarization(&w("1456237"), 1, 3), Ok(Polarization::Left));
        assert_eq!(polarization(&w("85671234"), 1, 3), Ok(Polarization::Left));
        assert_eq!(polarization(&w("123"), 0, 3), Ok(Polarization::Left));
        assert_eq!(polarization(&w("125436"), 2, 3), Ok(Polarization::Right));
        assert_eq!(polarization(&w("1456237"), 0, 3), Err(Error::NotAHit { start: 0, len: 3 }));
        assert_eq!(polarization(&w("123"), 2, 3), Err(Error::NotAHit { start: 2, len: 3 }));
    }

    #[test]
    fn hit_classification() {
        let h = hit_at(&w("85671234"), 1, 3).unwrap();
        assert_eq!(h.leaning, Leaning::Right);
        assert_eq!(h.polarization, Polarization::Left);
        assert!(!h.forward);
        let all = hits(&w("87651234"), 3);
        assert_eq!(all.iter().map(|h| h.start).collect::<Vec<_>>(), [0, 1, 4, 5]);
        assert!(all.iter().all(|h| h.forward));
    }

    #[test]
    fn straightening_examples() {
        let s = sys("123,213,321", "123,321");
        assert_eq!(is_straightened(&w("85671234"), 1, &s), Ok(false));
        assert_eq!(straighten(&w("85671234"), 1, &s).unwrap(), w("87651234"));
        assert_eq!(is_straightened(&w("87651234"), 1, &s), Ok(true));
        assert_eq!(straighten(&w("87651234"), 1, &s).unwrap(), w("87651234"));
        let err = is_straightened(&w("85671234"), 0, &s).unwrap_err();
        assert_eq!(err, Error::NotAHit { start: 0, len: 3 });
        let s2 = sys("132", "132");
        assert!(matches!(is_straightened(&w("1234"), 0, &s2), Err(Error::NotAPartitionHit { .. })));
    }

    #[test]
    fn fig_two_class_root() {
        let p = parse_partition("123,321|132|213|231|312", 3).unwrap();
        let c = default_straightening_set(&p);
        assert_eq!(straighten(&w("125436"), 2, &c).unwrap(), w("123456"));
        assert!(straightening_successors(&w("125436"), &c).contains(&w("123456")));
        assert_eq!(normal_form(&w("125436"), &c, None).unwrap(), w("123456"));
        assert!(straightening_successors(&w("123456"), &c).is_empty());
        let (root, trace) = normal_form_trace(&w("125436"), &c, None).unwrap();
        assert_eq!(root, w("123456"));
        assert_eq!(trace.len(), 1);
        assert_eq!(trace[0].start, 2);
        assert_eq!(trace[0].from.to_string(), "321");
        assert_eq!(trace[0].to.to_string(), "123");
    }

    #[test]
    fn no_hits_no_successors() {
        let s = sys("123,321", "123,321");
        assert!(straightening_successors(&w("2413"), &s).is_empty());
        assert_eq!(normal_form(&w("2413"), &s, None).unwrap(), w("2413"));
    }

    #[test]
    fn budget() {
        let s = sys("123,321", "123,321");
        assert_eq!(normal_form(&w("125436"), &s, Some(0)), Err(Error::StepBudgetExceeded(0)));
        assert_eq!(default_step_budget(3), 36);
    }

    #[test]
    fn whole_word_root_is_decreasing() {
        let s = sys("123,321", "123,321");
        assert_eq!(normal_form(&w("123"), &s, None).unwrap(), w("321"));
    }
}
