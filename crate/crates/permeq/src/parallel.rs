//! Enumeration of `S_n` split over worker threads by rank range.
//!
//! Shard results are combined in shard order, so every function returns the
//! same value for any worker count.

use std::ops::Range;
use std::thread;

use permeq_core::counting::count_roots_in;
use permeq_core::equivalence::{class_labels, classes_from_labels, rearrangement_union_find, ClassDecomposition};
use permeq_core::sc_family::count_toothed_in;
use permeq_core::{ReplacementPartition, Result, StraighteningSet, SymmetricGroup};

/// Splits `0..order` into at most `jobs` contiguous, nearly equal ranges.
pub fn shards(order: u64, jobs: usize) -> Vec<Range<u64>> {
    let jobs = (jobs.max(1) as u64).min(order.max(1));
    let base = order / jobs;
    let extra = order % jobs;
    let mut start = 0;
    (0..jobs)
        .map(|i| {
            let len = base + u64::from(i < extra);
            let r = start..start + len;
            start += len;
            r
        })
        .collect()
}

/// Runs `work` on every shard, returning results in shard order.
pub fn map_shards<T: Send>(order: u64, jobs: usize, work: impl Fn(Range<u64>) -> T + Sync) -> Vec<T> {
    let ranges = shards(order, jobs);
    if ranges.len() == 1 {
        return ranges.into_iter().map(&work).collect();
    }
    thread::scope(|s| {
        let handles: Vec<_> = ranges.into_iter().map(|r| s.spawn(|| work(r))).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    })
}

/// Class labels numbered by smallest member.
pub fn labels(group: &SymmetricGroup, p: &ReplacementPartition, jobs: usize) -> (Vec<u32>, u32) {
    if jobs <= 1 {
        return class_labels(group, p);
    }
    let mut parts = map_shards(group.order(), jobs, |r| rearrangement_union_find(group, p, r)).into_iter();
    let mut merged = parts.next().expect("at least one shard");
    for mut uf in parts {
        merged.merge(&mut uf);
    }
    merged.labels()
}

pub fn count_classes(group: &SymmetricGroup, p: &ReplacementPartition, jobs: usize) -> u64 {
    u64::from(labels(group, p, jobs).1)
}

pub fn enumerate_classes(
    group: &SymmetricGroup,
    p: &ReplacementPartition,
    roots: Option<&StraighteningSet>,
    jobs: usize,
) -> Result<ClassDecomposition> {
    let (labels, count) = labels(group, p, jobs);
    classes_from_labels(group, p, labels, count, roots)
}

pub fn count_roots(group: &SymmetricGroup, sys: &StraighteningSet, jobs: usize) -> u64 {
    map_shards(group.order(), jobs, |r| count_roots_in(group, sys, r)).into_iter().sum()
}

pub fn count_toothed(group: &SymmetricGroup, c: usize, jobs: usize) -> u64 {
    map_shards(group.order(), jobs, |r| count_toothed_in(group, c, r)).into_iter().sum()
}
