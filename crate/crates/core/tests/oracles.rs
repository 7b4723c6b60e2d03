//! Library results against small independent reimplementations.

use std::collections::{BTreeSet, HashMap, VecDeque};

use permeq_core::counting::{formula_count, pair_families, partition_k, KReading};
use permeq_core::equivalence::{count_classes, enumerate_classes};
use permeq_core::partition::{all_partitions, default_straightening_set, parse_partition};
use permeq_core::perm::tail_size;
use permeq_core::sc_family::{irreducible_blocks, is_c_toothed, t3_recurrence};
use permeq_core::{ReplacementPartition, SymmetricGroup};

fn all_perms(n: usize) -> Vec<Vec<u32>> {
    fn go(prefix: &mut Vec<u32>, left: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..left.len() {
            let v = left.remove(i);
            prefix.push(v);
            go(prefix, left, out);
            prefix.pop();
            left.insert(i, v);
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut (1..=n as u32).collect(), &mut out);
    out
}

fn normalize(win: &[u32]) -> Option<Vec<u32>> {
    let lo = *win.iter().min()?;
    let hi = *win.iter().max()?;
    if (hi - lo) as usize + 1 != win.len() {
        return None;
    }
    Some(win.iter().map(|v| v - lo + 1).collect())
}

/// Class count by flood fill over explicit words.
fn naive_class_count(n: usize, parts: &[Vec<Vec<u32>>]) -> usize {
    let c = parts[0][0].len();
    let mut seen: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut classes = 0;
    for start in all_perms(n) {
        if seen.contains_key(&start) {
            continue;
        }
        seen.insert(start.clone(), classes);
        let mut queue = VecDeque::from([start]);
        while let Some(w) = queue.pop_front() {
            for s in 0..n.saturating_sub(c - 1) {
                let Some(pat) = normalize(&w[s..s + c]) else { continue };
                let lo = w[s..s + c].iter().min().unwrap() - 1;
                let Some(part) = parts.iter().find(|p| p.contains(&pat)) else { continue };
                for alt in part {
                    let mut next = w.clone();
                    for (i, v) in alt.iter().enumerate() {
                        next[s + i] = v + lo;
                    }
                    if !seen.contains_key(&next) {
                        seen.insert(next.clone(), classes);
                        queue.push_back(next);
                    }
                }
            }
        }
        classes += 1;
    }
    classes
}

fn parts_of(p: &ReplacementPartition) -> Vec<Vec<Vec<u32>>> {
    p.parts()
        .iter()
        .map(|part| part.iter().map(|u| u.to_vec()).collect())
        .collect()
}

/// `sum_j (-1)^j m! C(m, j) k^j` with `m = n - (c - 1) j`, in machine integers.
fn naive_formula(n: usize, c: usize, k: i128) -> i128 {
    let fact = |x: usize| (1..=x as i128).product::<i128>();
    let binom = |a: usize, b: usize| fact(a) / (fact(b) * fact(a - b));
    (0..=n / c)
        .map(|j| {
            let m = n - (c - 1) * j;
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * fact(m) * binom(m, j) * k.pow(j as u32)
        })
        .sum()
}

fn naive_tail(w: &[u32]) -> usize {
    let mut sorted = w.to_vec();
    sorted.sort();
    (1..=w.len())
        .find(|&k| {
            let prefix: BTreeSet<u32> = w[..k].iter().copied().collect();
            prefix == sorted[..k].iter().copied().collect()
        })
        .unwrap()
}

fn naive_blocks(w: &[u32]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut rest = w;
    while !rest.is_empty() {
        let k = naive_tail(rest);
        out.push(k);
        rest = &rest[k..];
    }
    out
}

fn naive_toothed(w: &[u32], c: usize) -> bool {
    let b = naive_blocks(w);
    b.iter().all(|&s| s <= c)
        && (0..b.len()).any(|i| (i..b.len()).any(|j| b[i..=j].iter().sum::<usize>() == c))
}

#[test]
fn class_counts_match_flood_fill() {
    let specs = [
        "123,321",
        "123,132,213,231,312,321",
        "123,132|213,231",
        "132,231|213,312",
        "123|321",
    ];
    for spec in specs {
        let p = parse_partition(spec, 3).unwrap();
        for n in 3..=6 {
            let group = SymmetricGroup::new(n).unwrap();
            assert_eq!(
                count_classes(&group, &p) as usize,
                naive_class_count(n, &parts_of(&p)),
                "{spec} n={n}"
            );
        }
    }
    for spec in ["1234,4321", "1234,2134,1243|4321,3421"] {
        let p = parse_partition(spec, 4).unwrap();
        for n in 4..=7 {
            let group = SymmetricGroup::new(n).unwrap();
            assert_eq!(count_classes(&group, &p) as usize, naive_class_count(n, &parts_of(&p)));
        }
    }
}

#[test]
fn every_partition_of_s3_matches_flood_fill_at_five() {
    let group = SymmetricGroup::new(5).unwrap();
    for p in all_partitions(3) {
        assert_eq!(count_classes(&group, &p) as usize, naive_class_count(5, &parts_of(&p)), "{p}");
    }
}

#[test]
fn formula_matches_machine_integer_evaluation() {
    for c in 2..=5 {
        for n in c..=20 {
            for k in 0..=6u64 {
                let big = formula_count(n, c, k).unwrap();
                assert_eq!(big.to_string(), naive_formula(n, c, k as i128).to_string(), "n={n} c={c} k={k}");
            }
        }
    }
}

#[test]
fn formula_matches_flood_fill_for_two_part_pairs() {
    let p = parse_partition("123,321", 3).unwrap();
    let k = partition_k(&p, 0, KReading::PatternFactorial);
    assert_eq!(k, 1);
    let padded = parts_of(&p.padded());
    for n in 3..=7 {
        assert_eq!(
            formula_count(n, 3, k).unwrap().to_string(),
            naive_class_count(n, &padded).to_string()
        );
    }
}

#[test]
fn blocks_and_tail_match_set_based_definitions() {
    for n in 1..=7 {
        for w in all_perms(n) {
            assert_eq!(tail_size(&w).unwrap(), naive_tail(&w));
            assert_eq!(irreducible_blocks(&w).sizes(), naive_blocks(&w));
            for c in 1..=n {
                assert_eq!(is_c_toothed(&w, c), naive_toothed(&w, c), "{w:?} c={c}");
            }
        }
    }
}

#[test]
fn t3_counts_match_enumeration() {
    let expected = [6u64, 10, 23, 51, 108, 228, 493, 1045];
    let recurrence = t3_recurrence(10);
    for (n, &want) in (3..=10).zip(&expected) {
        assert_eq!(recurrence[n], want);
        if n <= 8 {
            let count = all_perms(n).iter().filter(|w| naive_toothed(w, 3)).count() as u64;
            assert_eq!(count, want, "n={n}");
        }
    }
}

#[test]
fn pair_family_census() {
    assert_eq!(pair_families(3, 1).len(), 9);
    assert_eq!(pair_families(3, 2).len(), 18);
    // Every c = 3 family sits in R_3 x L_3 since O_3 is empty.
    for fam in pair_families(3, 2) {
        for (a, b) in fam.pairs() {
            assert_ne!(a.leaning(), b.leaning());
        }
    }
}

#[test]
fn roots_are_sinks_with_matching_count() {
    let p = parse_partition("123,132|213|231,321|312", 3).unwrap();
    let sys = default_straightening_set(&p);
    let group = SymmetricGroup::new(6).unwrap();
    let classes = enumerate_classes(&group, &p, Some(&sys)).unwrap();
    let roots: BTreeSet<_> = classes.classes().iter().map(|c| c.root().unwrap().clone()).collect();
    assert_eq!(roots.len(), classes.len());
}
