use proptest::prelude::*;

use permeq_core::counting::formula_count;
use permeq_core::equivalence::{class_of, count_classes};
use permeq_core::partition::{default_straightening_set, validate_straightening_set};
use permeq_core::perm::{leaning_of, pattern_of};
use permeq_core::rank::factorial;
use permeq_core::rewrite::{hits, pending_hits, polarization, straighten};
use permeq_core::sc_family::sc_straightening_set;
use permeq_core::{Leaning, Pattern, Permutation, ReplacementPartition, SymmetricGroup};

fn permutation(max: usize) -> impl Strategy<Value = Vec<u32>> {
    (1..=max).prop_flat_map(|n| Just((1..=n as u32).collect::<Vec<_>>()).prop_shuffle())
}

/// A random partition of `S_c` from a restricted growth string.
fn partition(c: usize) -> impl Strategy<Value = ReplacementPartition> {
    let all = Pattern::all(c);
    let len = all.len();
    proptest::collection::vec(0..len, len).prop_map(move |raw| {
        let mut growth = Vec::with_capacity(len);
        let mut blocks = 0;
        for r in raw {
            let g = r % (blocks + 1);
            if g == blocks {
                blocks += 1;
            }
            growth.push(g);
        }
        let mut parts = vec![Vec::new(); blocks];
        for (u, g) in all.iter().zip(growth) {
            parts[g].push(u.clone());
        }
        ReplacementPartition::new(c, parts).unwrap()
    })
}

fn mirrored(l: Leaning) -> Leaning {
    match l {
        Leaning::Left => Leaning::Right,
        Leaning::Right => Leaning::Left,
        Leaning::Omni => Leaning::Omni,
    }
}

proptest! {
    #[test]
    fn leaning_mirrors_under_reversal(w in permutation(9)) {
        let mut r = w.clone();
        r.reverse();
        prop_assert_eq!(leaning_of(&r), mirrored(leaning_of(&w)));
    }

    #[test]
    fn rank_round_trip(w in permutation(10)) {
        let group = SymmetricGroup::new(w.len()).unwrap();
        let back = group.unrank(group.rank(&w));
        prop_assert_eq!(back.as_slice(), &w[..]);
    }

    #[test]
    fn polarization_ignores_arrangement_inside_hit(
        w in permutation(9),
        c in 2usize..5,
        order in Just((0..4usize).collect::<Vec<_>>()).prop_shuffle(),
    ) {
        for h in hits(&w, c) {
            let mut v = w.clone();
            let mut inside: Vec<u32> = v[h.start..h.start + c].to_vec();
            inside.sort();
            let picked: Vec<u32> = order.iter().filter(|&&i| i < c).map(|&i| inside[i]).collect();
            v[h.start..h.start + c].copy_from_slice(&picked);
            prop_assert_eq!(polarization(&v, h.start, c).unwrap(), h.polarization);
        }
    }

    #[test]
    fn straightening_keeps_values_in_place(w in permutation(9), p in partition(3)) {
        let sys = default_straightening_set(&p);
        let w = Permutation::new(w).unwrap();
        for s in pending_hits(&w, &sys) {
            let next = straighten(&w, s, &sys).unwrap();
            let mut before = w[s..s + 3].to_vec();
            let mut after = next[s..s + 3].to_vec();
            before.sort();
            after.sort();
            prop_assert_eq!(before, after);
            prop_assert_eq!(&w[..s], &next[..s]);
            prop_assert_eq!(&w[s + 3..], &next[s + 3..]);
            let from = pattern_of(&w[s..s + 3]).unwrap();
            let to = pattern_of(&next[s..s + 3]).unwrap();
            prop_assert_eq!(p.part_index(&from), p.part_index(&to));
        }
    }

    #[test]
    fn default_straightening_sets_validate(p in partition(3), q in partition(4)) {
        for p in [p, q] {
            let sys = default_straightening_set(&p);
            prop_assert!(validate_straightening_set(&p, sys.members()));
        }
    }

    #[test]
    fn reversal_preserves_class_count(p in partition(3), n in 3usize..7) {
        let group = SymmetricGroup::new(n).unwrap();
        prop_assert_eq!(count_classes(&group, &p), count_classes(&group, &p.reversed()));
    }

    #[test]
    fn formula_decreases_in_k(n in 4usize..30, c in 2usize..6, k in 0u64..20) {
        prop_assume!(c <= n && k + 1 < factorial(c));
        prop_assert!(formula_count(n, c, k).unwrap() >= formula_count(n, c, k + 1).unwrap());
    }

    #[test]
    fn sc_normal_form_is_a_sink_in_the_class(w in permutation(7), c in 2usize..5) {
        prop_assume!(c <= w.len());
        let sys = sc_straightening_set(c).unwrap();
        let w = Permutation::new(w).unwrap();
        let root = permeq_core::rewrite::normal_form(&w, &sys, None).unwrap();
        prop_assert!(pending_hits(&root, &sys).is_empty());
        prop_assert!(class_of(&w, sys.partition()).contains(&root));
    }
}
