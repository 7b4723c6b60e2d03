//! The P-equivalence on `S_n`: rearrangement moves, class enumeration and
//! empirical confluence checks of the straightening operator.

use alloc::collections::VecDeque;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::partition::{ReplacementPartition, StraighteningSet};
use crate::perm::{interval_low, relative_rank, Permutation};
use crate::rank::SymmetricGroup;
use crate::rewrite::{default_step_budget, for_each_step, pending_into};
use crate::union_find::UnionFind;
use crate::{Error, Result};

const UNSET: u32 = u32::MAX;

/// Calls `f(start, neighbor)` for every single P-rearrangement of `w`.
///
/// `w` is modified in place during the call and restored afterwards.
pub fn for_each_rearrangement(w: &mut [u32], p: &ReplacementPartition, mut f: impl FnMut(usize, &[u32])) {
    let c = p.c();
    if c > w.len() {
        return;
    }
    let mut saved = [0u32; crate::partition::MAX_PATTERN_SIZE];
    for start in 0..=w.len() - c {
        let win = &w[start..start + c];
        let Some(low) = interval_low(win) else {
            continue;
        };
        let rank = relative_rank(win);
        let Some(part) = p.part_of_rank(rank) else {
            continue;
        };
        let part = &p.parts()[part];
        if part.len() < 2 {
            continue;
        }
        saved[..c].copy_from_slice(&w[start..start + c]);
        for alt in part {
            if alt.rank() == rank {
                continue;
            }
            for (slot, v) in w[start..start + c].iter_mut().zip(alt.shifted(low)) {
                *slot = v;
            }
            f(start, w);
        }
        w[start..start + c].copy_from_slice(&saved[..c]);
    }
}

/// Every `w' != w` one P-rearrangement away from `w`, sorted.
pub fn rearrangement_neighbors(w: &Permutation, p: &ReplacementPartition) -> Vec<Permutation> {
    let mut buf = w.as_slice().to_vec();
    let mut out = Vec::new();
    for_each_rearrangement(&mut buf, p, |_, next| {
        out.push(Permutation::from_vec_unchecked(next.to_vec()))
    });
    out.sort();
    out.dedup();
    out
}

/// Class label of every rank in `S_n` (labels ordered by smallest member)
/// and the number of classes.
///
/// Breadth-first closure with an explicit work queue over ranks.
pub fn class_labels(group: &SymmetricGroup, p: &ReplacementPartition) -> (Vec<u32>, u32) {
    let order = group.order() as usize;
    let mut labels = vec![UNSET; order];
    let mut queue = VecDeque::new();
    let mut buf = vec![0u32; group.n()];
    let mut next = 0u32;
    for seed in 0..order {
        if labels[seed] != UNSET {
            continue;
        }
        labels[seed] = next;
        queue.push_back(seed as u32);
        while let Some(r) = queue.pop_front() {
            group.unrank_into(r as u64, &mut buf);
            for_each_rearrangement(&mut buf, p, |_, nb| {
                let s = relative_rank(nb) as usize;
                if labels[s] == UNSET {
                    labels[s] = next;
                    queue.push_back(s as u32);
                }
            });
        }
        next += 1;
    }
    (labels, next)
}

/// Number of P-equivalence classes in `S_n`.
pub fn count_classes(group: &SymmetricGroup, p: &ReplacementPartition) -> u64 {
    class_labels(group, p).1 as u64
}

/// The class of `w`, sorted.
pub fn class_of(w: &Permutation, p: &ReplacementPartition) -> Vec<Permutation> {
    let mut seen = alloc::collections::BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(w.clone());
    queue.push_back(w.clone());
    while let Some(cur) = queue.pop_front() {
        for nb in rearrangement_neighbors(&cur, p) {
            if seen.insert(nb.clone()) {
                queue.push_back(nb);
            }
        }
    }
    seen.into_iter().collect()
}

/// One equivalence class, members stored as ranks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceClass {
    members: Vec<u64>,
    root: Option<Permutation>,
}

impl EquivalenceClass {
    pub fn size(&self) -> usize {
        self.members.len()
    }

    /// Member ranks, increasing.
    pub fn member_ranks(&self) -> &[u64] {
        &self.members
    }

    pub fn root(&self) -> Option<&Permutation> {
        self.root.as_ref()
    }
}

/// The classes of `S_n` under a partition.
#[derive(Clone, Debug)]
pub struct ClassDecomposition {
    group: SymmetricGroup,
    partition: ReplacementPartition,
    classes: Vec<EquivalenceClass>,
    labels: Vec<u32>,
}

impl ClassDecomposition {
    pub fn n(&self) -> usize {
        self.group.n()
    }

    pub fn group(&self) -> &SymmetricGroup {
        &self.group
    }

    pub fn partition(&self) -> &ReplacementPartition {
        &self.partition
    }

    /// Classes ordered by smallest member.
    pub fn classes(&self) -> &[EquivalenceClass] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Index of the class containing `w`.
    pub fn class_index(&self, w: &[u32]) -> usize {
        self.labels[self.group.rank(w) as usize] as usize
    }

    pub fn members(&self, class: usize) -> impl Iterator<Item = Permutation> + '_ {
        self.classes[class].members.iter().map(|&r| self.group.unrank(r))
    }
}

/// Enumerates the classes of `S_n` under `p`.
///
/// With `roots`, every class records the leftmost-strategy normal form of
/// its members; all members must agree, otherwise [`Error::RootMismatch`].
pub fn enumerate_classes(
    group: &SymmetricGroup,
    p: &ReplacementPartition,
    roots: Option<&StraighteningSet>,
) -> Result<ClassDecomposition> {
    let (labels, count) = class_labels(group, p);
    classes_from_labels(group, p, labels, count, roots)
}

/// Unions every rank in `ranks` with its single-rearrangement neighbors.
///
/// Shards over disjoint rank ranges can be built independently and combined
/// with [`UnionFind::merge`]; the labels of the merged structure are those
/// of [`class_labels`].
pub fn rearrangement_union_find(group: &SymmetricGroup, p: &ReplacementPartition, ranks: Range<u64>) -> UnionFind {
    let mut uf = UnionFind::new(group.order() as usize);
    let mut buf = vec![0u32; group.n()];
    for r in ranks {
        group.unrank_into(r, &mut buf);
        for_each_rearrangement(&mut buf, p, |_, nb| {
            uf.union(r as u32, relative_rank(nb) as u32);
        });
    }
    uf
}

/// [`enumerate_classes`] from labels computed elsewhere, numbered by
/// smallest member as [`class_labels`] numbers them.
pub fn classes_from_labels(
    group: &SymmetricGroup,
    p: &ReplacementPartition,
    labels: Vec<u32>,
    count: u32,
    roots: Option<&StraighteningSet>,
) -> Result<ClassDecomposition> {
    let mut classes: Vec<EquivalenceClass> = (0..count)
        .map(|_| EquivalenceClass {
            members: Vec::new(),
            root: None,
        })
        .collect();
    for (r, &l) in labels.iter().enumerate() {
        classes[l as usize].members.push(r as u64);
    }
    if let Some(sys) = roots {
        if sys.partition().padded() != p.padded() {
            return Err(Error::InvalidStraighteningSet(
                "straightening set belongs to a different partition".into(),
            ));
        }
        let nf = leftmost_normal_forms(group, sys)?;
        for class in &mut classes {
            let first = nf[class.members[0] as usize];
            if let Some(&other) = class.members.iter().map(|&r| &nf[r as usize]).find(|&&x| x != first) {
                return Err(Error::RootMismatch {
                    first: group.unrank(first as u64).to_string(),
                    other: group.unrank(other as u64).to_string(),
                });
            }
            class.root = Some(group.unrank(first as u64));
        }
    }
    Ok(ClassDecomposition {
        group: *group,
        partition: p.clone(),
        classes,
        labels,
    })
}

/// Rank of the leftmost-strategy normal form of every rank, memoized along
/// each straightening chain.
fn leftmost_normal_forms(group: &SymmetricGroup, sys: &StraighteningSet) -> Result<Vec<u32>> {
    let order = group.order() as usize;
    let budget = default_step_budget(group.n());
    let mut nf = vec![UNSET; order];
    let mut buf = vec![0u32; group.n()];
    let mut pending = Vec::new();
    let mut path = Vec::new();
    let c = sys.partition().c();
    for seed in 0..order {
        if nf[seed] != UNSET {
            continue;
        }
        path.clear();
        let mut cur = seed;
        let root = loop {
            if nf[cur] != UNSET {
                break nf[cur];
            }
            path.push(cur as u32);
            if path.len() as u64 > budget {
                return Err(Error::StepBudgetExceeded(budget));
            }
            group.unrank_into(cur as u64, &mut buf);
            pending_into(&buf, sys, &mut pending);
            let Some(&start) = pending.first() else {
                break cur as u32;
            };
            let low = interval_low(&buf[start..start + c]).expect("pending hit");
            let part = sys
                .partition()
                .part_of_rank(relative_rank(&buf[start..start + c]))
                .expect("pending hit");
            let target = sys.target(part, crate::rewrite::polarize(&buf, start, c));
            for (slot, v) in buf[start..start + c].iter_mut().zip(target.shifted(low)) {
                *slot = v;
            }
            cur = relative_rank(&buf) as usize;
        };
        for &r in &path {
            nf[r as usize] = root;
        }
    }
    Ok(nf)
}

/// The straightening operator on `S_n` as a compressed adjacency list.
#[derive(Clone, Debug)]
pub struct StraighteningGraph {
    group: SymmetricGroup,
    offsets: Vec<u64>,
    targets: Vec<u32>,
}

impl StraighteningGraph {
    pub fn build(group: &SymmetricGroup, sys: &StraighteningSet) -> Self {
        let order = group.order() as usize;
        let mut offsets = Vec::with_capacity(order + 1);
        let mut targets = Vec::new();
        let mut buf = vec![0u32; group.n()];
        offsets.push(0);
        for r in 0..order {
            group.unrank_into(r as u64, &mut buf);
            let first = targets.len();
            for_each_step(&mut buf, sys, |_, next| targets.push(relative_rank(next) as u32));
            let succ = &mut targets[first..];
            succ.sort_unstable();
            let mut kept = 0;
            for i in 0..succ.len() {
                if i == 0 || succ[i] != succ[kept - 1] {
                    succ[kept] = succ[i];
                    kept += 1;
                }
            }
            targets.truncate(first + kept);
            offsets.push(targets.len() as u64);
        }
        Self {
            group: *group,
            offsets,
            targets,
        }
    }

    pub fn group(&self) -> &SymmetricGroup {
        &self.group
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    pub fn successors(&self, rank: u32) -> &[u32] {
        let r = rank as usize;
        &self.targets[self.offsets[r] as usize..self.offsets[r + 1] as usize]
    }

    pub fn is_sink(&self, rank: u32) -> bool {
        self.successors(rank).is_empty()
    }

    fn predecessors(&self) -> (Vec<u64>, Vec<u32>) {
        let nodes = self.node_count();
        let mut count = vec![0u64; nodes + 1];
        for &t in &self.targets {
            count[t as usize + 1] += 1;
        }
        for i in 0..nodes {
            count[i + 1] += count[i];
        }
        let mut fill = count.clone();
        let mut sources = vec![0u32; self.targets.len()];
        for r in 0..nodes as u32 {
            for &t in self.successors(r) {
                sources[fill[t as usize] as usize] = r;
                fill[t as usize] += 1;
            }
        }
        (count, sources)
    }

    /// A topological order, or `Err(node on a cycle)`.
    pub fn topological_order(&self) -> core::result::Result<Vec<u32>, u32> {
        let nodes = self.node_count();
        let mut indegree = vec![0u32; nodes];
        for &t in &self.targets {
            indegree[t as usize] += 1;
        }
        let mut order: Vec<u32> = (0..nodes as u32).filter(|&r| indegree[r as usize] == 0).collect();
        let mut head = 0;
        while head < order.len() {
            let r = order[head];
            head += 1;
            for &t in self.successors(r) {
                indegree[t as usize] -= 1;
                if indegree[t as usize] == 0 {
                    order.push(t);
                }
            }
        }
        if order.len() == nodes {
            return Ok(order);
        }
        // Every leftover node has a leftover predecessor; walking backwards
        // must revisit a node, which then lies on a cycle.
        let (offsets, sources) = self.predecessors();
        let mut cur = (0..nodes).find(|&r| indegree[r] > 0).expect("leftover node") as u32;
        let mut seen = vec![false; nodes];
        while !seen[cur as usize] {
            seen[cur as usize] = true;
            let preds = &sources[offsets[cur as usize] as usize..offsets[cur as usize + 1] as usize];
            cur = *preds.iter().find(|&&q| indegree[q as usize] > 0).expect("leftover predecessor");
        }
        Err(cur)
    }
}

/// Outcome of [`check_confluence`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfluenceReport {
    pub n: usize,
    pub terminated: bool,
    pub cycles_found: bool,
    /// Classes with exactly one fully straightened member that every member
    /// reaches.
    pub classes_with_unique_root: u64,
    pub total_classes: u64,
    /// The same property measured on the weakly connected components of the
    /// straightening operator itself.
    pub components_with_unique_sink: u64,
    pub total_components: u64,
    /// Permutations with no pending hit.
    pub sinks: u64,
    pub counterexamples: Vec<Permutation>,
}

impl ConfluenceReport {
    pub fn is_confluent(&self) -> bool {
        self.terminated
            && self.classes_with_unique_root == self.total_classes
            && self.components_with_unique_sink == self.total_components
    }
}

const MAX_COUNTEREXAMPLES: usize = 32;

/// For each group of nodes: exactly one sink and every node reaches it.
/// Returns the number of passing groups; failures add witnesses.
fn unique_sink_groups(
    graph: &StraighteningGraph,
    preds: &(Vec<u64>, Vec<u32>),
    labels: &[u32],
    groups: u32,
    witnesses: &mut Vec<u32>,
) -> u64 {
    let nodes = graph.node_count();
    let mut sink_of = vec![UNSET; groups as usize];
    let mut sink_count = vec![0u32; groups as usize];
    let mut size = vec![0u64; groups as usize];
    for r in 0..nodes as u32 {
        let g = labels[r as usize] as usize;
        size[g] += 1;
        if graph.is_sink(r) {
            sink_count[g] += 1;
            if sink_of[g] == UNSET {
                sink_of[g] = r;
            } else if sink_count[g] == 2 {
                witnesses.push(sink_of[g]);
                witnesses.push(r);
            }
        }
    }
    let (offsets, sources) = preds;
    let mut reached = vec![false; nodes];
    let mut reached_count = vec![0u64; groups as usize];
    let mut stack = Vec::new();
    for g in 0..groups as usize {
        if sink_count[g] != 1 {
            continue;
        }
        let s = sink_of[g];
        reached[s as usize] = true;
        stack.push(s);
        while let Some(v) = stack.pop() {
            reached_count[g] += 1;
            for &q in &sources[offsets[v as usize] as usize..offsets[v as usize + 1] as usize] {
                if !reached[q as usize] {
                    reached[q as usize] = true;
                    stack.push(q);
                }
            }
        }
    }
    let mut ok = 0;
    let mut witness_needed = vec![false; groups as usize];
    for g in 0..groups as usize {
        if sink_count[g] == 1 && reached_count[g] == size[g] {
            ok += 1;
        } else if sink_count[g] < 2 {
            // no sink at all, or a member that cannot reach the sink
            witness_needed[g] = true;
        }
    }
    for r in 0..nodes {
        let g = labels[r] as usize;
        if witness_needed[g] && (sink_count[g] == 0 || !reached[r]) {
            witnesses.push(r as u32);
            witness_needed[g] = false;
        }
    }
    ok
}

/// Checks that the straightening operator of `sys` on `S_n` terminates and
/// that every class (and every component of the operator) has exactly one
/// fully straightened member reachable from all others.
pub fn check_confluence(group: &SymmetricGroup, sys: &StraighteningSet) -> ConfluenceReport {
    let graph = StraighteningGraph::build(group, sys);
    let mut witnesses = Vec::new();
    let cycles_found = match graph.topological_order() {
        Ok(_) => false,
        Err(on_cycle) => {
            witnesses.push(on_cycle);
            true
        }
    };
    let preds = graph.predecessors();
    let (labels, total_classes) = class_labels(group, sys.partition());
    let classes_ok = unique_sink_groups(&graph, &preds, &labels, total_classes, &mut witnesses);

    let mut uf = UnionFind::new(graph.node_count());
    for r in 0..graph.node_count() as u32 {
        for &t in graph.successors(r) {
            uf.union(r, t);
        }
    }
    let (components, total_components) = uf.labels();
    let components_ok = unique_sink_groups(&graph, &preds, &components, total_components, &mut witnesses);

    witnesses.sort_unstable();
    witnesses.dedup();
    witnesses.truncate(MAX_COUNTEREXAMPLES);
    let sinks = (0..graph.node_count() as u32).filter(|&r| graph.is_sink(r)).count() as u64;
    ConfluenceReport {
        n: group.n(),
        terminated: !cycles_found,
        cycles_found,
        classes_with_unique_root: classes_ok,
        total_classes: total_classes as u64,
        components_with_unique_sink: components_ok,
        total_components: total_components as u64,
        sinks,
        counterexamples: witnesses.into_iter().map(|r| group.unrank(r as u64)).collect(),
    }
}

/// A peak `w -> b`, `w -> c` whose branches never meet again.
pub fn find_diamond_violation(
    group: &SymmetricGroup,
    sys: &StraighteningSet,
) -> Option<(Permutation, Permutation, Permutation)> {
    let graph = StraighteningGraph::build(group, sys);
    let nodes = graph.node_count();
    // Sorted sets of sinks reachable from each node (acyclic case), or full
    // reachable sets otherwise.
    let reach: Vec<Vec<u32>> = match graph.topological_order() {
        Ok(order) => {
            let mut sinks: Vec<Vec<u32>> = vec![Vec::new(); nodes];
            for &r in order.iter().rev() {
                let succ = graph.successors(r);
                if succ.is_empty() {
                    sinks[r as usize] = vec![r];
                    continue;
                }
                let mut acc: Vec<u32> = succ.iter().flat_map(|&t| sinks[t as usize].iter().copied()).collect();
                acc.sort_unstable();
                acc.dedup();
                sinks[r as usize] = acc;
            }
            sinks
        }
        Err(_) => (0..nodes as u32)
            .map(|r| {
                let mut seen = vec![false; nodes];
                let mut stack = vec![r];
                seen[r as usize] = true;
                let mut out = Vec::new();
                while let Some(v) = stack.pop() {
                    out.push(v);
                    for &t in graph.successors(v) {
                        if !seen[t as usize] {
                            seen[t as usize] = true;
                            stack.push(t);
                        }
                    }
                }
                out.sort_unstable();
                out
            })
            .collect(),
    };
    let meet = |a: &[u32], b: &[u32]| {
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                core::cmp::Ordering::Equal => return true,
                core::cmp::Ordering::Less => i += 1,
                core::cmp::Ordering::Greater => j += 1,
            }
        }
        false
    };
    for r in 0..nodes as u32 {
        let succ = graph.successors(r);
        for (i, &b) in succ.iter().enumerate() {
            for &c in &succ[i + 1..] {
                if !meet(&reach[b as usize], &reach[c as usize]) {
                    return Some((
                        group.unrank(r as u64),
                        group.unrank(b as u64),
                        group.unrank(c as u64),
                    ));
                }
            }
        }
    }
    None
}

/// Every one-step peak of the straightening operator can be joined.
pub fn verify_local_diamond(group: &SymmetricGroup, sys: &StraighteningSet) -> bool {
    find_diamond_violation(group, sys).is_none()
}
