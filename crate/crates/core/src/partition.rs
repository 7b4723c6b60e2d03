//! Replacement partitions of subsets of `S_c` and straightening sets.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::perm::{Leaning, Pattern};
use crate::rank::factorial;
use crate::rewrite::Polarization;
use crate::{Error, Result};

/// Largest supported pattern size.
pub const MAX_PATTERN_SIZE: usize = 9;

const NO_PART: u32 = u32::MAX;

/// A partition of a subset of `S_c`.
///
/// Stored canonically: patterns sorted within each part, parts sorted by
/// their smallest member. Equality and `Display` use the canonical form.
#[derive(Clone, Debug)]
pub struct ReplacementPartition {
    c: usize,
    parts: Vec<Vec<Pattern>>,
    /// Part number for every pattern of `S_c`, indexed by pattern rank.
    part_of: Vec<u32>,
}

impl PartialEq for ReplacementPartition {
    fn eq(&self, other: &Self) -> bool {
        self.c == other.c && self.parts == other.parts
    }
}

impl Eq for ReplacementPartition {}

impl core::hash::Hash for ReplacementPartition {
    fn hash<H: core::hash::Hasher>(&self, state: &mut H) {
        self.c.hash(state);
        self.parts.hash(state);
    }
}

impl ReplacementPartition {
    pub fn new(c: usize, parts: Vec<Vec<Pattern>>) -> Result<Self> {
        if c == 0 || c > MAX_PATTERN_SIZE {
            return Err(Error::UnsupportedPatternSize(c));
        }
        let mut part_of = vec![NO_PART; factorial(c) as usize];
        let mut parts = parts;
        for part in &mut parts {
            if part.is_empty() {
                return Err(Error::MalformedPartition("empty part".into()));
            }
            part.sort();
        }
        parts.sort();
        for (i, part) in parts.iter().enumerate() {
            for u in part {
                if u.size() != c {
                    return Err(Error::PatternSize {
                        pattern: u.to_string(),
                        expected: c,
                        found: u.size(),
                    });
                }
                let slot = &mut part_of[u.rank() as usize];
                if *slot != NO_PART {
                    return Err(Error::DuplicatePattern(u.to_string()));
                }
                *slot = i as u32;
            }
        }
        Ok(Self { c, parts, part_of })
    }

    /// All of `S_c` as a single part.
    pub fn one_part(c: usize) -> Result<Self> {
        Self::new(c, vec![Pattern::all(c)])
    }

    /// Every pattern of `S_c` in its own part.
    pub fn singletons(c: usize) -> Result<Self> {
        Self::new(c, Pattern::all(c).into_iter().map(|u| vec![u]).collect())
    }

    pub fn c(&self) -> usize {
        self.c
    }

    pub fn parts(&self) -> &[Vec<Pattern>] {
        &self.parts
    }

    /// `|P|`, the number of parts.
    pub fn part_count(&self) -> usize {
        self.parts.len()
    }

    pub fn support(&self) -> impl Iterator<Item = &Pattern> {
        self.parts.iter().flatten()
    }

    pub fn support_size(&self) -> usize {
        self.parts.iter().map(Vec::len).sum()
    }

    pub fn part_index(&self, u: &Pattern) -> Option<usize> {
        if u.size() != self.c {
            return None;
        }
        self.part_of_rank(u.rank())
    }

    #[inline]
    pub(crate) fn part_of_rank(&self, rank: u64) -> Option<usize> {
        match self.part_of[rank as usize] {
            NO_PART => None,
            i => Some(i as usize),
        }
    }

    pub fn contains(&self, u: &Pattern) -> bool {
        self.part_index(u).is_some()
    }

    /// Whether the support is all of `S_c`.
    pub fn is_full(&self) -> bool {
        self.support_size() as u64 == factorial(self.c)
    }

    /// This partition with every missing pattern of `S_c` added as a
    /// singleton part. The equivalence relation is unchanged.
    pub fn padded(&self) -> Self {
        let mut parts = self.parts.clone();
        parts.extend(
            Pattern::all(self.c)
                .into_iter()
                .filter(|u| !self.contains(u))
                .map(|u| vec![u]),
        );
        Self::new(self.c, parts).expect("padding keeps parts disjoint")
    }

    /// Every pattern written backwards.
    pub fn reversed(&self) -> Self {
        let parts = self
            .parts
            .iter()
            .map(|part| part.iter().map(Pattern::reversed).collect())
            .collect();
        Self::new(self.c, parts).expect("reversal is a bijection on S_c")
    }
}

impl fmt::Display for ReplacementPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, part) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            for (j, u) in part.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{u}")?;
            }
        }
        Ok(())
    }
}

/// Parses `"123,321|132|213"`: parts separated by `|`, patterns by `,`.
pub fn parse_partition(spec: &str, c: usize) -> Result<ReplacementPartition> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err(Error::MalformedPartition("empty spec".into()));
    }
    let mut parts = Vec::new();
    for chunk in spec.split('|') {
        let mut part = Vec::new();
        for token in chunk.split(',') {
            let token = token.trim();
            if token.is_empty() {
                return Err(Error::MalformedPartition(format!("empty pattern in `{spec}`")));
            }
            if !token.chars().all(|ch| ch.is_ascii_digit()) {
                return Err(Error::MalformedPartition(format!("`{token}` is not a pattern")));
            }
            let u: Pattern = token.parse()?;
            if u.size() != c {
                return Err(Error::PatternSize {
                    pattern: token.to_string(),
                    expected: c,
                    found: u.size(),
                });
            }
            part.push(u);
        }
        parts.push(part);
    }
    ReplacementPartition::new(c, parts)
}

impl FromStr for ReplacementPartition {
    type Err = Error;

    /// Parses a spec, taking `c` from the first pattern.
    fn from_str(s: &str) -> Result<Self> {
        let first = s
            .trim()
            .split(['|', ','])
            .next()
            .map(str::trim)
            .unwrap_or_default();
        if first.is_empty() {
            return Err(Error::MalformedPartition("empty spec".into()));
        }
        parse_partition(s, first.chars().count())
    }
}

fn count_leaning(part: &[Pattern], leaning: Leaning) -> usize {
    part.iter().filter(|u| u.leaning() == leaning).count()
}

/// Why `members` fails to be a straightening set of `p`, if it does.
pub fn straightening_set_problem(p: &ReplacementPartition, members: &[Pattern]) -> Option<String> {
    for u in members {
        if !p.contains(u) {
            return Some(format!("`{u}` is not in the partition"));
        }
    }
    let members: BTreeSet<&Pattern> = members.iter().collect();
    for part in p.parts() {
        let chosen: Vec<&Pattern> = part.iter().filter(|u| members.contains(u)).collect();
        let has_left = count_leaning(part, Leaning::Left) > 0;
        let has_right = count_leaning(part, Leaning::Right) > 0;
        let chosen_with = |l| chosen.iter().filter(|u| u.leaning() == l).count();
        let label = || part.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
        if has_left && chosen_with(Leaning::Left) != 1 {
            return Some(format!("part {{{}}} needs exactly one left-leaning member", label()));
        }
        if has_right && chosen_with(Leaning::Right) != 1 {
            return Some(format!("part {{{}}} needs exactly one right-leaning member", label()));
        }
        if (has_left || has_right) && chosen_with(Leaning::Omni) != 0 {
            return Some(format!(
                "part {{{}}} has leaning members, so no omni-leaning member may be chosen",
                label()
            ));
        }
        if !has_left && !has_right && chosen.len() != 1 {
            return Some(format!("omni-only part {{{}}} needs exactly one member", label()));
        }
    }
    None
}

/// Whether `members` is a straightening set of `p`.
pub fn validate_straightening_set(p: &ReplacementPartition, members: &[Pattern]) -> bool {
    straightening_set_problem(p, members).is_none()
}

/// A validated straightening set together with the partition it straightens.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StraighteningSet {
    partition: ReplacementPartition,
    members: Vec<Pattern>,
    /// Per part: `[target for left polarized, target for right polarized]`.
    targets: Vec<[Pattern; 2]>,
}

impl StraighteningSet {
    pub fn new(partition: ReplacementPartition, members: impl IntoIterator<Item = Pattern>) -> Result<Self> {
        let mut members: Vec<Pattern> = members.into_iter().collect();
        members.sort();
        members.dedup();
        if let Some(problem) = straightening_set_problem(&partition, &members) {
            return Err(Error::InvalidStraighteningSet(problem));
        }
        let targets = partition
            .parts()
            .iter()
            .map(|part| {
                let chosen: Vec<&Pattern> =
                    part.iter().filter(|u| members.binary_search(u).is_ok()).collect();
                let pick = |leaning| {
                    chosen
                        .iter()
                        .find(|u| u.leaning() == leaning)
                        .or_else(|| {
                            // No member of the matching leaning: the part's
                            // single chosen member is the only target.
                            assert_eq!(chosen.len(), 1, "straightening target must be unique");
                            chosen.first()
                        })
                        .map(|u| (*u).clone())
                        .unwrap()
                };
                [pick(Leaning::Left), pick(Leaning::Right)]
            })
            .collect();
        Ok(Self {
            partition,
            members,
            targets,
        })
    }

    /// Parses a comma-separated member list such as `"123,321"`.
    pub fn parse(partition: ReplacementPartition, spec: &str) -> Result<Self> {
        let members = spec
            .split(',')
            .map(|t| t.trim().parse::<Pattern>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(partition, members)
    }

    pub fn partition(&self) -> &ReplacementPartition {
        &self.partition
    }

    pub fn members(&self) -> &[Pattern] {
        &self.members
    }

    pub fn contains(&self, u: &Pattern) -> bool {
        self.members.binary_search(u).is_ok()
    }

    /// The pattern a hit of part `part` with the given polarization is
    /// straightened into.
    pub fn target(&self, part: usize, polarization: Polarization) -> &Pattern {
        match polarization {
            Polarization::Left => &self.targets[part][0],
            Polarization::Right => &self.targets[part][1],
        }
    }
}

/// Per part: the lexicographically smallest right-leaning member, the
/// left-leaning member whose reversal is smallest, and for omni-only parts
/// the smallest member.
pub fn default_straightening_set(p: &ReplacementPartition) -> StraighteningSet {
    let mut members = Vec::new();
    for part in p.parts() {
        let right = part.iter().filter(|u| u.leaning() == Leaning::Right).min();
        let left = part
            .iter()
            .filter(|u| u.leaning() == Leaning::Left)
            .min_by_key(|u| u.reversed());
        if right.is_none() && left.is_none() {
            members.push(part[0].clone());
        }
        members.extend(right.cloned());
        members.extend(left.cloned());
    }
    StraighteningSet::new(p.clone(), members).expect("default choice is always valid")
}

/// Builds the partition whose parts are unions of paired parts of `j` and `k`.
///
/// Every part of `j` and `k` must be used exactly once.
pub fn disjoint_union(
    j: &ReplacementPartition,
    k: &ReplacementPartition,
    pairing: &[(Option<usize>, Option<usize>)],
) -> Result<ReplacementPartition> {
    if j.c() != k.c() {
        return Err(Error::MismatchedPatternSize(j.c(), k.c()));
    }
    if let Some(u) = j.support().find(|u| k.contains(u)) {
        return Err(Error::OverlappingSupports(u.to_string()));
    }
    let mut used_j = vec![false; j.part_count()];
    let mut used_k = vec![false; k.part_count()];
    let mut parts = Vec::with_capacity(pairing.len());
    for &(a, b) in pairing {
        let mut part = Vec::new();
        if a.is_none() && b.is_none() {
            return Err(Error::InvalidPairing("a pair must name at least one part".into()));
        }
        for (idx, source, used, side) in [(a, j, &mut used_j, "first"), (b, k, &mut used_k, "second")] {
            if let Some(i) = idx {
                let slot = used
                    .get_mut(i)
                    .ok_or_else(|| Error::InvalidPairing(format!("{side} partition has no part {i}")))?;
                if *slot {
                    return Err(Error::InvalidPairing(format!("part {i} of the {side} partition is used twice")));
                }
                *slot = true;
                part.extend(source.parts()[i].iter().cloned());
            }
        }
        parts.push(part);
    }
    if used_j.iter().chain(&used_k).any(|u| !u) {
        return Err(Error::InvalidPairing("every part must be paired".into()));
    }
    ReplacementPartition::new(j.c(), parts)
}

/// Where [`insert_omni`] puts the new pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InsertAt {
    Part(usize),
    NewPart,
}

/// Adds an omni-leaning pattern absent from `p` to a part or as a new part.
pub fn insert_omni(p: &ReplacementPartition, o: &Pattern, at: InsertAt) -> Result<ReplacementPartition> {
    if o.size() != p.c() {
        return Err(Error::PatternSize {
            pattern: o.to_string(),
            expected: p.c(),
            found: o.size(),
        });
    }
    if o.leaning() != Leaning::Omni {
        return Err(Error::NotOmniLeaning(o.to_string()));
    }
    if p.contains(o) {
        return Err(Error::AlreadyPresent(o.to_string()));
    }
    let mut parts = p.parts().to_vec();
    match at {
        InsertAt::Part(i) => parts.get_mut(i).ok_or(Error::NoSuchPart(i))?.push(o.clone()),
        InsertAt::NewPart => parts.push(vec![o.clone()]),
    }
    ReplacementPartition::new(p.c(), parts)
}

/// Every set partition of `items`, via restricted growth strings.
pub struct SetPartitions {
    items: Vec<Pattern>,
    c: usize,
    growth: Vec<usize>,
    done: bool,
}

impl SetPartitions {
    pub fn new(c: usize, items: Vec<Pattern>) -> Self {
        let len = items.len();
        Self {
            items,
            c,
            growth: vec![0; len],
            done: len == 0,
        }
    }

    fn advance(&mut self) {
        let len = self.growth.len();
        for i in (1..len).rev() {
            let prefix_max = self.growth[..i].iter().copied().max().unwrap_or(0);
            if self.growth[i] <= prefix_max {
                self.growth[i] += 1;
                for g in &mut self.growth[i + 1..] {
                    *g = 0;
                }
                return;
            }
        }
        self.done = true;
    }
}

impl Iterator for SetPartitions {
    type Item = ReplacementPartition;

    fn next(&mut self) -> Option<ReplacementPartition> {
        if self.done {
            return None;
        }
        let blocks = self.growth.iter().copied().max().unwrap_or(0) + 1;
        let mut parts = vec![Vec::new(); blocks];
        for (u, &g) in self.items.iter().zip(&self.growth) {
            parts[g].push(u.clone());
        }
        let out = ReplacementPartition::new(self.c, parts).expect("distinct items");
        self.advance();
        Some(out)
    }
}

/// All partitions of `S_c` (Bell(c!) of them).
pub fn all_partitions(c: usize) -> SetPartitions {
    SetPartitions::new(c, Pattern::all(c))
}

/// All partitions of all nonempty subsets of `S_c`.
pub fn all_subset_partitions(c: usize) -> impl Iterator<Item = ReplacementPartition> {
    let all = Pattern::all(c);
    let masks = 1u64..(1u64 << all.len());
    masks.flat_map(move |mask| {
        let items = all
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, u)| u.clone())
            .collect();
        SetPartitions::new(c, items)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pats(list: &[&str]) -> Vec<Pattern> {
        list.iter().map(|s| s.parse().unwrap()).collect()
    }

    #[test]
    fn parse_examples() {
        let p = parse_partition("123,321|132|213|231|312", 3).unwrap();
        assert_eq!(p.part_count(), 5);
        assert!(p.is_full());
        assert_eq!(p.parts()[0], pats(&["123", "321"]));
        let q = parse_partition("123,132|213", 3).unwrap();
        assert_eq!(q.part_count(), 2);
        assert!(!q.is_full());
        assert_eq!(
            parse_partition("123|123", 3),
            Err(Error::DuplicatePattern("123".into()))
        );
        assert!(matches!(parse_partition("12|123", 3), Err(Error::PatternSize { .. })));
        assert!(matches!(parse_partition("123,,132", 3), Err(Error::MalformedPartition(_))));
        assert!(matches!(parse_partition("", 3), Err(Error::MalformedPartition(_))));
        assert!(matches!(parse_partition("1x3", 3), Err(Error::MalformedPartition(_))));
        assert!(matches!(parse_partition("113", 3), Err(Error::NotAPermutation(_))));
    }

    #[test]
    fn canonical_text() {
        let p: ReplacementPartition = "312|321,123|213".parse().unwrap();
        assert_eq!(p.to_string(), "123,321|213|312");
        let q: ReplacementPartition = "213|123,321|312".parse().unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn straightening_set_validation() {
        let p = parse_partition("12345,12354|21435,54231,43251", 5).unwrap();
        assert!(validate_straightening_set(&p, &pats(&["12345", "21435", "54231"])));
        let p = parse_partition("123,321", 3).unwrap();
        assert!(!validate_straightening_set(&p, &pats(&["123"])));
        assert!(validate_straightening_set(&p, &pats(&["123", "321"])));
        // an outsider
        assert!(!validate_straightening_set(&p, &pats(&["123", "321", "132"])));
        let omni = parse_partition("2413,3142", 4).unwrap();
        assert!(validate_straightening_set(&omni, &pats(&["3142"])));
        assert!(!validate_straightening_set(&omni, &pats(&["2413", "3142"])));
        let mixed = parse_partition("2413,1234", 4).unwrap();
        assert!(!validate_straightening_set(&mixed, &pats(&["2413", "1234"])));
    }

    #[test]
    fn default_sets() {
        let p = parse_partition("123,321|132|213|231|312", 3).unwrap();
        let c = default_straightening_set(&p);
        assert_eq!(c.members(), &pats(&["123", "132", "213", "231", "312", "321"])[..]);
        let r3 = parse_partition("123,213,132", 3).unwrap();
        assert_eq!(default_straightening_set(&r3).members(), &pats(&["123"])[..]);
        let s2 = parse_partition("12|21", 2).unwrap();
        assert_eq!(default_straightening_set(&s2).members(), &pats(&["12", "21"])[..]);
        // left-leaning choice mirrors the right-leaning one through reversal
        let l3 = parse_partition("321,231,312", 3).unwrap();
        assert_eq!(default_straightening_set(&l3).members(), &pats(&["321"])[..]);
    }

    #[test]
    fn default_set_is_always_valid_for_s3() {
        let mut count = 0;
        for p in all_partitions(3) {
            let c = default_straightening_set(&p);
            assert!(validate_straightening_set(&p, c.members()));
            count += 1;
        }
        assert_eq!(count, 203);
    }

    #[test]
    fn subset_partition_count_is_bell_seven_minus_one() {
        assert_eq!(all_subset_partitions(3).count(), 876);
    }

    #[test]
    fn union_examples() {
        let j = parse_partition("123,132|213", 3).unwrap();
        let k = parse_partition("321|231,312", 3).unwrap();
        let separate = disjoint_union(&j, &k, &[(Some(0), None), (Some(1), None), (None, Some(0)), (None, Some(1))]).unwrap();
        assert_eq!(separate.to_string(), "123,132|213|231,312|321");
        let joined = disjoint_union(&j, &k, &[(Some(0), Some(1)), (Some(1), Some(0))]).unwrap();
        assert_eq!(joined, parse_partition("123,132,321|213,231,312", 3).unwrap());
        assert_eq!(joined.part_count(), 2);
        let one = disjoint_union(
            &parse_partition("12", 2).unwrap(),
            &parse_partition("21", 2).unwrap(),
            &[(Some(0), Some(0))],
        )
        .unwrap();
        assert_eq!(one, ReplacementPartition::one_part(2).unwrap());
    }

    #[test]
    fn union_errors() {
        let j = parse_partition("123,132|213", 3).unwrap();
        let k = parse_partition("321|213", 3).unwrap();
        assert!(matches!(disjoint_union(&j, &k, &[]), Err(Error::OverlappingSupports(_))));
        let k = parse_partition("321", 3).unwrap();
        assert!(matches!(
            disjoint_union(&j, &k, &[(Some(0), Some(0)), (Some(0), None), (Some(1), None)]),
            Err(Error::InvalidPairing(_))
        ));
        assert!(matches!(
            disjoint_union(&j, &k, &[(Some(0), Some(0))]),
            Err(Error::InvalidPairing(_))
        ));
        assert!(matches!(
            disjoint_union(&j, &k, &[(Some(0), Some(0)), (Some(1), None), (None, None)]),
            Err(Error::InvalidPairing(_))
        ));
    }

    #[test]
    fn omni_insertion() {
        let o: Pattern = "2413".parse().unwrap();
        let rest: Vec<Pattern> = Pattern::all(4).into_iter().filter(|u| *u != o).collect();
        let p = ReplacementPartition::new(4, vec![rest]).unwrap();
        let q = insert_omni(&p, &o, InsertAt::NewPart).unwrap();
        assert_eq!(q.part_count(), 2);
        assert!(q.parts().iter().any(|part| part == std::slice::from_ref(&o)));
        let r = insert_omni(&p, &o, InsertAt::Part(0)).unwrap();
        assert_eq!(r, ReplacementPartition::one_part(4).unwrap());
        assert_eq!(insert_omni(&q, &o, InsertAt::NewPart), Err(Error::AlreadyPresent("2413".into())));
        let small = parse_partition("1324", 4).unwrap();
        assert_eq!(
            insert_omni(&small, &"1234".parse().unwrap(), InsertAt::NewPart),
            Err(Error::NotOmniLeaning("1234".into()))
        );
        assert_eq!(insert_omni(&small, &o, InsertAt::Part(3)), Err(Error::NoSuchPart(3)));
    }

    #[test]
    fn every_partition_of_s3_splits_into_left_and_right() {
        let r3 = pats(&["123", "132", "213"]);
        let l3 = pats(&["231", "312", "321"]);
        for p in all_partitions(3) {
            let restrict = |side: &[Pattern]| -> Vec<Vec<Pattern>> {
                p.parts()
                    .iter()
                    .map(|part| part.iter().filter(|u| side.contains(u)).cloned().collect::<Vec<_>>())
                    .filter(|part: &Vec<Pattern>| !part.is_empty())
                    .collect()
            };
            let j = ReplacementPartition::new(3, restrict(&r3)).unwrap();
            let k = ReplacementPartition::new(3, restrict(&l3)).unwrap();
            let pairing: Vec<_> = p
                .parts()
                .iter()
                .map(|part| {
                    let a = j.parts().iter().position(|q| q.iter().all(|u| part.contains(u)) && part.contains(&q[0]));
                    let b = k.parts().iter().position(|q| q.iter().all(|u| part.contains(u)) && part.contains(&q[0]));
                    (a, b)
                })
                .collect();
            assert_eq!(disjoint_union(&j, &k, &pairing).unwrap(), p);
        }
    }
}
