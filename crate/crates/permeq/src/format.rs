//! File formats: partition JSON, DOT graphs and b-files.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;

use serde::{Deserialize, Serialize};

use permeq_core::equivalence::{for_each_rearrangement, ClassDecomposition, StraighteningGraph};
use permeq_core::{Pattern, ReplacementPartition, StraighteningSet};

use crate::error::{CliError, CliResult};

/// `{"c": 3, "parts": [["123", "321"], ["132"]]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionJson {
    pub c: usize,
    pub parts: Vec<Vec<String>>,
}

impl From<&ReplacementPartition> for PartitionJson {
    fn from(p: &ReplacementPartition) -> Self {
        Self {
            c: p.c(),
            parts: p
                .parts()
                .iter()
                .map(|part| part.iter().map(ToString::to_string).collect())
                .collect(),
        }
    }
}

impl TryFrom<PartitionJson> for ReplacementPartition {
    type Error = permeq_core::Error;

    fn try_from(j: PartitionJson) -> Result<Self, Self::Error> {
        let parts = j
            .parts
            .iter()
            .map(|part| part.iter().map(|u| u.parse::<Pattern>()).collect())
            .collect::<Result<Vec<_>, _>>()?;
        ReplacementPartition::new(j.c, parts)
    }
}

/// Reads a partition given as spec text (`123,321|132`), as partition JSON,
/// or as `@FILE` holding either.
pub fn parse_partition_arg(arg: &str) -> CliResult<ReplacementPartition> {
    let arg = arg.trim();
    if let Some(path) = arg.strip_prefix('@') {
        let text = fs::read_to_string(path).map_err(CliError::io(path))?;
        return parse_partition_arg(&text);
    }
    if arg.starts_with('{') {
        let j: PartitionJson = serde_json::from_str(arg)?;
        return Ok(j.try_into()?);
    }
    Ok(arg.parse()?)
}

/// The straightening set named by `spec`: `auto` (or nothing) for the
/// default set, otherwise a comma-separated member list.
pub fn parse_straightening_arg(p: &ReplacementPartition, spec: Option<&str>) -> CliResult<StraighteningSet> {
    match spec.map(str::trim) {
        None | Some("auto") => Ok(permeq_core::partition::default_straightening_set(p)),
        Some(s) => Ok(StraighteningSet::parse(p.clone(), s)?),
    }
}

/// The classes as a DOT digraph: one cluster per class, rearrangement moves
/// as undirected gray edges and straightening steps as directed edges.
pub fn classes_dot(classes: &ClassDecomposition, sys: &StraighteningSet) -> String {
    let group = classes.group();
    let p = classes.partition();
    let names: Vec<String> = group.iter().map(|w| w.to_string()).collect();
    let mut out = String::new();
    out.push_str("digraph classes {\n");
    let _ = writeln!(out, "  label=\"n = {}, P = {}\";", group.n(), p);
    out.push_str("  node [shape=box, fontname=\"monospace\"];\n");
    for (i, class) in classes.classes().iter().enumerate() {
        let _ = writeln!(out, "  subgraph cluster_{i} {{");
        let _ = writeln!(out, "    label=\"class {i}\";");
        for &r in class.member_ranks() {
            let root = class.root().is_some_and(|root| root.to_string() == names[r as usize]);
            let style = if root { " [peripheries=2]" } else { "" };
            let _ = writeln!(out, "    \"{}\"{style};", names[r as usize]);
        }
        out.push_str("  }\n");
    }
    let mut buf = vec![0u32; group.n()];
    for r in 0..group.order() {
        group.unrank_into(r, &mut buf);
        let mut neighbors = BTreeSet::new();
        for_each_rearrangement(&mut buf, p, |_, nb| {
            neighbors.insert(group.rank(nb));
        });
        for nb in neighbors.into_iter().filter(|&nb| nb > r) {
            let _ = writeln!(
                out,
                "  \"{}\" -> \"{}\" [dir=none, color=gray];",
                names[r as usize], names[nb as usize]
            );
        }
    }
    let graph = StraighteningGraph::build(group, sys);
    for r in 0..graph.node_count() as u32 {
        for &s in graph.successors(r) {
            let _ = writeln!(out, "  \"{}\" -> \"{}\" [color=blue];", names[r as usize], names[s as usize]);
        }
    }
    out.push_str("}\n");
    out
}

/// OEIS b-file lines, `n value`.
pub fn bfile<'a>(entries: impl IntoIterator<Item = (usize, &'a str)>) -> String {
    let mut out = String::new();
    for (n, v) in entries {
        let _ = writeln!(out, "{n} {v}");
    }
    out
}
