//! Subcommand implementations.

use std::fs;
use std::io::Write;

use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use permeq_core::counting::{
    check_overlap_hypothesis, default_overlap_bound, formula_count, overlap_hypothesis_witness, partition_k,
};
use permeq_core::equivalence::{check_confluence, verify_local_diamond, ConfluenceReport};
use permeq_core::lemmas::{exhaustive_suite, lemma_systems, random_suite, SuiteReport};
use permeq_core::partition::{all_subset_partitions, default_straightening_set};
use permeq_core::rewrite::normal_form_trace;
use permeq_core::sc_family::{
    id_class, irreducible_blocks, is_c_toothed, sc_class_structure, sc_partition, sc_straightening_set,
    t3_recurrence,
};
use permeq_core::{Pattern, Permutation, ReplacementPartition, StraighteningSet, SymmetricGroup};

use crate::cache::{Cache, CacheKey};
use crate::cli::{ClassFormat, CountMethod, RunConfig, SequenceFormat, SequenceMethodArg, Suite, TableFormat};
use crate::error::{CliError, CliResult};
use crate::format::{bfile, classes_dot, parse_partition_arg, parse_straightening_arg, PartitionJson};
use crate::parallel;

/// How a command ended when it ran to completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success,
    /// A property or agreement check failed.
    Failed,
}

impl Status {
    fn from_ok(ok: bool) -> Self {
        if ok {
            Self::Success
        } else {
            Self::Failed
        }
    }
}

pub struct Context<'a> {
    pub cfg: &'a RunConfig,
    pub cache: &'a mut Cache,
    pub out: &'a mut dyn Write,
}

impl Context<'_> {
    fn partition(&self) -> CliResult<ReplacementPartition> {
        parse_partition_arg(self.cfg.require(&self.cfg.partition, "partition")?)
    }

    fn straightening(&self, p: &ReplacementPartition) -> CliResult<StraighteningSet> {
        parse_straightening_arg(p, self.cfg.straightening.as_deref())
    }

    fn group(&self, n: usize) -> CliResult<SymmetricGroup> {
        SymmetricGroup::with_limit(n, self.cfg.guard).map_err(|e| match e {
            permeq_core::Error::TooLarge { n, limit } if n > 0 => CliError::Usage(format!(
                "n = {n} is beyond the enumeration guard of {limit} (see --guard and --allow-large)"
            )),
            e => e.into(),
        })
    }

    fn json_line(&mut self, value: &impl Serialize) -> CliResult<()> {
        serde_json::to_writer(&mut *self.out, value)?;
        self.out.write_all(b"\n")?;
        Ok(())
    }

    fn json_pretty(&mut self, value: &impl Serialize) -> CliResult<()> {
        serde_json::to_writer_pretty(&mut *self.out, value)?;
        self.out.write_all(b"\n")?;
        Ok(())
    }

    fn csv<R: Serialize>(&mut self, rows: &[R]) -> CliResult<()> {
        let mut w = csv::Writer::from_writer(&mut *self.out);
        for r in rows {
            w.serialize(r).map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_error(e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => CliError::Output(e),
        other => CliError::Usage(format!("CSV: {other:?}")),
    }
}

pub fn run(ctx: &mut Context<'_>) -> CliResult<Status> {
    match ctx.cfg.command {
        "classes" => classes(ctx),
        "count" => count(ctx),
        "confluence" => confluence(ctx),
        "normal-form" => normal_form(ctx),
        "toothed" => toothed(ctx),
        "sc-sequence" => sequence(ctx),
        "verify" => verify(ctx),
        other => Err(CliError::Usage(format!("unknown command `{other}`"))),
    }
}

#[derive(Serialize)]
struct ClassJson {
    index: usize,
    size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    root: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    members: Option<Vec<String>>,
}

#[derive(Serialize)]
struct ClassListing {
    n: usize,
    partition: PartitionJson,
    class_count: usize,
    classes: Vec<ClassJson>,
}

#[derive(Serialize)]
struct ClassRow {
    class: usize,
    size: usize,
    root: Option<String>,
    members: Option<String>,
}

fn classes(ctx: &mut Context<'_>) -> CliResult<Status> {
    let p = ctx.partition()?;
    let n = ctx.cfg.require(&ctx.cfg.n, "n")?.hi;
    let group = ctx.group(n)?;
    let sys = ctx.straightening(&p)?;
    let want_roots = ctx.cfg.roots || ctx.cfg.dot.is_some();
    let decomposition = parallel::enumerate_classes(&group, &p, want_roots.then_some(&sys), ctx.cfg.jobs)?;
    if let Some(path) = &ctx.cfg.dot {
        fs::write(path, classes_dot(&decomposition, &sys)).map_err(CliError::io(path))?;
    }
    let classes: Vec<ClassJson> = decomposition
        .classes()
        .iter()
        .enumerate()
        .map(|(index, class)| ClassJson {
            index,
            size: class.size(),
            root: class.root().filter(|_| ctx.cfg.roots).map(ToString::to_string),
            members: (!ctx.cfg.sizes_only).then(|| {
                class
                    .member_ranks()
                    .iter()
                    .map(|&r| group.unrank(r).to_string())
                    .collect()
            }),
        })
        .collect();
    match ctx.cfg.class_format {
        ClassFormat::Json => ctx.json_pretty(&ClassListing {
            n,
            partition: PartitionJson::from(&p),
            class_count: classes.len(),
            classes,
        })?,
        ClassFormat::Csv => {
            let rows: Vec<ClassRow> = classes
                .into_iter()
                .map(|c| ClassRow {
                    class: c.index,
                    size: c.size,
                    root: c.root,
                    members: c.members.map(|m| m.join(" ")),
                })
                .collect();
            ctx.csv(&rows)?;
        }
    }
    Ok(Status::Success)
}

#[derive(Serialize)]
struct CountRowOut {
    n: usize,
    brute: Option<String>,
    formula: Option<String>,
    roots: Option<String>,
    agree: bool,
}

#[derive(Serialize)]
struct CountReport {
    partition: PartitionJson,
    overlap_hypothesis: Option<bool>,
    rows: Vec<CountRowOut>,
}

fn count(ctx: &mut Context<'_>) -> CliResult<Status> {
    let p = ctx.partition()?;
    let ns = *ctx.cfg.require(&ctx.cfg.n, "n")?;
    let method = ctx.cfg.count_method;
    let padded = p.padded();
    let sys = default_straightening_set(&padded);
    let c = p.c();
    let text = padded.to_string();
    let key = |n: usize, method: &str| CacheKey {
        partition: text.clone(),
        n,
        method: method.into(),
    };
    let wants = |m: CountMethod| method == m || method == CountMethod::All;
    let hypothesis = if wants(CountMethod::Formula) {
        let holds = check_overlap_hypothesis(&sys, default_overlap_bound(c))?;
        if !holds {
            let witness = overlap_hypothesis_witness(&sys, default_overlap_bound(c))?
                .map_or_else(String::new, |w| format!(" (witness {w})"));
            if method == CountMethod::Formula {
                return Err(CliError::Usage(format!(
                    "the counting formula does not apply to {p}: overlap hypothesis fails{witness}"
                )));
            }
            eprintln!("note: formula column omitted, overlap hypothesis fails{witness}");
        }
        Some(holds)
    } else {
        None
    };
    let formula_method = match ctx.cfg.reading {
        permeq_core::counting::KReading::PatternFactorial => "formula",
        permeq_core::counting::KReading::HostFactorial => "formula-host",
    };
    let mut rows = Vec::new();
    for n in ns.iter() {
        let jobs = ctx.cfg.jobs;
        let brute = if wants(CountMethod::Brute) {
            let group = ctx.group(n)?;
            Some(ctx.cache.resolve(key(n, "brute"), || {
                Ok(parallel::count_classes(&group, &padded, jobs).to_string())
            })?)
        } else {
            None
        };
        let roots = if wants(CountMethod::Roots) {
            let group = ctx.group(n)?;
            Some(ctx.cache.resolve(key(n, "roots"), || Ok(parallel::count_roots(&group, &sys, jobs).to_string()))?)
        } else {
            None
        };
        let formula = if hypothesis == Some(true) {
            let k = partition_k(&padded, n, ctx.cfg.reading);
            Some(ctx.cache.resolve(key(n, formula_method), || Ok(formula_count(n, c, k)?.to_string()))?)
        } else {
            None
        };
        let present: Vec<&String> = [&brute, &formula, &roots].into_iter().flatten().collect();
        let agree = present.windows(2).all(|w| w[0] == w[1]);
        rows.push(CountRowOut {
            n,
            brute,
            formula,
            roots,
            agree,
        });
    }
    let ok = rows.iter().all(|r| r.agree);
    match ctx.cfg.table_format {
        TableFormat::Csv => ctx.csv(&rows)?,
        TableFormat::Json => ctx.json_pretty(&CountReport {
            partition: PartitionJson::from(&p),
            overlap_hypothesis: hypothesis,
            rows,
        })?,
    }
    Ok(Status::from_ok(ok))
}

#[derive(Serialize)]
struct ConfluenceRow {
    n: usize,
    terminated: bool,
    cycles_found: bool,
    classes_with_unique_root: u64,
    total_classes: u64,
    components_with_unique_sink: u64,
    total_components: u64,
    sinks: u64,
    confluent: bool,
    diamond: Option<bool>,
}

#[derive(Serialize)]
struct ConfluenceJson {
    #[serde(flatten)]
    row: ConfluenceRow,
    counterexamples: Vec<String>,
}

fn confluence_row(r: &ConfluenceReport, diamond: Option<bool>) -> ConfluenceRow {
    ConfluenceRow {
        n: r.n,
        terminated: r.terminated,
        cycles_found: r.cycles_found,
        classes_with_unique_root: r.classes_with_unique_root,
        total_classes: r.total_classes,
        components_with_unique_sink: r.components_with_unique_sink,
        total_components: r.total_components,
        sinks: r.sinks,
        confluent: r.is_confluent(),
        diamond,
    }
}

#[derive(Serialize)]
struct ConfluenceDocument {
    partition: PartitionJson,
    straightening: Vec<String>,
    reports: Vec<ConfluenceJson>,
}

fn confluence(ctx: &mut Context<'_>) -> CliResult<Status> {
    let p = ctx.partition()?;
    let ns = *ctx.cfg.require(&ctx.cfg.n, "n")?;
    let sys = ctx.straightening(&p)?;
    let mut reports = Vec::new();
    let mut ok = true;
    for n in ns.iter() {
        let group = ctx.group(n)?;
        let report = check_confluence(&group, &sys);
        let diamond = ctx.cfg.diamond.then(|| verify_local_diamond(&group, &sys));
        ok &= report.is_confluent() && diamond != Some(false);
        reports.push(ConfluenceJson {
            row: confluence_row(&report, diamond),
            counterexamples: report.counterexamples.iter().map(ToString::to_string).collect(),
        });
    }
    match ctx.cfg.table_format {
        TableFormat::Csv => {
            let rows: Vec<ConfluenceRow> = reports.into_iter().map(|r| r.row).collect();
            ctx.csv(&rows)?;
        }
        TableFormat::Json => ctx.json_pretty(&ConfluenceDocument {
            partition: PartitionJson::from(&p),
            straightening: sys.members().iter().map(ToString::to_string).collect(),
            reports,
        })?,
    }
    Ok(Status::from_ok(ok))
}

#[derive(Serialize)]
struct StepLine {
    step: usize,
    /// 1-based position of the first letter of the straightened hit.
    position: usize,
    from: String,
    to: String,
    word: String,
}

#[derive(Serialize)]
struct RootLine {
    input: String,
    root: String,
    steps: usize,
}

fn normal_form(ctx: &mut Context<'_>) -> CliResult<Status> {
    let p = ctx.partition()?;
    let sys = ctx.straightening(&p)?;
    let w: Permutation = ctx.cfg.require(&ctx.cfg.perm, "perm")?.parse()?;
    let (root, steps) = normal_form_trace(&w, &sys, None)?;
    for (i, s) in steps.iter().enumerate() {
        ctx.json_line(&StepLine {
            step: i + 1,
            position: s.start + 1,
            from: s.from.to_string(),
            to: s.to.to_string(),
            word: s.after.to_string(),
        })?;
    }
    ctx.json_line(&RootLine {
        input: w.to_string(),
        root: root.to_string(),
        steps: steps.len(),
    })?;
    Ok(Status::Success)
}

#[derive(Serialize)]
struct ToothedReport {
    perm: String,
    c: usize,
    blocks: Vec<Vec<u32>>,
    block_sizes: Vec<usize>,
    toothed: bool,
}

fn toothed(ctx: &mut Context<'_>) -> CliResult<Status> {
    let c = *ctx.cfg.require(&ctx.cfg.c, "c")?;
    let w: Permutation = ctx.cfg.require(&ctx.cfg.perm, "perm")?.parse()?;
    if c == 0 {
        return Err(CliError::Usage("c must be at least 1".into()));
    }
    let blocks = irreducible_blocks(&w);
    ctx.json_line(&ToothedReport {
        perm: w.to_string(),
        c,
        block_sizes: blocks.sizes(),
        blocks: blocks.blocks().to_vec(),
        toothed: is_c_toothed(&w, c),
    })?;
    Ok(Status::Success)
}

#[derive(Serialize)]
struct SequenceRow {
    n: usize,
    brute: Option<u64>,
    recurrence: Option<u64>,
    agree: bool,
}

#[derive(Serialize)]
struct SequenceDocument {
    c: usize,
    rows: Vec<SequenceRow>,
}

fn sequence(ctx: &mut Context<'_>) -> CliResult<Status> {
    let c = *ctx.cfg.require(&ctx.cfg.c, "c")?;
    let max_n = *ctx.cfg.require(&ctx.cfg.max_n, "max-n")?;
    if c == 0 {
        return Err(CliError::Usage("c must be at least 1".into()));
    }
    let method = ctx.cfg.sequence_method.unwrap_or(if c == 3 {
        SequenceMethodArg::Both
    } else {
        SequenceMethodArg::Brute
    });
    let brute = matches!(method, SequenceMethodArg::Brute | SequenceMethodArg::Both);
    let recurrence = matches!(method, SequenceMethodArg::Recurrence | SequenceMethodArg::Both);
    if recurrence && c != 3 {
        return Err(CliError::Usage(format!("no recurrence is known for c = {c}; use --method brute")));
    }
    let series = if recurrence { t3_recurrence(max_n) } else { Vec::new() };
    let text = sc_partition(c)?.to_string();
    let mut rows = Vec::new();
    for n in c..=max_n {
        let b = if brute {
            let group = ctx.group(n)?;
            let jobs = ctx.cfg.jobs;
            let key = CacheKey {
                partition: text.clone(),
                n,
                method: "toothed".into(),
            };
            let v = ctx.cache.resolve(key, || Ok(parallel::count_toothed(&group, c, jobs).to_string()))?;
            Some(v.parse::<u64>().map_err(|_| CliError::Usage(format!("corrupt cache value `{v}`")))?)
        } else {
            None
        };
        let r = series.get(n).copied();
        let agree = match (b, r) {
            (Some(x), Some(y)) => x == y,
            _ => true,
        };
        rows.push(SequenceRow {
            n,
            brute: b,
            recurrence: r,
            agree,
        });
    }
    let ok = rows.iter().all(|r| r.agree);
    match ctx.cfg.sequence_format {
        SequenceFormat::Csv => ctx.csv(&rows)?,
        SequenceFormat::Bfile => {
            let values: Vec<(usize, String)> = rows
                .iter()
                .map(|r| (r.n, r.brute.or(r.recurrence).unwrap_or_default().to_string()))
                .collect();
            let text = bfile(values.iter().map(|(n, v)| (*n, v.as_str())));
            ctx.out.write_all(text.as_bytes())?;
        }
        SequenceFormat::Json => ctx.json_pretty(&SequenceDocument { c, rows })?,
    }
    Ok(Status::from_ok(ok))
}

/// One line of a verification suite.
#[derive(Clone, Debug, Serialize)]
struct Check {
    name: String,
    c: usize,
    n: Option<usize>,
    checks: u64,
    violations: u64,
    first: Option<String>,
}

impl Check {
    fn new(name: impl Into<String>, c: usize, n: Option<usize>) -> Self {
        Self {
            name: name.into(),
            c,
            n,
            checks: 0,
            violations: 0,
            first: None,
        }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations += 1;
            self.first.get_or_insert_with(detail);
        }
    }
}

#[derive(Serialize)]
struct VerifyDocument {
    suite: &'static str,
    max_n: usize,
    passed: bool,
    checks: Vec<Check>,
}

fn verify(ctx: &mut Context<'_>) -> CliResult<Status> {
    let suite = *ctx.cfg.require(&ctx.cfg.suite, "suite")?;
    let max_n = *ctx.cfg.require(&ctx.cfg.max_n, "max-n")?;
    ctx.group(max_n)?;
    let (name, checks) = match suite {
        Suite::Lemmas => ("lemmas", verify_lemmas(ctx, max_n)?),
        Suite::S3 => ("s3", verify_s3(ctx, max_n)?),
        Suite::Sc => ("sc", verify_sc(ctx, max_n)?),
    };
    let passed = checks.iter().all(|c| c.violations == 0);
    ctx.json_pretty(&VerifyDocument {
        suite: name,
        max_n,
        passed,
        checks,
    })?;
    Ok(Status::from_ok(passed))
}

fn suite_checks(report: &SuiteReport, c: usize, label: &str) -> Vec<Check> {
    report
        .tallies
        .iter()
        .map(|t| Check {
            name: format!("{} ({label})", t.lemma.name()),
            c,
            n: None,
            checks: t.checks,
            violations: t.violations,
            first: t.first.as_ref().map(|v| format!("{}: {}", v.word, v.detail)),
        })
        .collect()
}

/// Random trials per independently seeded stream.
const TRIAL_BLOCK: u64 = 1000;

fn verify_lemmas(ctx: &mut Context<'_>, max_n: usize) -> CliResult<Vec<Check>> {
    let exhaustive = exhaustive_suite(3, max_n, &lemma_systems(3)?, ctx.cfg.guard)?;
    let mut checks = suite_checks(&exhaustive, 3, &format!("exhaustive, n <= {max_n}"));
    let trials = ctx.cfg.trials;
    if trials > 0 {
        let seed = ctx.cfg.seed;
        let blocks = trials.div_ceil(TRIAL_BLOCK);
        let parts = parallel::map_shards(blocks, ctx.cfg.jobs, |r| {
            let mut acc: Option<SuiteReport> = None;
            for b in r {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(b);
                let len = TRIAL_BLOCK.min(trials - b * TRIAL_BLOCK);
                let part = random_suite(4, 8, len, &mut rng)?;
                match &mut acc {
                    None => acc = Some(part),
                    Some(a) => a.merge(part),
                }
            }
            Ok::<_, permeq_core::Error>(acc)
        });
        let mut random: Option<SuiteReport> = None;
        for part in parts {
            if let Some(part) = part? {
                match &mut random {
                    None => random = Some(part),
                    Some(acc) => acc.merge(part),
                }
            }
        }
        if let Some(random) = random {
            checks.extend(suite_checks(&random, 4, &format!("{trials} random trials, n = 8")));
        }
    }
    Ok(checks)
}

fn verify_s3(ctx: &mut Context<'_>, max_n: usize) -> CliResult<Vec<Check>> {
    let partitions: Vec<ReplacementPartition> = all_subset_partitions(3).collect();
    let right = ["123", "132", "213"].map(|s| s.parse::<Pattern>().expect("pattern"));
    let left = ["321", "312", "231"].map(|s| s.parse::<Pattern>().expect("pattern"));
    let together = |p: &ReplacementPartition, set: &[Pattern; 3]| {
        set.iter().all(|u| p.part_index(u).is_some() && p.part_index(u) == p.part_index(&set[0]))
    };
    let mut checks = Vec::new();
    for n in 3..=max_n {
        let group = ctx.group(n)?;
        let reports = parallel::map_shards(partitions.len() as u64, ctx.cfg.jobs, |r| {
            partitions[r.start as usize..r.end as usize]
                .iter()
                .map(|p| {
                    let sys = default_straightening_set(p);
                    let report = check_confluence(&group, &sys);
                    let brute = report.total_classes;
                    let formula = (p.is_full() && !together(p, &right) && !together(p, &left))
                        .then(|| formula_count(n, 3, 6 - p.part_count() as u64));
                    (report, brute, formula)
                })
                .collect::<Vec<_>>()
        });
        let mut conf = Check::new("confluent with the default straightening set", 3, Some(n));
        let mut roots = Check::new("roots equal classes", 3, Some(n));
        let mut formula = Check::new("class count formula", 3, Some(n));
        for (p, (report, brute, f)) in partitions.iter().zip(reports.into_iter().flatten()) {
            conf.record(report.is_confluent(), || format!("{p}"));
            roots.record(report.sinks == report.total_classes, || {
                format!("{p}: {} roots, {} classes", report.sinks, report.total_classes)
            });
            if let Some(f) = f {
                let f = f?;
                formula.record(f == BigInt::from(brute), || format!("{p}: formula {f}, brute {brute}"));
            }
        }
        checks.extend([conf, roots, formula]);
    }
    Ok(checks)
}

fn verify_sc(ctx: &mut Context<'_>, max_n: usize) -> CliResult<Vec<Check>> {
    let mut checks = Vec::new();
    for c in 2..=4.min(max_n) {
        let sys = sc_straightening_set(c)?;
        let mut roots = Check::new("unique root per class", c, None);
        let mut tooth = Check::new("identity class equals c-toothed permutations", c, None);
        let mut structure = Check::new("classes factor along root runs", c, None);
        for n in c..=max_n {
            let group = ctx.group(n)?;
            match parallel::enumerate_classes(&group, sys.partition(), Some(&sys), ctx.cfg.jobs) {
                Ok(d) => {
                    for _ in d.classes() {
                        roots.record(true, String::new);
                    }
                }
                Err(e) => roots.record(false, || format!("n = {n}: {e}")),
            }
            match id_class(n, c, ctx.cfg.guard) {
                Ok(_) => tooth.record(true, String::new),
                Err(e) => tooth.record(false, || format!("n = {n}: {e}")),
            }
            let report = sc_class_structure(n, c, ctx.cfg.guard)?;
            structure.checks += report.classes as u64;
            structure.violations += report.violations.len() as u64;
            if let Some(v) = report.violations.first() {
                structure.first.get_or_insert_with(|| format!("n = {n}: root {}: {}", v.root, v.detail));
            }
        }
        checks.extend([roots, tooth, structure]);
    }
    if max_n >= 3 {
        let mut seq = Check::new("T(3, n) by enumeration equals the recurrence", 3, None);
        let series = t3_recurrence(max_n);
        for (n, &want) in series.iter().enumerate().skip(3) {
            let group = ctx.group(n)?;
            let brute = parallel::count_toothed(&group, 3, ctx.cfg.jobs);
            seq.record(brute == want, || format!("n = {n}: {brute} vs {want}"));
        }
        checks.push(seq);
    }
    Ok(checks)
}
