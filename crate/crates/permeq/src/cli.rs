//! Argument parsing and resolution of flags, environment and config file
//! into a [`RunConfig`].

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use permeq_core::counting::KReading;
use permeq_core::rank::MAX_ENUMERABLE_N;

use crate::config::{FileConfig, Layer};
use crate::error::{CliError, CliResult};

/// Largest `n` enumerated without `--allow-large`.
pub const DEFAULT_GUARD: usize = 10;

#[derive(Debug, Parser)]
#[command(name = "permeq", version, about = "Pattern-replacement equivalence classes of permutations")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML file supplying defaults for any flag
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Directory of the result cache
    #[arg(long, global = true, env = "PERMEQ_CACHE_DIR", value_name = "DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Ignore the result cache
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Recompute cached values and fail on any difference
    #[arg(long, global = true)]
    pub verify_cache: bool,
    /// Worker threads for enumeration
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    /// Largest n to enumerate [default: 10]
    #[arg(long, global = true, value_name = "N")]
    pub guard: Option<usize>,
    /// Allow enumeration beyond n = 10 (up to 12)
    #[arg(long, global = true)]
    pub allow_large: bool,
    /// Write the main output to FILE instead of stdout
    #[arg(long, short = 'o', global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the equivalence classes of S_n
    Classes(ClassesArgs),
    /// Count classes by enumeration, formula and roots
    Count(CountArgs),
    /// Check that straightening reaches a unique root in every class
    Confluence(ConfluenceArgs),
    /// Straighten a permutation to its root, printing every step
    NormalForm(NormalFormArgs),
    /// Irreducible blocks of a permutation and whether it is c-toothed
    Toothed(ToothedArgs),
    /// Counts of c-toothed permutations
    #[command(name = "sc-sequence", alias = "sequence")]
    ScSequence(SequenceArgs),
    /// Run an exhaustive property suite
    Verify(VerifyArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Classes(_) => "classes",
            Self::Count(_) => "count",
            Self::Confluence(_) => "confluence",
            Self::NormalForm(_) => "normal-form",
            Self::Toothed(_) => "toothed",
            Self::ScSequence(_) => "sc-sequence",
            Self::Verify(_) => "verify",
        }
    }
}

#[derive(Debug, Args)]
pub struct ClassesArgs {
    /// Partition spec (`123,321|132`), partition JSON, or @FILE
    #[arg(long, short)]
    pub partition: Option<String>,
    #[arg(long, short)]
    pub n: Option<usize>,
    /// Record the root of every class
    #[arg(long)]
    pub roots: bool,
    /// Straightening set: `auto` or a comma-separated member list
    #[arg(long)]
    pub straightening: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<ClassFormat>,
    /// Also write the classes as a DOT graph
    #[arg(long, value_name = "FILE")]
    pub dot: Option<PathBuf>,
    /// Omit member lists
    #[arg(long)]
    pub sizes_only: bool,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[arg(long, short)]
    pub partition: Option<String>,
    /// A size or an inclusive range such as `3..7`
    #[arg(long, short)]
    pub n: Option<NRange>,
    #[arg(long, value_enum)]
    pub method: Option<CountMethod>,
    /// Reading of k in the formula: c! - |P| or n! - |P|
    #[arg(long, value_enum)]
    pub reading: Option<Reading>,
    #[arg(long, value_enum)]
    pub format: Option<TableFormat>,
}

#[derive(Debug, Args)]
pub struct ConfluenceArgs {
    #[arg(long, short)]
    pub partition: Option<String>,
    #[arg(long, short)]
    pub n: Option<NRange>,
    #[arg(long)]
    pub straightening: Option<String>,
    /// Also check the local diamond property
    #[arg(long)]
    pub diamond: bool,
    #[arg(long, value_enum)]
    pub format: Option<TableFormat>,
}

#[derive(Debug, Args)]
pub struct NormalFormArgs {
    #[arg(long, short)]
    pub partition: Option<String>,
    #[arg(long)]
    pub straightening: Option<String>,
    /// One-line notation, e.g. `125436`
    #[arg(long)]
    pub perm: Option<String>,
}

#[derive(Debug, Args)]
pub struct ToothedArgs {
    #[arg(long, short)]
    pub c: Option<usize>,
    #[arg(long)]
    pub perm: Option<String>,
}

#[derive(Debug, Args)]
pub struct SequenceArgs {
    #[arg(long, short)]
    pub c: Option<usize>,
    #[arg(long)]
    pub max_n: Option<usize>,
    /// Default: `both` for c = 3, otherwise `brute`
    #[arg(long, value_enum)]
    pub method: Option<SequenceMethodArg>,
    #[arg(long, value_enum)]
    pub format: Option<SequenceFormat>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Option<Suite>,
    #[arg(long)]
    pub max_n: Option<usize>,
    /// Random trials of the lemma suite at c = 4, n = 8
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ClassFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SequenceFormat {
    Csv,
    Bfile,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CountMethod {
    Brute,
    Formula,
    Roots,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Reading {
    /// k = c! - |P|
    Pattern,
    /// k = n! - |P|
    Host,
}

impl From<Reading> for KReading {
    fn from(r: Reading) -> Self {
        match r {
            Reading::Pattern => KReading::PatternFactorial,
            Reading::Host => KReading::HostFactorial,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SequenceMethodArg {
    Brute,
    Recurrence,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Lemmas,
    S3,
    Sc,
}

/// An inclusive range of sizes, written `5`, `3..7` or `3..=7`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NRange {
    pub lo: usize,
    pub hi: usize,
}

impl NRange {
    pub fn iter(self) -> std::ops::RangeInclusive<usize> {
        self.lo..=self.hi
    }
}

impl FromStr for NRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("`{s}` is not a size or range"));
        let (lo, hi) = match s.split_once("..") {
            None => (num(s)?, num(s)?),
            Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
        };
        if lo == 0 || lo > hi {
            return Err(format!("`{s}` is an empty range"));
        }
        Ok(Self { lo, hi })
    }
}

impl fmt::Display for NRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

/// Everything a command needs, after flags, environment and config file
/// have been merged.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: &'static str,
    pub partition: Option<String>,
    pub straightening: Option<String>,
    pub n: Option<NRange>,
    pub c: Option<usize>,
    pub max_n: Option<usize>,
    pub perm: Option<String>,
    pub count_method: CountMethod,
    pub sequence_method: Option<SequenceMethodArg>,
    pub reading: KReading,
    pub class_format: ClassFormat,
    pub table_format: TableFormat,
    pub sequence_format: SequenceFormat,
    pub suite: Option<Suite>,
    pub trials: u64,
    pub seed: u64,
    pub roots: bool,
    pub diamond: bool,
    pub sizes_only: bool,
    pub dot: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub jobs: usize,
    pub guard: usize,
    pub cache_dir: Option<PathBuf>,
    pub verify_cache: bool,
}

impl RunConfig {
    pub fn resolve(cli: Cli) -> CliResult<Self> {
        let file = cli.global.config.as_deref().map(FileConfig::load).transpose()?;
        let layer = Layer::new(file, cli.command.name());
        let g = &cli.global;
        let allow_large = layer.switch(g.allow_large, |k| k.allow_large);
        let guard = layer.pick(g.guard, |k| k.guard);
        let guard = match guard {
            Some(n) if n > DEFAULT_GUARD && !allow_large => {
                return Err(CliError::Usage(format!(
                    "a guard of {n} exceeds {DEFAULT_GUARD}; pass --allow-large to confirm"
                )))
            }
            Some(n) => n.min(MAX_ENUMERABLE_N),
            None if allow_large => MAX_ENUMERABLE_N,
            None => DEFAULT_GUARD,
        };
        let jobs = layer.pick(g.jobs, |k| k.jobs).unwrap_or(1);
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        let no_cache = layer.switch(g.no_cache, |k| k.no_cache);
        let verify_cache = layer.switch(g.verify_cache, |k| k.verify_cache);
        let cache_dir = if no_cache {
            None
        } else {
            layer.pick(g.cache_dir.clone(), |k| k.cache_dir.clone())
        };
        if verify_cache && cache_dir.is_none() {
            return Err(CliError::Usage("--verify-cache needs a cache directory".into()));
        }
        let mut cfg = Self {
            command: cli.command.name(),
            partition: layer.pick(None, |k| k.partition.clone()),
            straightening: layer.pick(None, |k| k.straightening.clone()),
            n: layer
                .pick(None, |k| k.n.clone())
                .map(|v| v.into_text().parse::<NRange>().map_err(CliError::Usage))
                .transpose()?,
            c: layer.pick(None, |k| k.c),
            max_n: layer.pick(None, |k| k.max_n),
            perm: layer.pick(None, |k| k.perm.clone()),
            count_method: CountMethod::All,
            sequence_method: None,
            reading: KReading::PatternFactorial,
            class_format: ClassFormat::Json,
            table_format: TableFormat::Csv,
            sequence_format: SequenceFormat::Csv,
            suite: None,
            trials: layer.pick(None, |k| k.trials).unwrap_or(10_000),
            seed: layer.pick(None, |k| k.seed).unwrap_or(0),
            roots: layer.switch(false, |k| k.roots),
            diamond: layer.switch(false, |k| k.diamond),
            sizes_only: layer.switch(false, |k| k.sizes_only),
            dot: layer.pick(None, |k| k.dot.clone()),
            output: layer.pick(g.output.clone(), |k| k.output.clone()),
            jobs,
            guard,
            cache_dir,
            verify_cache,
        };
        let method = |k: &crate::config::Keys| k.method.clone();
        let format = |k: &crate::config::Keys| k.format.clone();
        match cli.command {
            Command::Classes(a) => {
                cfg.set_partition(a.partition);
                cfg.n = a.n.map(|n| NRange { lo: n, hi: n }).or(cfg.n);
                cfg.roots |= a.roots;
                cfg.straightening = a.straightening.or(cfg.straightening);
                cfg.class_format = layer.pick_enum(a.format, "format", format)?.unwrap_or(ClassFormat::Json);
                cfg.dot = a.dot.or(cfg.dot);
                cfg.sizes_only |= a.sizes_only;
            }
            Command::Count(a) => {
                cfg.set_partition(a.partition);
                cfg.n = a.n.or(cfg.n);
                cfg.count_method = layer.pick_enum(a.method, "method", method)?.unwrap_or(CountMethod::All);
                cfg.reading = layer
                    .pick_enum(a.reading, "reading", |k| k.reading.clone())?
                    .map_or(KReading::PatternFactorial, KReading::from);
                cfg.table_format = layer.pick_enum(a.format, "format", format)?.unwrap_or(TableFormat::Csv);
            }
            Command::Confluence(a) => {
                cfg.set_partition(a.partition);
                cfg.n = a.n.or(cfg.n);
                cfg.straightening = a.straightening.or(cfg.straightening);
                cfg.diamond |= a.diamond;
                cfg.table_format = layer.pick_enum(a.format, "format", format)?.unwrap_or(TableFormat::Csv);
            }
            Command::NormalForm(a) => {
                cfg.set_partition(a.partition);
                cfg.straightening = a.straightening.or(cfg.straightening);
                cfg.perm = a.perm.or(cfg.perm);
            }
            Command::Toothed(a) => {
                cfg.c = a.c.or(cfg.c);
                cfg.perm = a.perm.or(cfg.perm);
            }
            Command::ScSequence(a) => {
                cfg.c = a.c.or(cfg.c);
                cfg.max_n = a.max_n.or(cfg.max_n);
                cfg.sequence_method = layer.pick_enum(a.method, "method", method)?;
                cfg.sequence_format = layer.pick_enum(a.format, "format", format)?.unwrap_or(SequenceFormat::Csv);
            }
            Command::Verify(a) => {
                cfg.suite = layer.pick_enum(a.suite, "suite", |k| k.suite.clone())?;
                cfg.max_n = a.max_n.or(cfg.max_n);
                cfg.trials = a.trials.unwrap_or(cfg.trials);
                cfg.seed = a.seed.unwrap_or(cfg.seed);
            }
        }
        Ok(cfg)
    }

    fn set_partition(&mut self, flag: Option<String>) {
        if flag.is_some() {
            self.partition = flag;
        }
    }

    pub fn require<'a, T>(&self, value: &'a Option<T>, flag: &str) -> CliResult<&'a T> {
        value
            .as_ref()
            .ok_or_else(|| CliError::Usage(format!("`{}` needs --{flag}", self.command)))
    }
}

/// Parses `args` (program name first).
pub fn parse<I, T>(args: I) -> Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    Cli::try_parse_from(args)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(args: &[&str]) -> CliResult<RunConfig> {
        RunConfig::resolve(parse(std::iter::once("permeq").chain(args.iter().copied())).unwrap())
    }

    #[test]
    fn ranges() {
        assert_eq!("5".parse::<NRange>().unwrap(), NRange { lo: 5, hi: 5 });
        assert_eq!("3..7".parse::<NRange>().unwrap(), NRange { lo: 3, hi: 7 });
        assert_eq!("3..=7".parse::<NRange>().unwrap(), NRange { lo: 3, hi: 7 });
        assert!("7..3".parse::<NRange>().is_err());
        assert!("0".parse::<NRange>().is_err());
        assert!("x..3".parse::<NRange>().is_err());
    }

    #[test]
    fn guard_needs_acknowledgment() {
        assert_eq!(resolve(&["toothed"]).unwrap().guard, DEFAULT_GUARD);
        assert!(resolve(&["toothed", "--guard", "11"]).is_err());
        assert_eq!(resolve(&["toothed", "--guard", "11", "--allow-large"]).unwrap().guard, 11);
        assert_eq!(resolve(&["toothed", "--allow-large"]).unwrap().guard, MAX_ENUMERABLE_N);
        assert_eq!(resolve(&["toothed", "--guard", "6"]).unwrap().guard, 6);
    }

    #[test]
    fn config_file_fills_missing_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("permeq.toml");
        std::fs::write(
            &path,
            "partition = \"123,321\"\njobs = 3\n[count]\nn = \"3..5\"\nmethod = \"brute\"\n",
        )
        .unwrap();
        let p = path.to_str().unwrap();
        let cfg = resolve(&["--config", p, "count"]).unwrap();
        assert_eq!(cfg.partition.as_deref(), Some("123,321"));
        assert_eq!(cfg.n, Some(NRange { lo: 3, hi: 5 }));
        assert_eq!(cfg.count_method, CountMethod::Brute);
        assert_eq!(cfg.jobs, 3);
        let cfg = resolve(&["count", "--config", p, "--method", "formula", "--jobs", "1", "-n", "4"]).unwrap();
        assert_eq!(cfg.count_method, CountMethod::Formula);
        assert_eq!(cfg.jobs, 1);
        assert_eq!(cfg.n, Some(NRange { lo: 4, hi: 4 }));
        let cfg = resolve(&["--config", p, "classes"]).unwrap();
        assert_eq!(cfg.n, None);
    }

    #[test]
    fn sequence_alias() {
        assert_eq!(resolve(&["sequence", "--c", "3"]).unwrap().command, "sc-sequence");
    }

    #[test]
    fn verify_cache_needs_a_directory() {
        assert!(resolve(&["toothed", "--verify-cache", "--no-cache"]).is_err());
    }
}
