//! Command-line front end, file formats, result cache and multi-threaded
//! enumeration for `permeq-core`.

pub mod cache;
pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod parallel;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};

use cache::Cache;
use cli::RunConfig;
use commands::{Context, Status};
use error::{CliError, CliResult};

pub const EXIT_SUCCESS: u8 = 0;
pub const EXIT_VERIFICATION_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

/// Runs one invocation and returns its exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let parsed = match cli::parse(args) {
        Ok(p) => p,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_SUCCESS };
        }
    };
    match RunConfig::resolve(parsed).and_then(|cfg| execute(&cfg)) {
        Ok(Status::Success) => EXIT_SUCCESS,
        Ok(Status::Failed) => EXIT_VERIFICATION_FAILED,
        Err(e) => {
            eprintln!("permeq: {e}");
            EXIT_USAGE
        }
    }
}

/// Runs a resolved configuration, writing to stdout or `cfg.output`.
pub fn execute(cfg: &RunConfig) -> CliResult<Status> {
    let mut cache = match &cfg.cache_dir {
        Some(dir) => Cache::open(dir, cfg.verify_cache)?,
        None => Cache::disabled(),
    };
    let sink: Box<dyn Write> = match &cfg.output {
        Some(path) => Box::new(File::create(path).map_err(CliError::io(path))?),
        None => Box::new(io::stdout().lock()),
    };
    let mut out = BufWriter::new(sink);
    let status = commands::run(&mut Context {
        cfg,
        cache: &mut cache,
        out: &mut out,
    })?;
    out.flush()?;
    cache.save()?;
    if !cache.mismatches().is_empty() {
        for m in cache.mismatches() {
            eprintln!(
                "permeq: cache mismatch for {} n = {} ({}): cached {}, recomputed {}",
                m.key.partition, m.key.n, m.key.method, m.cached, m.fresh
            );
        }
        return Ok(Status::Failed);
    }
    Ok(status)
}
