//! File formats and command-line front end for `mixjitter`: CSV datasets,
//! JSON model artifacts, JSON configuration, and the `mixjitter` binary's
//! subcommands.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::hash_map::RandomState;
use std::ffi::OsString;
use std::fs;
use std::hash::BuildHasher;
use std::io::Write;
use std::path::Path;
use std::time::SystemTime;

use clap::Parser;
use mixjitter::estimators::Kernel;
use mixjitter::NoiseSpec;

pub mod args;
pub mod artifact;
pub mod commands;
pub mod config;
pub mod csvio;
pub mod error;

use args::{Cli, Command, NoiseArgs, SchemaArgs, SeedArg};
use config::{Settings, DEFAULT_JITTERS, DEFAULT_NU, DEFAULT_SEED, DEFAULT_THETA};
use csvio::SchemaSpec;
pub use error::{exit, CliError, CliResult};

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit code. Messages go to stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::USAGE } else { exit::OK };
        }
    };
    match run(cli) {
        Ok(()) => exit::OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Jitter(a) => commands::jitter::run(&a),
        Command::Fit(a) => commands::fit::run(&a),
        Command::Eval(a) => commands::eval::run(&a),
        Command::Verify(a) => commands::verify::run(&a),
        Command::Simulate(a) => commands::simulate::run(&a),
        Command::Benchmark(a) => commands::benchmark::run(&a),
    }
}

/// Settings after applying flags over the config file over defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub seed: u64,
    pub theta: f64,
    pub nu: u32,
    pub jitters: usize,
    pub kernel: Kernel,
    pub bandwidth: Option<Vec<f64>>,
    pub schema: SchemaSpec,
}

impl Resolved {
    /// Noise spec for `dims` discrete columns.
    pub fn noise(&self, dims: usize) -> CliResult<NoiseSpec> {
        NoiseSpec::new(self.theta, self.nu, dims).map_err(|e| CliError::Usage(e.to_string()))
    }
}

pub(crate) fn resolve(
    noise: &NoiseArgs,
    schema: Option<&SchemaArgs>,
    kernel: Option<Kernel>,
    jitters: Option<usize>,
    bandwidth: Option<&Vec<f64>>,
) -> CliResult<Resolved> {
    let file = match &noise.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    let schema = match schema {
        Some(s) if !(s.discrete.is_empty() && s.continuous.is_empty() && s.categorical.is_empty()) => SchemaSpec {
            discrete: s.discrete.clone(),
            continuous: s.continuous.clone(),
            categorical: s.categorical.clone(),
        },
        _ => file.schema(),
    };
    Ok(Resolved {
        seed: resolve_seed(noise.seed, file.seed),
        theta: noise.theta.or(file.theta).unwrap_or(DEFAULT_THETA),
        nu: noise.nu.or(file.nu).unwrap_or(DEFAULT_NU),
        jitters: jitters.or(file.jitters).unwrap_or(DEFAULT_JITTERS),
        kernel: kernel.or(file.kernel).unwrap_or_default(),
        bandwidth: bandwidth.cloned().or(file.bandwidth),
        schema,
    })
}

pub(crate) fn resolve_seed(flag: Option<SeedArg>, file: Option<u64>) -> u64 {
    match flag {
        Some(SeedArg::Fixed(s)) => s,
        Some(SeedArg::Entropy) => {
            let seed = RandomState::new().hash_one(SystemTime::now());
            eprintln!("seed = {seed}");
            seed
        }
        None => file.unwrap_or(DEFAULT_SEED),
    }
}

/// Writes `bytes` to `path`, or to stdout when `path` is `None`.
pub(crate) fn emit(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| CliError::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|()| out.flush())
                .map_err(|e| CliError::io("<stdout>", e))
        }
    }
}
