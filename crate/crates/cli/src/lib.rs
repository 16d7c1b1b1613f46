//! The `tabstruct` command line: augment, recognize, evaluate, synth.
//!
//! Exit codes: 0 success, 1 fatal error, 2 finished but some inputs were skipped.

mod augment;
mod evaluate;
mod options;
mod recognize;
mod synth;

use std::path::Path;

use anyhow::Context;
use clap::{Parser, Subcommand};
use serde::Serialize;

pub use options::ConfigArgs;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FATAL: i32 = 1;
pub const EXIT_SKIPPED: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "tabstruct",
    version,
    about = "Table structure recovery toolkit"
)]
pub struct Cli {
    #[command(flatten)]
    pub config: ConfigArgs,

    /// Worker threads (default: available cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    pub workers: Option<u32>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write dilated and/or smudged copies of every image in a directory.
    Augment(augment::AugmentArgs),
    /// Recover table structures from a page image and its detections.
    Recognize(recognize::RecognizeArgs),
    /// Score predictions against ground truth.
    Evaluate(evaluate::EvaluateArgs),
    /// Generate a synthetic corpus with exact ground truth.
    Synth(synth::SynthArgs),
}

/// Parses `args` and runs the command, printing errors to stderr.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_FATAL } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}

pub fn run(cli: Cli) -> i32 {
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_FATAL
        }
    }
}

fn execute(cli: Cli) -> anyhow::Result<i32> {
    let config = cli.config.resolve()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers.unwrap_or(0) as usize)
        .build()
        .context("building worker pool")?;
    pool.install(|| match &cli.command {
        Command::Augment(a) => augment::run(a, &config),
        Command::Recognize(a) => recognize::run(a, &config),
        Command::Evaluate(a) => evaluate::run(a, &config),
        Command::Synth(a) => synth::run(a),
    })
}

pub(crate) fn read_file(path: &Path) -> anyhow::Result<Vec<u8>> {
    std::fs::read(path).with_context(|| format!("reading {}", path.display()))
}

pub(crate) fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("report types always serialize");
    out.push(b'\n');
    out
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}
