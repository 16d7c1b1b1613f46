use std::path::PathBuf;

use clap::{Args, ValueEnum};
use tabstruct_core::transforms::{augment_corpus, AugmentMode};
use tabstruct_core::PipelineConfig;

use crate::{EXIT_OK, EXIT_SKIPPED};

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Mode {
    Dilate,
    Smudge,
    Both,
}

#[derive(Debug, Args)]
pub struct AugmentArgs {
    /// Directory of input images.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Output directory; receives originals, transformed copies and manifest.json.
    #[arg(long = "out")]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    pub mode: Mode,
}

pub fn run(args: &AugmentArgs, config: &PipelineConfig) -> anyhow::Result<i32> {
    let mode = match args.mode {
        Mode::Dilate => AugmentMode::Dilate,
        Mode::Smudge => AugmentMode::Smudge,
        Mode::Both => AugmentMode::Both,
    };
    let manifest = augment_corpus(&args.input, &args.output, mode, &config.augment_params())?;
    let skipped = manifest.skipped();
    eprintln!("{} outputs, {} skipped", manifest.outputs(), skipped);
    for e in manifest.entries.iter().filter(|e| e.error.is_some()) {
        eprintln!(
            "skipped {}: {}",
            e.original,
            e.error.as_deref().unwrap_or_default()
        );
    }
    Ok(if skipped > 0 { EXIT_SKIPPED } else { EXIT_OK })
}
