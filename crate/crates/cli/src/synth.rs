use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use tabstruct_core::detections::{DetectionDocument, GroundTruthDocument, FORMAT_VERSION};
use tabstruct_core::raster::io::encode_png;
use tabstruct_core::synth::{generate, SynthSpec, SynthTableType};

use crate::{json_bytes, read_file, write_file, EXIT_OK};

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Generator spec JSON; missing keys take defaults.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub pages: usize,
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the spec's seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Serialize)]
struct Manifest {
    format_version: &'static str,
    spec: SynthSpec,
    pages: Vec<PageEntry>,
    files: Vec<FileEntry>,
}

#[derive(Serialize)]
struct PageEntry {
    image_id: String,
    image: String,
    table_types: Vec<SynthTableType>,
}

#[derive(Serialize)]
struct FileEntry {
    path: String,
    bytes: usize,
    sha256: String,
}

pub fn run(args: &SynthArgs) -> anyhow::Result<i32> {
    let mut spec: SynthSpec = match &args.spec {
        Some(path) => serde_json::from_slice(&read_file(path)?)
            .with_context(|| format!("spec {}", path.display()))?,
        None => SynthSpec::default(),
    };
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    let docs = generate(&spec, args.pages)?;

    let images: Vec<(String, Vec<u8>)> = docs
        .par_iter()
        .map(|d| Ok((format!("{}.png", d.gt.image_id), encode_png(&d.image)?)))
        .collect::<anyhow::Result<_>>()?;
    let gt = GroundTruthDocument::new(docs.iter().map(|d| d.gt.clone()).collect());
    let det = DetectionDocument::new(docs.iter().map(|d| d.perfect_detections.clone()).collect());

    let mut files: Vec<(String, Vec<u8>)> = images;
    files.push(("gt.json".into(), gt.to_json()));
    files.push(("detections.json".into(), det.to_json()));
    files.sort_by(|a, b| a.0.cmp(&b.0));

    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    for (name, bytes) in &files {
        write_file(&args.out.join(name), bytes)?;
    }
    let manifest = Manifest {
        format_version: FORMAT_VERSION,
        pages: docs
            .iter()
            .map(|d| PageEntry {
                image_id: d.gt.image_id.clone(),
                image: format!("{}.png", d.gt.image_id),
                table_types: d.table_types.clone(),
            })
            .collect(),
        files: files
            .iter()
            .map(|(path, bytes)| FileEntry {
                path: path.clone(),
                bytes: bytes.len(),
                sha256: hex::encode(Sha256::digest(bytes)),
            })
            .collect(),
        spec,
    };
    write_file(&args.out.join("manifest.json"), &json_bytes(&manifest))?;
    eprintln!("{} pages written to {}", docs.len(), args.out.display());
    Ok(EXIT_OK)
}
