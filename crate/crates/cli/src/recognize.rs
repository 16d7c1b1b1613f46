use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{ArgGroup, Args};
use rayon::prelude::*;
use tabstruct_core::detections::{parse_detection_document, PageDetections};
use tabstruct_core::pipeline::{recognize_page, PageStructure, StructureDocument};
use tabstruct_core::raster::io::read_gray;
use tabstruct_core::PipelineConfig;

use crate::{read_file, write_file, EXIT_OK};

const IMAGE_EXTENSIONS: [&str; 5] = ["png", "pgm", "pbm", "ppm", "pnm"];

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("input").required(true).args(["image", "images"])))]
pub struct RecognizeArgs {
    /// A single page image; writes one page of structures.
    #[arg(long)]
    pub image: Option<PathBuf>,
    /// A directory of page images named `<image_id>.<ext>`; writes every page.
    #[arg(long)]
    pub images: Option<PathBuf>,
    #[arg(long)]
    pub detections: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &RecognizeArgs, config: &PipelineConfig) -> anyhow::Result<i32> {
    let doc = parse_detection_document(&read_file(&args.detections)?)
        .with_context(|| format!("detections {}", args.detections.display()))?;
    let bytes = if let Some(image) = &args.image {
        let page = select_page(&doc.pages, image)?;
        recognize_file(image, page, config)?.to_json()
    } else {
        let dir = args.images.as_deref().expect("clap enforces one input");
        let files = image_files(dir)?;
        let jobs: Vec<(&PathBuf, &PageDetections)> =
            doc.pages
                .iter()
                .map(|p| {
                    files.get(&p.image_id).map(|f| (f, p)).with_context(|| {
                        format!("no image for {:?} in {}", p.image_id, dir.display())
                    })
                })
                .collect::<anyhow::Result<_>>()?;
        let pages: Vec<PageStructure> = jobs
            .par_iter()
            .map(|(f, p)| recognize_file(f, p, config))
            .collect::<anyhow::Result<_>>()?;
        StructureDocument::new(pages).to_json()
    };
    write_file(&args.out, &bytes)?;
    Ok(EXIT_OK)
}

fn recognize_file(
    path: &Path,
    page: &PageDetections,
    config: &PipelineConfig,
) -> anyhow::Result<PageStructure> {
    let img = read_gray(path)?;
    Ok(recognize_page(&img, page, config)?)
}

/// The only page, or the page whose id equals the image's file stem.
fn select_page<'a>(
    pages: &'a [PageDetections],
    image: &Path,
) -> anyhow::Result<&'a PageDetections> {
    if let [only] = pages {
        return Ok(only);
    }
    let stem = image
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or_default();
    match pages.iter().find(|p| p.image_id == stem) {
        Some(p) => Ok(p),
        None => bail!(
            "{} pages in detections and none has image_id {stem:?}",
            pages.len()
        ),
    }
}

/// Image files by stem; the first name in sorted order wins on duplicates.
fn image_files(dir: &Path) -> anyhow::Result<BTreeMap<String, PathBuf>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
        })
        .collect();
    paths.sort();
    let mut out = BTreeMap::new();
    for p in paths {
        if let Some(stem) = p.file_stem().and_then(|s| s.to_str()) {
            out.entry(stem.to_string()).or_insert(p.clone());
        }
    }
    Ok(out)
}
