//! Training-time augmentation: the dilation and smudge transforms, and a
//! corpus-level driver that writes transformed copies next to the originals.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::distance::{distance_transform, Metric};
use crate::raster::image::GrayImage;
use crate::raster::io::{encode_png, encode_rgb_png, read_gray};
use crate::raster::{binarize, dilate_binary, BinarizeMethod};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DilationParams {
    pub kernel_w: u32,
    pub kernel_h: u32,
    pub iterations: u32,
    pub binarize: BinarizeMethod,
}

impl Default for DilationParams {
    fn default() -> Self {
        Self {
            kernel_w: 2,
            kernel_h: 2,
            iterations: 1,
            binarize: BinarizeMethod::Otsu,
        }
    }
}

impl DilationParams {
    pub fn validate(&self) -> Result<()> {
        if self.kernel_w == 0 || self.kernel_h == 0 {
            return Err(Error::Config("dilation kernel must be at least 1x1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SmudgeParams {
    /// Distance (px) at which the ramp saturates to white.
    pub cap_distance: u32,
    pub binarize: BinarizeMethod,
}

impl Default for SmudgeParams {
    fn default() -> Self {
        Self {
            cap_distance: 15,
            binarize: BinarizeMethod::Otsu,
        }
    }
}

impl SmudgeParams {
    pub fn validate(&self) -> Result<()> {
        if self.cap_distance == 0 {
            return Err(Error::Config("smudge cap_distance must be >= 1".into()));
        }
        Ok(())
    }
}

/// Three 8-bit planes: euclidean, cityblock and chessboard distance ramps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorImage {
    width: u32,
    height: u32,
    planes: [Vec<u8>; 3],
}

impl ColorImage {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn plane(&self, channel: usize) -> &[u8] {
        &self.planes[channel]
    }

    pub fn get(&self, x: u32, y: u32) -> [u8; 3] {
        let i = y as usize * self.width as usize + x as usize;
        [self.planes[0][i], self.planes[1][i], self.planes[2][i]]
    }

    pub fn encode_png(&self) -> Result<Vec<u8>> {
        encode_rgb_png(
            self.width,
            self.height,
            [&self.planes[0], &self.planes[1], &self.planes[2]],
        )
    }
}

/// Thickens ink: binarize, dilate, render black on white.
pub fn dilation_transform(img: &GrayImage) -> GrayImage {
    dilation_transform_with(img, &DilationParams::default())
}

pub fn dilation_transform_with(img: &GrayImage, params: &DilationParams) -> GrayImage {
    let bin = binarize(img, params.binarize);
    dilate_binary(&bin, params.kernel_w, params.kernel_h, params.iterations).to_gray()
}

/// Maps a distance to the capped linear ramp `round(255 * min(d, cap) / cap)`.
pub fn smudge_value(d: f64, cap: u32) -> u8 {
    let cap = cap as f64;
    (255.0 * d.min(cap) / cap).round() as u8
}

/// Spreads ink into a smeared halo: one channel per distance metric.
pub fn smudge_transform(img: &GrayImage, params: &SmudgeParams) -> ColorImage {
    let bin = binarize(img, params.binarize);
    let (w, h) = (img.width(), img.height());
    let n = w as usize * h as usize;
    let planes = if bin.count() == 0 {
        // nothing to spread; small pages would otherwise show the finite sentinel
        [vec![255u8; n], vec![255u8; n], vec![255u8; n]]
    } else {
        Metric::ALL.map(|m| {
            distance_transform(&bin, m)
                .values()
                .iter()
                .map(|&d| smudge_value(d, params.cap_distance))
                .collect()
        })
    };
    ColorImage {
        width: w,
        height: h,
        planes,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AugmentMode {
    Dilate,
    Smudge,
    Both,
}

impl AugmentMode {
    fn transforms(self) -> &'static [EntryKind] {
        match self {
            AugmentMode::Dilate => &[EntryKind::Dilate],
            AugmentMode::Smudge => &[EntryKind::Smudge],
            AugmentMode::Both => &[EntryKind::Dilate, EntryKind::Smudge],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryKind {
    Original,
    Dilate,
    Smudge,
    Skipped,
}

/// One manifest row. Paths are file names relative to the input / output directories.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub original: String,
    pub output: Option<String>,
    pub mode: EntryKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn skipped(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| e.mode == EntryKind::Skipped)
            .count()
    }

    pub fn outputs(&self) -> usize {
        self.entries.iter().filter(|e| e.output.is_some()).count()
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct AugmentParams {
    pub dilation: DilationParams,
    pub smudge: SmudgeParams,
}

/// Writes every readable image of `input_dir` plus its transformed versions
/// into `output_dir` and returns the manifest (also written as `manifest.json`).
///
/// Unreadable files are listed as skipped; processing continues.
pub fn augment_corpus(
    input_dir: &Path,
    output_dir: &Path,
    mode: AugmentMode,
    params: &AugmentParams,
) -> Result<Manifest> {
    params.dilation.validate()?;
    params.smudge.validate()?;
    let mut names: Vec<String> = std::fs::read_dir(input_dir)
        .map_err(|e| Error::io(input_dir, e))?
        .filter_map(|entry| entry.ok())
        .filter(|entry| entry.file_type().map(|t| t.is_file()).unwrap_or(false))
        .filter_map(|entry| entry.file_name().into_string().ok())
        .collect();
    names.sort();
    std::fs::create_dir_all(output_dir).map_err(|e| Error::io(output_dir, e))?;

    let per_file: Vec<Vec<(PathBuf, Vec<u8>, ManifestEntry)>> = names
        .par_iter()
        .map(|name| augment_one(input_dir, name, mode, params))
        .collect();

    let mut manifest = Manifest::default();
    let mut taken = std::collections::BTreeSet::new();
    for (name, outputs) in names.iter().zip(per_file) {
        let clash = outputs.iter().find(|(p, _, _)| taken.contains(p));
        if let Some((p, _, _)) = clash {
            manifest.entries.push(ManifestEntry {
                original: name.clone(),
                output: None,
                mode: EntryKind::Skipped,
                error: Some(format!(
                    "output name {} already used by another input",
                    p.display()
                )),
            });
            continue;
        }
        for (rel, bytes, entry) in outputs {
            if entry.output.is_some() {
                let path = output_dir.join(&rel);
                std::fs::write(&path, &bytes).map_err(|e| Error::io(&path, e))?;
                taken.insert(rel);
            }
            manifest.entries.push(entry);
        }
    }
    let path = output_dir.join("manifest.json");
    let json = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&path, json).map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

fn augment_one(
    dir: &Path,
    name: &str,
    mode: AugmentMode,
    params: &AugmentParams,
) -> Vec<(PathBuf, Vec<u8>, ManifestEntry)> {
    let path = dir.join(name);
    let skipped = |msg: String| {
        vec![(
            PathBuf::new(),
            Vec::new(),
            ManifestEntry {
                original: name.to_string(),
                output: None,
                mode: EntryKind::Skipped,
                error: Some(msg),
            },
        )]
    };
    let original = match std::fs::read(&path) {
        Ok(b) => b,
        Err(e) => return skipped(e.to_string()),
    };
    let img = match read_gray(&path) {
        Ok(img) => img,
        Err(e) => return skipped(e.to_string()),
    };
    let stem = Path::new(name)
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or(name)
        .to_string();
    let entry = |output: &str, mode| ManifestEntry {
        original: name.to_string(),
        output: Some(output.to_string()),
        mode,
        error: None,
    };
    let mut out = vec![(
        PathBuf::from(name),
        original,
        entry(name, EntryKind::Original),
    )];
    for &kind in mode.transforms() {
        let (suffix, bytes) = match kind {
            EntryKind::Dilate => (
                "dilate",
                encode_png(&dilation_transform_with(&img, &params.dilation)),
            ),
            EntryKind::Smudge => (
                "smudge",
                smudge_transform(&img, &params.smudge).encode_png(),
            ),
            _ => unreachable!("only transforms are listed"),
        };
        let bytes = match bytes {
            Ok(b) => b,
            Err(e) => return skipped(e.to_string()),
        };
        let out_name = format!("{stem}_{suffix}.png");
        out.push((PathBuf::from(&out_name), bytes, entry(&out_name, kind)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn white_page_stays_white() {
        let img = GrayImage::blank(8, 8).unwrap();
        assert_eq!(dilation_transform(&img), img);
        let s = smudge_transform(&img, &SmudgeParams::default());
        for c in 0..3 {
            assert!(s.plane(c).iter().all(|&v| v == 255));
        }
    }

    #[test]
    fn single_pixel_dilates_to_block() {
        let mut img = GrayImage::blank(8, 8).unwrap();
        img.set(3, 3, 0);
        let out = dilation_transform(&img);
        for y in 0..8 {
            for x in 0..8 {
                let ink = (3..5).contains(&x) && (3..5).contains(&y);
                assert_eq!(out.get(x, y), if ink { 0 } else { 255 });
            }
        }
    }

    #[test]
    fn smudge_ramp_values() {
        let mut img = GrayImage::blank(16, 16).unwrap();
        img.set(0, 0, 0);
        let s = smudge_transform(&img, &SmudgeParams::default());
        assert_eq!(s.get(0, 0), [0, 0, 0]);
        assert_eq!(s.get(3, 4), [85, 119, 68]);
        assert_eq!(s.get(15, 15), [255, 255, 255]);
    }

    #[test]
    fn params_validate() {
        assert!(SmudgeParams {
            cap_distance: 0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(DilationParams {
            kernel_w: 0,
            ..Default::default()
        }
        .validate()
        .is_err());
    }
}
