//! Page-level recognition: detections in, table structures out.

use serde::{Deserialize, Serialize};

use crate::config::PipelineConfig;
use crate::detections::{
    assign_cells, filter_by_score, parse_json, to_json_bytes, DetectionClass, PageDetections,
    FORMAT_VERSION,
};
use crate::error::{Error, Result};
use crate::raster::geometry::BBox;
use crate::raster::{binarize, BinaryImage, GrayImage};
use crate::structure::{bordered_structure, borderless_structure, TableStructure};

/// Structures recovered on one page, ordered by table position.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PageStructure {
    pub format_version: String,
    pub image_id: String,
    pub tables: Vec<TableStructure>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

impl PageStructure {
    pub fn to_json(&self) -> Vec<u8> {
        to_json_bytes(self)
    }
}

/// Several pages of structures, as written by batch recognition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureDocument {
    pub format_version: String,
    pub pages: Vec<PageStructure>,
}

impl StructureDocument {
    pub fn new(pages: Vec<PageStructure>) -> Self {
        Self {
            format_version: FORMAT_VERSION.to_string(),
            pages,
        }
    }

    pub fn to_json(&self) -> Vec<u8> {
        to_json_bytes(self)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AnyStructure {
    Document(StructureDocument),
    Page(PageStructure),
}

/// Reads either a single-page or a multi-page structure file.
pub fn parse_structures(input: &[u8]) -> Result<Vec<PageStructure>> {
    let pages = match parse_json::<AnyStructure>(input)? {
        AnyStructure::Document(d) => {
            check_version(&d.format_version, "document")?;
            d.pages
        }
        AnyStructure::Page(p) => vec![p],
    };
    for p in &pages {
        check_version(&p.format_version, &p.image_id)?;
        for (i, t) in p.tables.iter().enumerate() {
            t.validate().map_err(|e| Error::Validation {
                image_id: p.image_id.clone(),
                location: format!("table {i}"),
                rule: e.to_string(),
            })?;
        }
    }
    Ok(pages)
}

fn check_version(v: &str, image_id: &str) -> Result<()> {
    if v != FORMAT_VERSION {
        return Err(Error::Validation {
            image_id: image_id.to_string(),
            location: "format_version".into(),
            rule: format!("expected {FORMAT_VERSION:?}, got {v:?}"),
        });
    }
    Ok(())
}

/// Binarizes the page and runs each table through the branch its class names.
pub fn recognize_page(
    image: &GrayImage,
    detections: &PageDetections,
    config: &PipelineConfig,
) -> Result<PageStructure> {
    config.validate()?;
    if (image.width(), image.height()) != (detections.width, detections.height) {
        return Err(Error::Validation {
            image_id: detections.image_id.clone(),
            location: "page".into(),
            rule: format!(
                "image is {}x{} but detections declare {}x{}",
                image.width(),
                image.height(),
                detections.width,
                detections.height
            ),
        });
    }
    let page = binarize(image, config.binarize);
    Ok(recognize_binary(&page, detections, config))
}

/// Same as [`recognize_page`] on an already binarized page.
pub fn recognize_binary(
    page: &BinaryImage,
    detections: &PageDetections,
    config: &PipelineConfig,
) -> PageStructure {
    let kept = filter_by_score(detections, config.score_threshold);
    let assignment = assign_cells(&kept);
    let mut diagnostics = Vec::new();
    if assignment.dropped > 0 {
        diagnostics.push(format!(
            "{} cell(s) outside every borderless table dropped",
            assignment.dropped
        ));
    }
    let mut tables = Vec::with_capacity(assignment.groups.len());
    for group in &assignment.groups {
        let Some(region) = group.table.region().clip(page.width(), page.height()) else {
            diagnostics.push(format!(
                "table instance {} lies outside the page",
                group.index
            ));
            continue;
        };
        let table = match group.table.class {
            DetectionClass::BorderedTable => bordered_structure(page, region, &config.structure),
            _ => {
                let cells: Vec<BBox> = group.cells.iter().map(|c| c.region()).collect();
                borderless_structure(page, region, &cells, &config.structure)
            }
        };
        tables.push(table);
    }
    tables.sort_by_key(|t| {
        (
            t.bbox.y0,
            t.bbox.x0,
            t.bbox.y1,
            t.bbox.x1,
            t.table_type == crate::structure::TableType::Borderless,
        )
    });
    PageStructure {
        format_version: FORMAT_VERSION.to_string(),
        image_id: detections.image_id.clone(),
        tables,
        diagnostics,
    }
}
