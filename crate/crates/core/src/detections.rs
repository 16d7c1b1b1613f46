//! The detection contract: model output and ground truth, as JSON.
//!
//! Detection document:
//!
//! ```json
//! {"format_version":"1","pages":[{"image_id":"p0","width":800,"height":600,
//!   "instances":[{"class":"borderless_table","bbox":[x0,y0,x1,y1],"mask":[[x,y],...],"score":0.97}]}]}
//! ```
//!
//! Ground truth has the same shape without `score`; table instances may carry
//! `"cells":[{"bbox":[...],"row":[r0,r1],"col":[c0,c1]}]`. Parsing validates
//! everything and rejects, never repairs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::geometry::BBox;

pub const FORMAT_VERSION: &str = "1";

/// Allowed slack between a mask's tight box and its instance box.
pub const MASK_SLACK: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectionClass {
    BorderedTable,
    BorderlessTable,
    Cell,
}

impl DetectionClass {
    pub fn is_table(self) -> bool {
        !matches!(self, DetectionClass::Cell)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DetectionInstance {
    pub class: DetectionClass,
    pub bbox: BBox,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mask: Option<Vec<[i32; 2]>>,
    pub score: f64,
}

impl DetectionInstance {
    pub fn new(class: DetectionClass, bbox: BBox, score: f64) -> Self {
        Self {
            class,
            bbox,
            mask: None,
            score,
        }
    }

    /// The region used for geometry: the mask's tight box when a mask is present.
    pub fn region(&self) -> BBox {
        self.mask
            .as_deref()
            .and_then(polygon_bbox)
            .unwrap_or(self.bbox)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PageDetections {
    pub image_id: String,
    pub width: u32,
    pub height: u32,
    pub instances: Vec<DetectionInstance>,
}

impl PageDetections {
    pub fn tables(&self) -> impl Iterator<Item = &DetectionInstance> {
        self.instances.iter().filter(|i| i.class.is_table())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DetectionDocument {
    pub format_version: String,
    pub pages: Vec<PageDetections>,
}

impl DetectionDocument {
    pub fn new(pages: Vec<PageDetections>) -> Self {
        Self {
            format_version: FORMAT_VERSION.to_string(),
            pages,
        }
    }

    pub fn to_json(&self) -> Vec<u8> {
        to_json_bytes(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GtCell {
    pub bbox: BBox,
    pub row: [u32; 2],
    pub col: [u32; 2],
    /// Text boxes inside the cell, when known.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub content: Option<Vec<BBox>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GtTable {
    pub class: DetectionClass,
    pub bbox: BBox,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mask: Option<Vec<[i32; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cells: Option<Vec<GtCell>>,
}

impl GtTable {
    /// Grid shape implied by the cell spans.
    pub fn shape(&self) -> Option<(u32, u32)> {
        let cells = self.cells.as_ref()?;
        let rows = cells.iter().map(|c| c.row[1]).max()?;
        let cols = cells.iter().map(|c| c.col[1]).max()?;
        Some((rows, cols))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroundTruthPage {
    pub image_id: String,
    pub width: u32,
    pub height: u32,
    #[serde(rename = "instances")]
    pub tables: Vec<GtTable>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroundTruthDocument {
    pub format_version: String,
    pub pages: Vec<GroundTruthPage>,
}

impl GroundTruthDocument {
    pub fn new(pages: Vec<GroundTruthPage>) -> Self {
        Self {
            format_version: FORMAT_VERSION.to_string(),
            pages,
        }
    }

    pub fn to_json(&self) -> Vec<u8> {
        to_json_bytes(self)
    }
}

pub(crate) fn to_json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("contract types always serialize");
    out.push(b'\n');
    out
}

// Wire forms: everything stays raw until validation so errors can name the page and instance.

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDetectionDoc {
    format_version: String,
    pages: Vec<RawDetectionPage>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDetectionPage {
    image_id: String,
    width: u32,
    height: u32,
    instances: Vec<RawDetection>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDetection {
    class: DetectionClass,
    bbox: [i32; 4],
    #[serde(default)]
    mask: Option<Vec<[i32; 2]>>,
    score: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGtDoc {
    format_version: String,
    pages: Vec<RawGtPage>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGtPage {
    image_id: String,
    width: u32,
    height: u32,
    instances: Vec<RawGtTable>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGtTable {
    class: DetectionClass,
    bbox: [i32; 4],
    #[serde(default)]
    mask: Option<Vec<[i32; 2]>>,
    #[serde(default)]
    cells: Option<Vec<RawGtCell>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGtCell {
    bbox: [i32; 4],
    row: [u32; 2],
    col: [u32; 2],
    #[serde(default)]
    content: Option<Vec<[i32; 4]>>,
}

/// Converts a serde_json error position (1-based line / column) into a byte offset.
fn byte_offset(input: &[u8], line: usize, column: usize) -> usize {
    let mut offset = 0usize;
    let mut current = 1usize;
    for (i, &b) in input.iter().enumerate() {
        if current == line {
            offset = i;
            break;
        }
        if b == b'\n' {
            current += 1;
            offset = i + 1;
        }
    }
    if current < line {
        return input.len();
    }
    (offset + column.saturating_sub(1)).min(input.len())
}

pub(crate) fn parse_json<T: serde::de::DeserializeOwned>(input: &[u8]) -> Result<T> {
    serde_json::from_slice(input).map_err(|e| Error::Parse {
        offset: byte_offset(input, e.line(), e.column()),
        message: e.to_string(),
    })
}

struct Ctx<'a> {
    image_id: &'a str,
    location: String,
}

impl Ctx<'_> {
    fn fail<T>(&self, rule: impl Into<String>) -> Result<T> {
        Err(Error::Validation {
            image_id: self.image_id.to_string(),
            location: self.location.clone(),
            rule: rule.into(),
        })
    }
}

fn check_version(v: &str) -> Result<()> {
    if v != FORMAT_VERSION {
        return Err(Error::Validation {
            image_id: String::new(),
            location: "document".into(),
            rule: format!("unsupported format_version {v:?}, expected {FORMAT_VERSION:?}"),
        });
    }
    Ok(())
}

fn check_page_header(
    image_id: &str,
    width: u32,
    height: u32,
    seen: &mut std::collections::BTreeSet<String>,
) -> Result<()> {
    let ctx = Ctx {
        image_id,
        location: "page".into(),
    };
    if width == 0 || height == 0 {
        return ctx.fail("page dimensions must be non-zero");
    }
    if width > i32::MAX as u32 || height > i32::MAX as u32 {
        return ctx.fail("page dimensions too large");
    }
    if !seen.insert(image_id.to_string()) {
        return ctx.fail("duplicate image_id");
    }
    Ok(())
}

fn check_box(ctx: &Ctx<'_>, raw: [i32; 4], width: u32, height: u32) -> Result<BBox> {
    let Ok(bbox) = BBox::try_from(raw) else {
        return ctx.fail(format!("bbox {raw:?} is empty (need x1 > x0 and y1 > y0)"));
    };
    if !bbox.within(width, height) {
        return ctx.fail(format!("bbox {bbox} outside page bounds {width}x{height}"));
    }
    Ok(bbox)
}

fn check_mask(ctx: &Ctx<'_>, mask: &[[i32; 2]], bbox: &BBox) -> Result<()> {
    if mask.len() < 3 {
        return ctx.fail("mask needs at least 3 vertices");
    }
    if polygon_area2(mask) == 0 {
        return ctx.fail("mask polygon has zero area");
    }
    if !is_simple_polygon(mask) {
        return ctx.fail("mask polygon self-intersects");
    }
    let tight = polygon_bbox(mask).expect("non-zero area polygon has a box");
    let limit = bbox
        .expand(MASK_SLACK)
        .expect("growing a box keeps it non-empty");
    if !limit.contains_box(&tight) {
        return ctx.fail(format!(
            "mask extent {tight} exceeds bbox {bbox} by more than {MASK_SLACK} px"
        ));
    }
    Ok(())
}

/// Parses and validates a detection document.
pub fn parse_detections(input: &[u8]) -> Result<Vec<PageDetections>> {
    Ok(parse_detection_document(input)?.pages)
}

pub fn parse_detection_document(input: &[u8]) -> Result<DetectionDocument> {
    let raw: RawDetectionDoc = parse_json(input)?;
    check_version(&raw.format_version)?;
    let mut seen = Default::default();
    let mut pages = Vec::with_capacity(raw.pages.len());
    for page in raw.pages {
        check_page_header(&page.image_id, page.width, page.height, &mut seen)?;
        let mut instances = Vec::with_capacity(page.instances.len());
        for (idx, inst) in page.instances.into_iter().enumerate() {
            let ctx = Ctx {
                image_id: &page.image_id,
                location: format!("instance {idx}"),
            };
            if !(0.0..=1.0).contains(&inst.score) {
                return ctx.fail(format!("score out of range: {}", inst.score));
            }
            let bbox = check_box(&ctx, inst.bbox, page.width, page.height)?;
            if let Some(mask) = &inst.mask {
                check_mask(&ctx, mask, &bbox)?;
            }
            instances.push(DetectionInstance {
                class: inst.class,
                bbox,
                mask: inst.mask,
                score: inst.score,
            });
        }
        pages.push(PageDetections {
            image_id: page.image_id,
            width: page.width,
            height: page.height,
            instances,
        });
    }
    Ok(DetectionDocument {
        format_version: raw.format_version,
        pages,
    })
}

/// Parses and validates a ground-truth document.
pub fn parse_ground_truth(input: &[u8]) -> Result<GroundTruthDocument> {
    let raw: RawGtDoc = parse_json(input)?;
    check_version(&raw.format_version)?;
    let mut seen = Default::default();
    let mut pages = Vec::with_capacity(raw.pages.len());
    for page in raw.pages {
        check_page_header(&page.image_id, page.width, page.height, &mut seen)?;
        let mut tables = Vec::with_capacity(page.instances.len());
        for (idx, t) in page.instances.into_iter().enumerate() {
            let ctx = Ctx {
                image_id: &page.image_id,
                location: format!("instance {idx}"),
            };
            if !t.class.is_table() {
                return ctx.fail("ground-truth instances must be tables; cells go under \"cells\"");
            }
            let bbox = check_box(&ctx, t.bbox, page.width, page.height)?;
            if let Some(mask) = &t.mask {
                check_mask(&ctx, mask, &bbox)?;
            }
            let cells = match t.cells {
                None => None,
                Some(raw_cells) => Some(check_cells(
                    &page.image_id,
                    idx,
                    raw_cells,
                    page.width,
                    page.height,
                )?),
            };
            tables.push(GtTable {
                class: t.class,
                bbox,
                mask: t.mask,
                cells,
            });
        }
        pages.push(GroundTruthPage {
            image_id: page.image_id,
            width: page.width,
            height: page.height,
            tables,
        });
    }
    Ok(GroundTruthDocument {
        format_version: raw.format_version,
        pages,
    })
}

fn check_cells(
    image_id: &str,
    table: usize,
    raw: Vec<RawGtCell>,
    width: u32,
    height: u32,
) -> Result<Vec<GtCell>> {
    let mut cells: Vec<GtCell> = Vec::with_capacity(raw.len());
    for (ci, c) in raw.into_iter().enumerate() {
        let ctx = Ctx {
            image_id,
            location: format!("instance {table} cell {ci}"),
        };
        let bbox = check_box(&ctx, c.bbox, width, height)?;
        if c.row[0] >= c.row[1] || c.col[0] >= c.col[1] {
            return ctx.fail("cell span must satisfy r0 < r1 and c0 < c1");
        }
        for other in &cells {
            let rows = c.row[0] < other.row[1] && other.row[0] < c.row[1];
            let cols = c.col[0] < other.col[1] && other.col[0] < c.col[1];
            if rows && cols {
                return ctx.fail("cell span overlaps another cell");
            }
        }
        let content = match c.content {
            None => None,
            Some(boxes) => Some(
                boxes
                    .into_iter()
                    .map(|b| check_box(&ctx, b, width, height))
                    .collect::<Result<_>>()?,
            ),
        };
        cells.push(GtCell {
            bbox,
            row: c.row,
            col: c.col,
            content,
        });
    }
    Ok(cells)
}

/// Keeps instances scoring at least `threshold`, in order.
pub fn filter_by_score(page: &PageDetections, threshold: f64) -> PageDetections {
    PageDetections {
        instances: page
            .instances
            .iter()
            .filter(|i| i.score >= threshold)
            .cloned()
            .collect(),
        ..page.clone()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TableGroup {
    /// Index of the table among the page's instances.
    pub index: usize,
    pub table: DetectionInstance,
    pub cells: Vec<DetectionInstance>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellAssignment {
    /// One group per table instance, in input order. Bordered tables never receive cells.
    pub groups: Vec<TableGroup>,
    pub dropped: usize,
}

/// Assigns each cell to the smallest borderless table containing the cell's center.
pub fn assign_cells(page: &PageDetections) -> CellAssignment {
    let mut groups: Vec<TableGroup> = page
        .instances
        .iter()
        .enumerate()
        .filter(|(_, i)| i.class.is_table())
        .map(|(index, table)| TableGroup {
            index,
            table: table.clone(),
            cells: Vec::new(),
        })
        .collect();
    let mut dropped = 0;
    for cell in page
        .instances
        .iter()
        .filter(|i| i.class == DetectionClass::Cell)
    {
        let region = cell.region();
        let target = groups
            .iter()
            .enumerate()
            .filter(|(_, g)| {
                g.table.class == DetectionClass::BorderlessTable
                    && g.table.bbox.contains_center_of(&region)
            })
            .min_by_key(|(gi, g)| (g.table.bbox.area(), *gi))
            .map(|(gi, _)| gi);
        match target {
            Some(gi) => groups[gi].cells.push(cell.clone()),
            None => dropped += 1,
        }
    }
    CellAssignment { groups, dropped }
}

/// Tight box around polygon vertices, treating vertices as pixel-corner coordinates.
pub fn polygon_bbox(poly: &[[i32; 2]]) -> Option<BBox> {
    let x0 = poly.iter().map(|p| p[0]).min()?;
    let x1 = poly.iter().map(|p| p[0]).max()?;
    let y0 = poly.iter().map(|p| p[1]).min()?;
    let y1 = poly.iter().map(|p| p[1]).max()?;
    BBox::new(x0, y0, x1, y1).ok()
}

/// Twice the absolute shoelace area.
fn polygon_area2(poly: &[[i32; 2]]) -> i64 {
    let n = poly.len();
    let s: i64 = (0..n)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            a[0] as i64 * b[1] as i64 - b[0] as i64 * a[1] as i64
        })
        .sum();
    s.abs()
}

fn is_simple_polygon(poly: &[[i32; 2]]) -> bool {
    let n = poly.len();
    let edge = |i: usize| (poly[i], poly[(i + 1) % n]);
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            let (a, b) = edge(i);
            let (c, d) = edge(j);
            if adjacent {
                // neighbours share one vertex; they may only touch there
                if n > 3 && collinear_overlap(a, b, c, d) {
                    return false;
                }
                continue;
            }
            if segments_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

fn orient(a: [i32; 2], b: [i32; 2], c: [i32; 2]) -> i64 {
    let v = (b[0] as i64 - a[0] as i64) * (c[1] as i64 - a[1] as i64)
        - (b[1] as i64 - a[1] as i64) * (c[0] as i64 - a[0] as i64);
    v.signum()
}

fn on_segment(a: [i32; 2], b: [i32; 2], p: [i32; 2]) -> bool {
    p[0] >= a[0].min(b[0])
        && p[0] <= a[0].max(b[0])
        && p[1] >= a[1].min(b[1])
        && p[1] <= a[1].max(b[1])
}

fn segments_intersect(a: [i32; 2], b: [i32; 2], c: [i32; 2], d: [i32; 2]) -> bool {
    let (o1, o2, o3, o4) = (
        orient(a, b, c),
        orient(a, b, d),
        orient(c, d, a),
        orient(c, d, b),
    );
    if o1 != o2 && o3 != o4 && o1 * o2 <= 0 && o3 * o4 <= 0 {
        return true;
    }
    (o1 == 0 && on_segment(a, b, c))
        || (o2 == 0 && on_segment(a, b, d))
        || (o3 == 0 && on_segment(c, d, a))
        || (o4 == 0 && on_segment(c, d, b))
}

/// Adjacent edges (sharing `b == c`) that fold back over each other.
fn collinear_overlap(a: [i32; 2], b: [i32; 2], c: [i32; 2], d: [i32; 2]) -> bool {
    let (shared, p, q) = if b == c {
        (b, a, d)
    } else if d == a {
        (a, b, c)
    } else {
        return false;
    };
    if orient(p, shared, q) != 0 {
        return false;
    }
    // collinear: overlapping iff p and q lie on the same side of the shared vertex
    let dot = (p[0] as i64 - shared[0] as i64) * (q[0] as i64 - shared[0] as i64)
        + (p[1] as i64 - shared[1] as i64) * (q[1] as i64 - shared[1] as i64);
    dot > 0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(instances: &str) -> String {
        format!(
            r#"{{"format_version":"1","pages":[{{"image_id":"p","width":100,"height":80,"instances":[{instances}]}}]}}"#
        )
    }

    fn inst(class: DetectionClass, b: [i32; 4], score: f64) -> DetectionInstance {
        DetectionInstance::new(class, BBox::try_from(b).unwrap(), score)
    }

    #[test]
    fn empty_page_list() {
        assert!(parse_detections(br#"{"format_version":"1","pages":[]}"#)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn one_valid_instance() {
        let pages = parse_detections(
            doc(r#"{"class":"bordered_table","bbox":[1,2,50,60],"score":0.9}"#).as_bytes(),
        )
        .unwrap();
        assert_eq!(pages.len(), 1);
        assert_eq!(pages[0].instances.len(), 1);
        assert_eq!(pages[0].instances[0].class, DetectionClass::BorderedTable);
    }

    #[test]
    fn score_out_of_range() {
        let err =
            parse_detections(doc(r#"{"class":"cell","bbox":[1,2,5,6],"score":1.2}"#).as_bytes())
                .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("score out of range"), "{msg}");
        assert!(msg.contains("\"p\"") && msg.contains("instance 0"), "{msg}");
    }

    #[test]
    fn bounds_and_empty_boxes() {
        let e =
            parse_detections(doc(r#"{"class":"cell","bbox":[1,2,500,6],"score":0.5}"#).as_bytes())
                .unwrap_err();
        assert!(e.to_string().contains("outside page bounds"));
        let e =
            parse_detections(doc(r#"{"class":"cell","bbox":[5,2,5,6],"score":0.5}"#).as_bytes())
                .unwrap_err();
        assert!(e.to_string().contains("empty"));
    }

    #[test]
    fn malformed_json_reports_offset() {
        let input = b"{\"format_version\":\"1\",\n \"pages\": [,]}";
        match parse_detections(input) {
            Err(Error::Parse { offset, .. }) => assert_eq!(input[offset], b','),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_and_versions_rejected() {
        assert!(parse_detections(br#"{"format_version":"2","pages":[]}"#).is_err());
        assert!(parse_detections(br#"{"format_version":"1","pages":[],"extra":1}"#).is_err());
        assert!(parse_detections(br#"{"pages":[]}"#).is_err());
    }

    #[test]
    fn mask_rules() {
        let ok = r#"{"class":"cell","bbox":[10,10,20,20],"mask":[[10,10],[21,10],[21,20],[10,20]],"score":0.5}"#;
        assert!(parse_detections(doc(ok).as_bytes()).is_ok());
        let far =
            r#"{"class":"cell","bbox":[10,10,20,20],"mask":[[10,10],[25,10],[25,20]],"score":0.5}"#;
        assert!(parse_detections(doc(far).as_bytes())
            .unwrap_err()
            .to_string()
            .contains("exceeds bbox"));
        let bowtie = r#"{"class":"cell","bbox":[10,10,20,20],"mask":[[10,10],[20,20],[20,10],[10,16]],"score":0.5}"#;
        assert!(parse_detections(doc(bowtie).as_bytes())
            .unwrap_err()
            .to_string()
            .contains("self-intersects"));
        let two = r#"{"class":"cell","bbox":[10,10,20,20],"mask":[[10,10],[20,20]],"score":0.5}"#;
        assert!(parse_detections(doc(two).as_bytes()).is_err());
    }

    #[test]
    fn ground_truth_cells_validated() {
        let gt = r#"{"format_version":"1","pages":[{"image_id":"p","width":100,"height":100,"instances":[
            {"class":"borderless_table","bbox":[0,0,100,100],"cells":[
              {"bbox":[0,0,50,50],"row":[0,1],"col":[0,2]},
              {"bbox":[50,0,100,50],"row":[0,1],"col":[1,2]}]}]}]}"#;
        assert!(parse_ground_truth(gt.as_bytes())
            .unwrap_err()
            .to_string()
            .contains("overlaps"));
        let cell_top = r#"{"format_version":"1","pages":[{"image_id":"p","width":10,"height":10,"instances":[
            {"class":"cell","bbox":[0,0,5,5]}]}]}"#;
        assert!(parse_ground_truth(cell_top.as_bytes()).is_err());
    }

    #[test]
    fn filter_examples() {
        let page = PageDetections {
            image_id: "p".into(),
            width: 100,
            height: 100,
            instances: vec![
                inst(DetectionClass::Cell, [0, 0, 5, 5], 0.3),
                inst(DetectionClass::Cell, [0, 0, 5, 5], 0.9),
            ],
        };
        assert_eq!(filter_by_score(&page, 0.0), page);
        assert!(filter_by_score(&page, 1.0).instances.is_empty());
        let kept = filter_by_score(&page, 0.5);
        assert_eq!(kept.instances.len(), 1);
        assert_eq!(kept.instances[0].score, 0.9);
    }

    #[test]
    fn cell_assignment() {
        let cells: Vec<_> = (0..3)
            .map(|i| inst(DetectionClass::Cell, [i * 10, 0, i * 10 + 5, 5], 0.9))
            .collect();
        let page = PageDetections {
            image_id: "p".into(),
            width: 200,
            height: 200,
            instances: cells.clone(),
        };
        let a = assign_cells(&page);
        assert!(a.groups.is_empty());
        assert_eq!(a.dropped, 3);

        let mut instances = vec![
            inst(DetectionClass::BorderlessTable, [0, 0, 100, 100], 0.9),
            inst(DetectionClass::BorderlessTable, [0, 0, 40, 40], 0.9),
            inst(DetectionClass::BorderedTable, [0, 0, 20, 20], 0.9),
        ];
        instances.extend(cells);
        instances.push(inst(DetectionClass::Cell, [60, 60, 70, 70], 0.9));
        instances.push(inst(DetectionClass::Cell, [150, 150, 160, 160], 0.9));
        let a = assign_cells(&PageDetections {
            image_id: "p".into(),
            width: 200,
            height: 200,
            instances,
        });
        assert_eq!(a.groups.len(), 3);
        assert_eq!(a.groups[0].cells.len(), 1);
        assert_eq!(a.groups[1].cells.len(), 3);
        assert!(a.groups[2].cells.is_empty());
        assert_eq!(a.dropped, 1);
    }
}
