//! Synthetic pages with exact ground truth.
//!
//! Tables are drawn black-on-white with solid rectangles standing in for
//! words. Every page is seeded independently with `seed + page_index`, so
//! pages can be generated in parallel and still match a serial run.

pub mod rng;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detections::{
    DetectionClass, DetectionInstance, GroundTruthPage, GtCell, GtTable, PageDetections,
};
use crate::error::{Error, Result};
use crate::raster::geometry::BBox;
use crate::raster::GrayImage;

pub use rng::XorShift64Star;

/// Blank space between a cell's rules and its word blobs.
pub const PADDING: u32 = 5;
/// Borderless ground-truth cell boxes are the slot inset by this much.
pub const CELL_INSET: i32 = 3;
pub const BLOB_HEIGHT: [u32; 2] = [6, 10];
pub const BLOB_WIDTH: [u32; 2] = [8, 30];
pub const BLOB_GAP: [u32; 2] = [4, 6];
pub const PAGE_MARGIN: u32 = 20;
pub const TABLE_GAP: u32 = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthTableType {
    Bordered,
    Borderless,
    SemiBordered,
}

impl SynthTableType {
    pub fn detection_class(self) -> DetectionClass {
        match self {
            SynthTableType::Bordered => DetectionClass::BorderedTable,
            _ => DetectionClass::BorderlessTable,
        }
    }
}

/// Ranges are inclusive `[min, max]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthSpec {
    pub seed: u64,
    pub page_width: u32,
    pub page_height: u32,
    pub tables_per_page: [u32; 2],
    pub rows: [u32; 2],
    pub cols: [u32; 2],
    pub table_types: Vec<SynthTableType>,
    pub span_prob: f64,
    pub empty_prob: f64,
    pub line_thickness: [u32; 2],
    /// Maximum per-coordinate offset applied to the perfect detections.
    pub jitter: u32,
    pub row_height: [u32; 2],
    /// Base column width; each column adds up to a twentieth of it.
    pub col_width: [u32; 2],
    /// Fraction of interior rules removed from semi-bordered tables.
    pub semi_removed: [f64; 2],
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            seed: 0,
            page_width: 1000,
            page_height: 1400,
            tables_per_page: [1, 3],
            rows: [2, 6],
            cols: [2, 5],
            table_types: vec![
                SynthTableType::Bordered,
                SynthTableType::Borderless,
                SynthTableType::SemiBordered,
            ],
            span_prob: 0.15,
            empty_prob: 0.1,
            line_thickness: [1, 3],
            jitter: 0,
            row_height: [30, 40],
            col_width: [64, 110],
            semi_removed: [0.2, 0.6],
        }
    }
}

fn check_range(name: &str, r: [u32; 2], min: u32) -> Result<()> {
    if r[0] < min || r[0] > r[1] {
        return Err(Error::Spec(format!(
            "{name} must satisfy {min} <= min <= max, got {r:?}"
        )));
    }
    Ok(())
}

impl SynthSpec {
    /// Rejects specs that cannot be rendered, before anything is drawn.
    pub fn validate(&self) -> Result<()> {
        if self.page_width == 0 || self.page_height == 0 {
            return Err(Error::Spec("page size must be positive".into()));
        }
        check_range("tables_per_page", self.tables_per_page, 0)?;
        check_range("rows", self.rows, 1)?;
        check_range("cols", self.cols, 1)?;
        check_range("line_thickness", self.line_thickness, 1)?;
        check_range("row_height", self.row_height, 1)?;
        check_range("col_width", self.col_width, 1)?;
        if self.table_types.is_empty() && self.tables_per_page[1] > 0 {
            return Err(Error::Spec("table_types is empty".into()));
        }
        for (name, p) in [
            ("span_prob", self.span_prob),
            ("empty_prob", self.empty_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Spec(format!("{name} must be in [0, 1], got {p}")));
            }
        }
        let [lo, hi] = self.semi_removed;
        if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
            return Err(Error::Spec(format!(
                "semi_removed must satisfy 0 <= min <= max <= 1, got {:?}",
                self.semi_removed
            )));
        }
        let t = self.line_thickness[1];
        let min_h = t + 2 * PADDING + BLOB_HEIGHT[1];
        if self.row_height[0] < min_h {
            return Err(Error::Spec(format!(
                "row_height {} too small for a {}-px blob with {}-px padding and {}-px rules (need {min_h})",
                self.row_height[0], BLOB_HEIGHT[1], PADDING, t
            )));
        }
        let min_w = t + 2 * PADDING + BLOB_WIDTH[0];
        if self.col_width[0] < min_w {
            return Err(Error::Spec(format!(
                "col_width {} too small for a {}-px blob with {}-px padding and {}-px rules (need {min_w})",
                self.col_width[0], BLOB_WIDTH[0], PADDING, t
            )));
        }
        let n = self.tables_per_page[1] as u64;
        let table_h = self.rows[1] as u64 * self.row_height[1] as u64 + t as u64;
        let need_h = 2 * PAGE_MARGIN as u64 + n * table_h + n.saturating_sub(1) * TABLE_GAP as u64;
        if n > 0 && need_h > self.page_height as u64 {
            return Err(Error::Spec(format!(
                "page_height {} cannot hold {n} tables of up to {} rows (need {need_h})",
                self.page_height, self.rows[1]
            )));
        }
        let w = self.col_width[1] as u64;
        let need_w = 2 * PAGE_MARGIN as u64 + self.cols[1] as u64 * (w + w / 20) + t as u64;
        if n > 0 && need_w > self.page_width as u64 {
            return Err(Error::Spec(format!(
                "page_width {} cannot hold {} columns (need {need_w})",
                self.page_width, self.cols[1]
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthDocument {
    pub image: GrayImage,
    pub gt: GroundTruthPage,
    pub perfect_detections: PageDetections,
    /// Generated type of each gt table, in the same order.
    pub table_types: Vec<SynthTableType>,
}

pub fn page_id(index: usize) -> String {
    format!("page_{index:04}")
}

/// Renders `n_pages` pages. Page `i` uses the generator seeded with `seed + i`.
pub fn generate(spec: &SynthSpec, n_pages: usize) -> Result<Vec<SynthDocument>> {
    spec.validate()?;
    Ok((0..n_pages)
        .into_par_iter()
        .map(|i| generate_page(spec, i))
        .collect())
}

pub fn generate_page(spec: &SynthSpec, index: usize) -> SynthDocument {
    let mut rng = XorShift64Star::new(spec.seed.wrapping_add(index as u64));
    let n_tables = rng.range(
        spec.tables_per_page[0] as i64,
        spec.tables_per_page[1] as i64,
    ) as usize;
    let layouts: Vec<Layout> = (0..n_tables)
        .map(|_| Layout::random(spec, &mut rng))
        .collect();

    let mut image =
        GrayImage::blank(spec.page_width, spec.page_height).expect("validated page size");
    let mut gt_tables = Vec::with_capacity(n_tables);
    let mut instances = Vec::new();
    let mut types = Vec::with_capacity(n_tables);

    let used: i64 = layouts.iter().map(|l| l.height() as i64).sum::<i64>()
        + TABLE_GAP as i64 * (n_tables as i64 - 1).max(0);
    let mut slack = spec.page_height as i64 - 2 * PAGE_MARGIN as i64 - used;
    let mut y = PAGE_MARGIN as i64;
    for (k, layout) in layouts.iter().enumerate() {
        let share = rng.range(0, slack / (n_tables - k) as i64);
        slack -= share;
        y += share;
        let free_w = spec.page_width as i64 - 2 * PAGE_MARGIN as i64 - layout.width() as i64;
        let x = PAGE_MARGIN as i64 + rng.range(0, free_w);
        let placed = layout.render(&mut image, &mut rng, x as i32, y as i32);
        let class = layout.kind.detection_class();
        instances.push(DetectionInstance::new(
            class,
            jitter_box(placed.bbox, spec.jitter, &mut rng, &image),
            1.0,
        ));
        if class == DetectionClass::BorderlessTable {
            for c in &placed.cells {
                instances.push(DetectionInstance::new(
                    DetectionClass::Cell,
                    jitter_box(c.bbox, spec.jitter, &mut rng, &image),
                    1.0,
                ));
            }
        }
        gt_tables.push(GtTable {
            class,
            bbox: placed.bbox,
            mask: None,
            cells: Some(placed.cells),
        });
        types.push(layout.kind);
        y += layout.height() as i64 + TABLE_GAP as i64;
    }

    for t in &gt_tables {
        assert_gt_invariants(t);
    }
    let id = page_id(index);
    let (w, h) = (spec.page_width, spec.page_height);
    SynthDocument {
        image,
        gt: GroundTruthPage {
            image_id: id.clone(),
            width: w,
            height: h,
            tables: gt_tables,
        },
        perfect_detections: PageDetections {
            image_id: id,
            width: w,
            height: h,
            instances,
        },
        table_types: types,
    }
}

fn assert_gt_invariants(table: &GtTable) {
    let cells = table.cells.as_deref().unwrap_or(&[]);
    for (i, a) in cells.iter().enumerate() {
        assert!(
            a.row[0] < a.row[1] && a.col[0] < a.col[1],
            "empty span in generated cell"
        );
        assert!(
            table.bbox.contains_box(&a.bbox),
            "generated cell outside its table"
        );
        for b in &cells[..i] {
            let overlap = a.row[0] < b.row[1]
                && b.row[0] < a.row[1]
                && a.col[0] < b.col[1]
                && b.col[0] < a.col[1];
            assert!(!overlap, "generated cells share a grid slot");
        }
    }
}

/// Moves every coordinate by up to `j`, clipped to the page; falls back to
/// the original box if the result would be empty.
fn jitter_box(b: BBox, j: u32, rng: &mut XorShift64Star, page: &GrayImage) -> BBox {
    let j = j as i64;
    let mut d = || rng.range(-j, j) as i32;
    let (x0, y0, x1, y1) = (b.x0 + d(), b.y0 + d(), b.x1 + d(), b.y1 + d());
    BBox::new(
        x0.max(0),
        y0.max(0),
        x1.min(page.width() as i32),
        y1.min(page.height() as i32),
    )
    .unwrap_or(b)
}

#[derive(Clone, Copy, Debug)]
struct SpanCell {
    row: [u32; 2],
    col: [u32; 2],
    empty: bool,
}

struct Layout {
    kind: SynthTableType,
    thickness: u32,
    /// Boundary offsets; rule `i` covers `xs[i]..xs[i] + thickness`.
    xs: Vec<u32>,
    ys: Vec<u32>,
    cells: Vec<SpanCell>,
    removed_rows: Vec<bool>,
    removed_cols: Vec<bool>,
}

struct Placed {
    bbox: BBox,
    cells: Vec<GtCell>,
}

impl Layout {
    fn random(spec: &SynthSpec, rng: &mut XorShift64Star) -> Layout {
        let kind = spec.table_types[rng.below(spec.table_types.len() as u64) as usize];
        let n_rows = rng.range(spec.rows[0] as i64, spec.rows[1] as i64) as u32;
        let n_cols = rng.range(spec.cols[0] as i64, spec.cols[1] as i64) as u32;
        let thickness = match kind {
            SynthTableType::Borderless => 0,
            _ => rng.range(spec.line_thickness[0] as i64, spec.line_thickness[1] as i64) as u32,
        };
        let h = rng.range(spec.row_height[0] as i64, spec.row_height[1] as i64) as u32;
        let w = rng.range(spec.col_width[0] as i64, spec.col_width[1] as i64) as u32;
        let ys: Vec<u32> = (0..=n_rows).map(|r| r * h).collect();
        let mut xs = vec![0u32];
        for _ in 0..n_cols {
            let cw = w + rng.range(0, (w / 20) as i64) as u32;
            xs.push(xs.last().unwrap() + cw);
        }

        let spans = kind != SynthTableType::Bordered;
        let mut cells = random_cells(
            n_rows,
            n_cols,
            if spans { spec.span_prob } else { 0.0 },
            spec.empty_prob,
            rng,
        );
        if spans {
            ensure_band_seeds(&mut cells, n_rows, n_cols);
        }

        let mut removed_rows = vec![false; n_rows as usize + 1];
        let mut removed_cols = vec![false; n_cols as usize + 1];
        if kind == SynthTableType::SemiBordered {
            let mut interior: Vec<(bool, usize)> = (1..n_rows as usize)
                .map(|i| (true, i))
                .chain((1..n_cols as usize).map(|i| (false, i)))
                .collect();
            if !interior.is_empty() {
                let frac = spec.semi_removed[0]
                    + rng.unit() * (spec.semi_removed[1] - spec.semi_removed[0]);
                let k = ((frac * interior.len() as f64).round() as usize).clamp(1, interior.len());
                rng.shuffle(&mut interior);
                for &(is_row, i) in &interior[..k] {
                    if is_row {
                        removed_rows[i] = true;
                    } else {
                        removed_cols[i] = true;
                    }
                }
            }
        }
        Layout {
            kind,
            thickness,
            xs,
            ys,
            cells,
            removed_rows,
            removed_cols,
        }
    }

    fn width(&self) -> u32 {
        self.xs.last().unwrap() + self.thickness
    }

    fn height(&self) -> u32 {
        self.ys.last().unwrap() + self.thickness
    }

    fn render(&self, page: &mut GrayImage, rng: &mut XorShift64Star, x: i32, y: i32) -> Placed {
        let t = self.thickness as i32;
        let bbox = BBox::from_xywh(x, y, self.width() as i32, self.height() as i32)
            .expect("non-empty table");
        let mut gt = Vec::with_capacity(self.cells.len());
        for cell in &self.cells {
            let left = x + self.xs[cell.col[0] as usize] as i32;
            let right = x + self.xs[cell.col[1] as usize] as i32;
            let top = y + self.ys[cell.row[0] as usize] as i32;
            let bottom = y + self.ys[cell.row[1] as usize] as i32;
            if t > 0 {
                let rules = [
                    (
                        !self.removed_rows[cell.row[0] as usize],
                        BBox::new(left, top, right + t, top + t),
                    ),
                    (
                        !self.removed_rows[cell.row[1] as usize],
                        BBox::new(left, bottom, right + t, bottom + t),
                    ),
                    (
                        !self.removed_cols[cell.col[0] as usize],
                        BBox::new(left, top, left + t, bottom + t),
                    ),
                    (
                        !self.removed_cols[cell.col[1] as usize],
                        BBox::new(right, top, right + t, bottom + t),
                    ),
                ];
                for (draw, r) in rules {
                    if draw {
                        page.fill_rect(r.expect("rule is non-empty"), 0);
                    }
                }
            }
            let interior =
                BBox::new(left + t, top + t, right, bottom).expect("cell interior is non-empty");
            let content = if cell.empty {
                Vec::new()
            } else {
                draw_blobs(page, rng, interior)
            };
            let keep = self.kind == SynthTableType::Bordered || !cell.empty;
            if keep {
                let cell_box = match self.kind {
                    SynthTableType::Bordered => interior,
                    _ => interior
                        .expand(-CELL_INSET)
                        .expect("inset cell is non-empty"),
                };
                gt.push(GtCell {
                    bbox: cell_box,
                    row: cell.row,
                    col: cell.col,
                    content: Some(content),
                });
            }
        }
        Placed { bbox, cells: gt }
    }
}

/// Lays out cells in raster order; a span (two rows or two columns) starts
/// at a free slot with probability `span_prob` when its neighbour is free.
fn random_cells(
    n_rows: u32,
    n_cols: u32,
    span_prob: f64,
    empty_prob: f64,
    rng: &mut XorShift64Star,
) -> Vec<SpanCell> {
    let mut taken = vec![false; (n_rows * n_cols) as usize];
    let idx = |r: u32, c: u32| (r * n_cols + c) as usize;
    let mut cells = Vec::new();
    for r in 0..n_rows {
        for c in 0..n_cols {
            if taken[idx(r, c)] {
                continue;
            }
            let mut row = [r, r + 1];
            let mut col = [c, c + 1];
            if rng.chance(span_prob) {
                let right = c + 1 < n_cols && !taken[idx(r, c + 1)];
                let down = r + 1 < n_rows;
                match (right, down) {
                    (true, true) => {
                        if rng.below(2) == 0 {
                            col[1] += 1
                        } else {
                            row[1] += 1
                        }
                    }
                    (true, false) => col[1] += 1,
                    (false, true) => row[1] += 1,
                    (false, false) => {}
                }
            }
            for rr in row[0]..row[1] {
                for cc in col[0]..col[1] {
                    taken[idx(rr, cc)] = true;
                }
            }
            let empty = rng.chance(empty_prob);
            cells.push(SpanCell { row, col, empty });
        }
    }
    cells
}

/// Makes every row hold a non-empty single-row cell and every column a
/// non-empty single-column cell, splitting spans where needed.
fn ensure_band_seeds(cells: &mut Vec<SpanCell>, n_rows: u32, n_cols: u32) {
    for r in 0..n_rows {
        let covers = |c: &SpanCell| c.row[0] <= r && r < c.row[1];
        if !cells.iter().any(|c| covers(c) && c.row[1] - c.row[0] == 1) {
            split_where(cells, |c| covers(c) && c.row[1] - c.row[0] > 1);
        }
        if !cells_has_nonempty(cells, |c| c.row == [r, r + 1]) {
            if let Some(c) = cells
                .iter_mut()
                .filter(|c| c.row == [r, r + 1])
                .min_by_key(|c| c.col[0])
            {
                c.empty = false;
            }
        }
    }
    for col in 0..n_cols {
        let covers = |c: &SpanCell| c.col[0] <= col && col < c.col[1];
        if !cells.iter().any(|c| covers(c) && c.col[1] - c.col[0] == 1) {
            split_where(cells, |c| covers(c) && c.col[1] - c.col[0] > 1);
        }
        if !cells_has_nonempty(cells, |c| c.col == [col, col + 1]) {
            if let Some(c) = cells
                .iter_mut()
                .filter(|c| c.col == [col, col + 1])
                .min_by_key(|c| c.row[0])
            {
                c.empty = false;
            }
        }
    }
    // Spans stay a strict minority of the non-empty cells on each axis, so
    // the median cell extent is a single-slot extent.
    for along_cols in [true, false] {
        let len = |c: &SpanCell| {
            if along_cols {
                c.col[1] - c.col[0]
            } else {
                c.row[1] - c.row[0]
            }
        };
        loop {
            let spans = cells.iter().filter(|c| !c.empty && len(c) > 1).count();
            let singles = cells.iter().filter(|c| !c.empty && len(c) == 1).count();
            if spans < singles {
                break;
            }
            let last = cells
                .iter()
                .rposition(|c| !c.empty && len(c) > 1)
                .expect("spans > 0");
            let c = cells.remove(last);
            cells.extend(unit_cells(&c));
        }
    }
    cells.sort_by_key(|c| (c.row[0], c.col[0]));
}

fn unit_cells(c: &SpanCell) -> Vec<SpanCell> {
    let mut out = Vec::new();
    for r in c.row[0]..c.row[1] {
        for k in c.col[0]..c.col[1] {
            out.push(SpanCell {
                row: [r, r + 1],
                col: [k, k + 1],
                empty: c.empty,
            });
        }
    }
    out
}

fn cells_has_nonempty(cells: &[SpanCell], pred: impl Fn(&SpanCell) -> bool) -> bool {
    cells.iter().any(|c| pred(c) && !c.empty)
}

fn split_where(cells: &mut Vec<SpanCell>, pred: impl Fn(&SpanCell) -> bool) {
    let mut out = Vec::with_capacity(cells.len());
    for c in cells.drain(..) {
        if pred(&c) {
            out.extend(unit_cells(&c));
        } else {
            out.push(c);
        }
    }
    *cells = out;
}

/// Draws 1 to 3 blobs on one text line inside `interior` (already excluding
/// rules) with [`PADDING`] on every side. Returns their boxes.
fn draw_blobs(page: &mut GrayImage, rng: &mut XorShift64Star, interior: BBox) -> Vec<BBox> {
    let p = PADDING as i32;
    let area = BBox::new(
        interior.x0 + p,
        interior.y0 + p,
        interior.x1 - p,
        interior.y1 - p,
    )
    .expect("padded interior");
    let n = rng.range(1, 3) as usize;
    let h = rng.range(BLOB_HEIGHT[0] as i64, BLOB_HEIGHT[1] as i64) as i32;
    let (aw, ah) = (area.width() as i32, area.height() as i32);
    let mut widths: Vec<i32> = (0..n)
        .map(|_| rng.range(BLOB_WIDTH[0] as i64, BLOB_WIDTH[1] as i64) as i32)
        .collect();
    let gaps: Vec<i32> = (0..n)
        .map(|_| rng.range(BLOB_GAP[0] as i64, BLOB_GAP[1] as i64) as i32)
        .collect();
    let total = |w: &[i32]| w.iter().sum::<i32>() + gaps[..w.len() - 1].iter().sum::<i32>();
    while widths.len() > 1 && total(&widths) > aw {
        widths.pop();
    }
    widths[0] = widths[0].min(aw);
    let mut x = area.x0 + rng.range(0, (aw - total(&widths)) as i64) as i32;
    let y = area.y0 + rng.range(0, (ah - h) as i64) as i32;
    let mut boxes = Vec::with_capacity(widths.len());
    for (i, &w) in widths.iter().enumerate() {
        let b = BBox::from_xywh(x, y, w, h).expect("blob is non-empty");
        page.fill_rect(b, 0);
        boxes.push(b);
        x += w + gaps[i];
    }
    boxes
}

/// Drops `floor(n * drop_frac)` of the `n` cell instances, chosen by `seed`,
/// and moves every remaining coordinate by up to `jitter`. Tables are kept.
pub fn corrupt_detections(
    doc: &SynthDocument,
    drop_frac: f64,
    jitter: u32,
    seed: u64,
) -> PageDetections {
    assert!(
        (0.0..1.0).contains(&drop_frac),
        "drop_frac must be in [0, 1), got {drop_frac}"
    );
    let mut rng = XorShift64Star::new(seed);
    let dets = &doc.perfect_detections;
    let mut cell_idx: Vec<usize> = (0..dets.instances.len())
        .filter(|&i| !dets.instances[i].class.is_table())
        .collect();
    let n_drop = (cell_idx.len() as f64 * drop_frac).floor() as usize;
    rng.shuffle(&mut cell_idx);
    let mut dropped = vec![false; dets.instances.len()];
    for &i in &cell_idx[..n_drop] {
        dropped[i] = true;
    }
    let instances = dets
        .instances
        .iter()
        .zip(&dropped)
        .filter(|(_, &d)| !d)
        .map(|(inst, _)| {
            let mut inst = inst.clone();
            inst.bbox = jitter_box(inst.bbox, jitter, &mut rng, &doc.image);
            inst
        })
        .collect();
    PageDetections {
        instances,
        ..dets.clone()
    }
}
