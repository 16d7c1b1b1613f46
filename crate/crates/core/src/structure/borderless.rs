//! Borderless tables: predicted cells → row/column bands → separators → spans.

use serde::{Deserialize, Serialize};

use super::{
    BorderlessParams, CellSource, StructureCell, StructureParams, TableStructure, TableType,
};
use crate::raster::geometry::{Axis, BBox};
use crate::raster::image::BinaryImage;
use crate::raster::text::{suppress_ruling_lines, text_regions_in, TextParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Band {
    pub axis: Axis,
    pub start: i32,
    pub end: i32,
    pub index: u32,
}

/// Groups cell intervals along `axis` into disjoint bands using the default span factor.
pub fn cluster_bands(cells: &[BBox], axis: Axis, overlap_frac: f64) -> Vec<Band> {
    cluster_bands_with(
        cells,
        axis,
        overlap_frac,
        BorderlessParams::default().span_factor,
    )
}

/// Band clustering.
///
/// Cells whose extent exceeds `span_factor` times the median extent are span
/// candidates and do not seed bands. The rest are visited by interval center;
/// a cell joins the current band when its overlap with the band is at least
/// `overlap_frac` of the shorter of the two, otherwise it opens a new band.
pub fn cluster_bands_with(
    cells: &[BBox],
    axis: Axis,
    overlap_frac: f64,
    span_factor: f64,
) -> Vec<Band> {
    if cells.is_empty() {
        return Vec::new();
    }
    let median = median_extent(cells, axis);
    let mut seeds: Vec<&BBox> = cells
        .iter()
        .filter(|c| {
            let (a, b) = c.interval(axis);
            ((b - a) as f64) <= span_factor * median
        })
        .collect();
    // center, then reading order
    seeds.sort_by_key(|c| {
        let (a, b) = c.interval(axis);
        (a as i64 + b as i64, c.y0, c.x0, c.y1, c.x1)
    });

    let mut intervals: Vec<(i32, i32)> = Vec::new();
    for c in seeds {
        let (a, b) = c.interval(axis);
        if let Some(cur) = intervals.last_mut() {
            let overlap = (b.min(cur.1) - a.max(cur.0)).max(0) as f64;
            let shorter = (b - a).min(cur.1 - cur.0) as f64;
            if overlap >= overlap_frac * shorter {
                *cur = (cur.0.min(a), cur.1.max(b));
                continue;
            }
        }
        intervals.push((a, b));
    }

    // unions can grow into their neighbours
    disjoint_bands(intervals, axis)
}

/// Merges overlapping intervals and numbers the result from the top/left.
fn disjoint_bands(mut intervals: Vec<(i32, i32)>, axis: Axis) -> Vec<Band> {
    intervals.sort_unstable();
    let mut disjoint: Vec<(i32, i32)> = Vec::with_capacity(intervals.len());
    for iv in intervals {
        match disjoint.last_mut() {
            Some(last) if iv.0 < last.1 => last.1 = last.1.max(iv.1),
            _ => disjoint.push(iv),
        }
    }
    disjoint
        .into_iter()
        .enumerate()
        .map(|(i, (start, end))| Band {
            axis,
            start,
            end,
            index: i as u32,
        })
        .collect()
}

fn median_extent(cells: &[BBox], axis: Axis) -> f64 {
    let mut ext: Vec<i32> = cells
        .iter()
        .map(|c| {
            let (a, b) = c.interval(axis);
            b - a
        })
        .collect();
    ext.sort_unstable();
    ext[(ext.len() - 1) / 2] as f64
}

/// Table edges plus the midpoint of every gap between consecutive bands.
pub fn estimate_separators(bands: &[Band], table: BBox) -> Vec<i32> {
    let (lo, hi) = match bands.first() {
        Some(b) => table.interval(b.axis),
        None => return Vec::new(),
    };
    let mut seps = vec![lo];
    for pair in bands.windows(2) {
        let mid = (pair[0].end as i64 + pair[1].start as i64).div_euclid(2) as i32;
        if mid > *seps.last().expect("starts with the table edge") && mid < hi {
            seps.push(mid);
        }
    }
    seps.push(hi);
    seps
}

fn separators_for(bands: &[Band], table: BBox, axis: Axis) -> Vec<i32> {
    if bands.is_empty() {
        let (lo, hi) = table.interval(axis);
        vec![lo, hi]
    } else {
        estimate_separators(bands, table)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum SpanIssue {
    None,
    Clamped,
    Degenerate,
}

/// Half-open slot range `[i0, i1)` crossed by the interval `(a, b)`.
fn span_along(seps: &[i32], (a, b): (i32, i32), margin: i32) -> ([u32; 2], SpanIssue) {
    let n = seps.len() - 1;
    let mut issue = SpanIssue::None;
    let mut i0 = match seps.iter().rposition(|&s| s <= a + margin) {
        Some(i) => i,
        None => {
            issue = SpanIssue::Clamped;
            0
        }
    };
    let mut i1 = match seps.iter().position(|&s| s >= b - margin) {
        Some(i) => i,
        None => {
            issue = SpanIssue::Clamped;
            n
        }
    };
    if i0 >= n {
        i0 = n - 1;
        issue = SpanIssue::Clamped;
    }
    if i1 == 0 {
        i1 = 1;
        issue = SpanIssue::Clamped;
    }
    if i1 <= i0 {
        // tiny box hugging a separator: fall back to the slot holding its center
        let c = slot_of(seps, ((a as i64 + b as i64).div_euclid(2)) as i32);
        return ([c as u32, c as u32 + 1], SpanIssue::Degenerate);
    }
    ([i0 as u32, i1 as u32], issue)
}

/// Index of the slot containing `v`, clamped to the grid.
fn slot_of(seps: &[i32], v: i32) -> usize {
    let n = seps.len() - 1;
    seps[1..]
        .iter()
        .position(|&s| v < s)
        .unwrap_or(n - 1)
        .min(n - 1)
}

/// Raw span rectangle of a box, before overlap resolution.
fn span_of(
    bbox: &BBox,
    row_seps: &[i32],
    col_seps: &[i32],
    margin: u32,
) -> ([u32; 2], [u32; 2], SpanIssue, SpanIssue) {
    let (row, ri) = span_along(row_seps, bbox.interval(Axis::Row), margin as i32);
    let (col, ci) = span_along(col_seps, bbox.interval(Axis::Column), margin as i32);
    (row, col, ri, ci)
}

/// Adds bands for text that no model cell claims and that lies clear of every
/// existing band by more than `margin`, so a row or column whose cells were all
/// missed (or only covered by spanning cells) still gets its own band. Each gap
/// between existing bands receives at most one band, the hull of its text,
/// widened to the edge of any model cell that overlaps it and ends in the gap.
pub fn add_orphan_bands(
    bands: Vec<Band>,
    orphans: &[BBox],
    model_cells: &[BBox],
    axis: Axis,
    params: &BorderlessParams,
) -> Vec<Band> {
    let m = params.margin as i32;
    let mut gaps: Vec<Option<(i32, i32)>> = vec![None; bands.len() + 1];
    for t in orphans {
        let (a, b) = t.interval(axis);
        if !bands
            .iter()
            .all(|band| b + m <= band.start || a >= band.end + m)
        {
            continue;
        }
        let slot = bands.iter().take_while(|band| band.end <= a).count();
        let hull = gaps[slot].get_or_insert((a, b));
        *hull = (hull.0.min(a), hull.1.max(b));
    }
    if gaps.iter().all(Option::is_none) {
        return bands;
    }
    for (slot, gap) in gaps.iter_mut().enumerate() {
        let Some((a, b)) = *gap else { continue };
        let lo = slot.checked_sub(1).map_or(i32::MIN, |i| bands[i].end + m);
        let hi = bands.get(slot).map_or(i32::MAX, |band| band.start - m);
        let (mut ga, mut gb) = (a, b);
        for c in model_cells {
            let (ca, cb) = c.interval(axis);
            if ca >= b || cb <= a {
                continue;
            }
            if ca < a && ca >= lo {
                ga = ga.min(ca);
            }
            if cb > b && cb <= hi {
                gb = gb.max(cb);
            }
        }
        *gap = Some((ga, gb));
    }
    disjoint_bands(
        bands
            .iter()
            .map(|b| (b.start, b.end))
            .chain(gaps.into_iter().flatten())
            .collect(),
        axis,
    )
}

/// Finds text in grid slots that no model cell covers.
pub fn recover_missing_cells(
    page: &BinaryImage,
    table: BBox,
    row_seps: &[i32],
    col_seps: &[i32],
    model_cells: &[BBox],
    params: &StructureParams,
) -> Vec<BBox> {
    let ink = table_ink(page, table, &params.borderless);
    recover_in(&ink, row_seps, col_seps, model_cells, params)
}

/// Page-sized image holding only the table's ink, with ruling lines removed.
struct TableInk {
    img: BinaryImage,
    origin: (i32, i32),
}

fn table_ink(page: &BinaryImage, table: BBox, params: &BorderlessParams) -> Option<TableInk> {
    let region = table.clip(page.width(), page.height())?;
    let crop = page.crop(region).expect("clipped to the page");
    let img = suppress_ruling_lines(&crop, params.rule_min_len, params.rule_max_thickness);
    Some(TableInk {
        img,
        origin: (region.x0, region.y0),
    })
}

impl TableInk {
    fn text_in(&self, region: BBox, params: &TextParams) -> Vec<BBox> {
        let local = region.translate(-self.origin.0, -self.origin.1);
        text_regions_in(&self.img, local, params)
            .into_iter()
            .map(|b| b.translate(self.origin.0, self.origin.1))
            .collect()
    }
}

fn recover_in(
    ink: &Option<TableInk>,
    row_seps: &[i32],
    col_seps: &[i32],
    model_cells: &[BBox],
    params: &StructureParams,
) -> Vec<BBox> {
    let Some(ink) = ink else { return Vec::new() };
    let (n_rows, n_cols) = (row_seps.len() - 1, col_seps.len() - 1);
    let mut covered = vec![false; n_rows * n_cols];
    for cell in model_cells {
        let (row, col, _, _) = span_of(cell, row_seps, col_seps, params.borderless.margin);
        for r in row[0]..row[1] {
            for c in col[0]..col[1] {
                covered[r as usize * n_cols + c as usize] = true;
            }
        }
    }
    let mut recovered = Vec::new();
    for r in 0..n_rows {
        for c in 0..n_cols {
            if covered[r * n_cols + c] {
                continue;
            }
            let Ok(slot) = BBox::new(col_seps[c], row_seps[r], col_seps[c + 1], row_seps[r + 1])
            else {
                continue;
            };
            let found = ink.text_in(slot, &params.text);
            if let Some(first) = found.first() {
                recovered.push(found[1..].iter().fold(*first, |acc, b| acc.hull(b)));
            }
        }
    }
    recovered
}

/// Outcome of span assignment.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SpanAssignment {
    /// Non-overlapping cells, sorted by (row, col) start.
    pub cells: Vec<StructureCell>,
    pub diagnostics: Vec<String>,
}

/// Assigns row/column spans and resolves conflicts.
///
/// A cell covers the slots from the last separator at or before its start
/// (plus `margin`) to the first separator at or after its end (minus
/// `margin`). When two cells claim a slot, model cells beat recovered ones and
/// larger cells beat smaller; the loser is shrunk to the slot holding its
/// center, and dropped if that slot is taken too.
pub fn assign_spans(
    cells: &[(BBox, CellSource)],
    row_seps: &[i32],
    col_seps: &[i32],
    margin: u32,
) -> SpanAssignment {
    let (n_rows, n_cols) = (row_seps.len() - 1, col_seps.len() - 1);
    let mut order: Vec<usize> = (0..cells.len()).collect();
    order.sort_by_key(|&i| {
        let (b, src) = &cells[i];
        (*src, std::cmp::Reverse(b.area()), b.y0, b.x0, b.y1, b.x1, i)
    });

    let mut taken = vec![false; n_rows * n_cols];
    let free = |taken: &[bool], row: [u32; 2], col: [u32; 2]| {
        (row[0]..row[1]).all(|r| (col[0]..col[1]).all(|c| !taken[r as usize * n_cols + c as usize]))
    };
    let mut out = SpanAssignment::default();
    for i in order {
        let (bbox, source) = cells[i];
        let (mut row, mut col, ri, ci) = span_of(&bbox, row_seps, col_seps, margin);
        for (issue, axis) in [(ri, "row"), (ci, "column")] {
            match issue {
                SpanIssue::None => {}
                SpanIssue::Clamped => out.diagnostics.push(format!(
                    "cell {bbox} lies outside the {axis} separators; clamped"
                )),
                SpanIssue::Degenerate => out.diagnostics.push(format!(
                    "cell {bbox} is thinner than the {axis} margin; using its center slot"
                )),
            }
        }
        if !free(&taken, row, col) {
            let (cx, cy) = bbox.center_pixel();
            let (r, c) = (slot_of(row_seps, cy) as u32, slot_of(col_seps, cx) as u32);
            if !free(&taken, [r, r + 1], [c, c + 1]) {
                out.diagnostics.push(format!(
                    "cell {bbox} dropped: its center slot ({r}, {c}) is already taken"
                ));
                continue;
            }
            out.diagnostics.push(format!(
                "cell {bbox} shrunk to slot ({r}, {c}) after an overlap"
            ));
            row = [r, r + 1];
            col = [c, c + 1];
        }
        for r in row[0]..row[1] {
            for c in col[0]..col[1] {
                taken[r as usize * n_cols + c as usize] = true;
            }
        }
        out.cells.push(StructureCell {
            row,
            col,
            bbox,
            content: Vec::new(),
            source,
        });
    }
    out.cells.sort_by_key(|c| (c.row[0], c.col[0]));
    out
}

/// Full borderless branch: bands → separators → recovery → spans.
pub fn borderless_structure(
    page: &BinaryImage,
    table: BBox,
    model_cells: &[BBox],
    params: &StructureParams,
) -> TableStructure {
    let bp = &params.borderless;
    let ink = table_ink(page, table, bp);
    let mut rows = cluster_bands_with(model_cells, Axis::Row, bp.overlap_frac, bp.span_factor);
    let mut cols = cluster_bands_with(model_cells, Axis::Column, bp.overlap_frac, bp.span_factor);
    if let (Some(ink), false) = (&ink, model_cells.is_empty()) {
        let orphans: Vec<BBox> = ink
            .text_in(table, &params.text)
            .into_iter()
            .filter(|t| !model_cells.iter().any(|c| c.contains_center_of(t)))
            .collect();
        rows = add_orphan_bands(rows, &orphans, model_cells, Axis::Row, bp);
        cols = add_orphan_bands(cols, &orphans, model_cells, Axis::Column, bp);
    }
    let row_seps = separators_for(&rows, table, Axis::Row);
    let col_seps = separators_for(&cols, table, Axis::Column);

    let recovered = recover_in(&ink, &row_seps, &col_seps, model_cells, params);

    let mut all: Vec<(BBox, CellSource)> = model_cells
        .iter()
        .map(|&b| (b, CellSource::Model))
        .collect();
    all.extend(recovered.iter().map(|&b| (b, CellSource::Recovered)));
    let mut assigned = assign_spans(&all, &row_seps, &col_seps, bp.margin);

    if let Some(ink) = &ink {
        for cell in &mut assigned.cells {
            cell.content = match cell.bbox.intersect(&table) {
                Some(region) => ink.text_in(region, &params.text),
                None => Vec::new(),
            };
        }
    }
    if assigned.cells.is_empty() {
        assigned
            .diagnostics
            .push("no model cells and no text found; reporting a single empty cell grid".into());
    }
    let structure = TableStructure {
        bbox: table,
        table_type: TableType::Borderless,
        n_rows: (row_seps.len() - 1) as u32,
        n_cols: (col_seps.len() - 1) as u32,
        cells: assigned.cells,
        diagnostics: assigned.diagnostics,
    };
    debug_assert!(structure.validate().is_ok());
    structure
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x0: i32, y0: i32, x1: i32, y1: i32) -> BBox {
        BBox::new(x0, y0, x1, y1).unwrap()
    }

    fn rows(ivs: &[(i32, i32)]) -> Vec<BBox> {
        ivs.iter().map(|&(a, z)| b(0, a, 10, z)).collect()
    }

    fn spans(bands: &[Band]) -> Vec<(i32, i32)> {
        bands.iter().map(|b| (b.start, b.end)).collect()
    }

    #[test]
    fn orphan_text_fills_one_band_per_gap() {
        let p = BorderlessParams::default();
        let bands = cluster_bands(&rows(&[(0, 10), (60, 70)]), Axis::Row, 0.5);
        // two unrelated text lines in the same gap, one touching a band
        let orphans = rows(&[(30, 36), (40, 46), (11, 15)]);
        let out = add_orphan_bands(bands.clone(), &orphans, &[], Axis::Row, &p);
        assert_eq!(spans(&out), vec![(0, 10), (30, 46), (60, 70)]);
        assert_eq!(out.iter().map(|b| b.index).collect::<Vec<_>>(), [0, 1, 2]);
        assert_eq!(
            add_orphan_bands(bands.clone(), &[], &[], Axis::Row, &p),
            bands
        );
    }

    #[test]
    fn orphan_band_widens_to_spanning_cell_edges() {
        let p = BorderlessParams::default();
        let bands = cluster_bands(&rows(&[(0, 10), (60, 70)]), Axis::Row, 0.5);
        let orphans = rows(&[(30, 36)]);
        let span = rows(&[(0, 50)]);
        let out = add_orphan_bands(bands, &orphans, &span, Axis::Row, &p);
        assert_eq!(spans(&out), vec![(0, 10), (30, 50), (60, 70)]);
    }

    #[test]
    fn band_examples() {
        assert!(cluster_bands(&[], Axis::Row, 0.5).is_empty());
        let one = cluster_bands(&rows(&[(3, 9)]), Axis::Row, 0.5);
        assert_eq!((one[0].start, one[0].end), (3, 9));
        assert_eq!(
            cluster_bands(&rows(&[(0, 10), (0, 10)]), Axis::Row, 0.5).len(),
            1
        );
        let three = cluster_bands(&rows(&[(0, 10), (2, 12), (30, 40)]), Axis::Row, 0.5);
        assert_eq!(
            three
                .iter()
                .map(|b| (b.start, b.end, b.index))
                .collect::<Vec<_>>(),
            vec![(0, 12, 0), (30, 40, 1)]
        );
    }

    #[test]
    fn long_cells_do_not_seed_bands() {
        let mut cells = rows(&[(0, 10), (20, 30), (40, 50)]);
        cells.push(b(0, 0, 10, 30));
        let bands = cluster_bands(&cells, Axis::Row, 0.5);
        assert_eq!(bands.len(), 3);
    }

    #[test]
    fn separator_examples() {
        let t = b(0, 0, 100, 60);
        let band = |s, e, i| Band {
            axis: Axis::Row,
            start: s,
            end: e,
            index: i,
        };
        assert_eq!(estimate_separators(&[band(10, 20, 0)], t), vec![0, 60]);
        assert_eq!(
            estimate_separators(&[band(10, 20, 0), band(30, 44, 1)], t),
            vec![0, 25, 60]
        );
        let even = estimate_separators(&[band(5, 15, 0), band(25, 35, 1), band(45, 55, 2)], t);
        assert_eq!(even, vec![0, 20, 40, 60]);
        let flipped: Vec<i32> = even.iter().rev().map(|s| 60 - s).collect();
        assert_eq!(flipped, even);
    }

    #[test]
    fn span_examples() {
        let rs = [0, 20, 40, 60];
        let cs = [0, 30, 60, 90];
        let a = assign_spans(&[(b(33, 23, 57, 37), CellSource::Model)], &rs, &cs, 2);
        assert_eq!((a.cells[0].row, a.cells[0].col), ([1, 2], [1, 2]));
        let wide = assign_spans(&[(b(3, 3, 86, 17), CellSource::Model)], &rs, &cs, 2);
        assert_eq!(wide.cells[0].col, [0, 3]);
        // slight overhang within the margin does not create a span
        let over = assign_spans(&[(b(3, 3, 31, 17), CellSource::Model)], &rs, &cs, 2);
        assert_eq!(over.cells[0].col, [0, 1]);
    }

    #[test]
    fn overlap_priority() {
        let rs = [0, 20, 40];
        let cs = [0, 30, 60];
        let cells = [
            (b(2, 2, 28, 18), CellSource::Model),
            (b(5, 5, 25, 15), CellSource::Model),
            (b(4, 4, 26, 16), CellSource::Recovered),
        ];
        let a = assign_spans(&cells, &rs, &cs, 2);
        assert_eq!(a.cells.len(), 1);
        assert_eq!(a.cells[0].bbox, b(2, 2, 28, 18));
        assert_eq!(a.diagnostics.len(), 2);

        // a wide loser is shrunk to its center slot
        let cells = [
            (b(32, 2, 58, 18), CellSource::Model),
            (b(2, 2, 50, 18), CellSource::Recovered),
        ];
        let a = assign_spans(&cells, &rs, &cs, 2);
        assert_eq!(a.cells.len(), 2);
        assert_eq!((a.cells[0].row, a.cells[0].col), ([0, 1], [0, 1]));
        assert_eq!(a.cells[0].source, CellSource::Recovered);
    }

    #[test]
    fn degenerate_cells_are_clamped() {
        let rs = [10, 20, 40];
        let cs = [0, 30];
        let a = assign_spans(&[(b(2, 0, 28, 8), CellSource::Model)], &rs, &cs, 2);
        assert_eq!(a.cells[0].row, [0, 1]);
        assert!(!a.diagnostics.is_empty());
    }

    #[test]
    fn empty_table() {
        let page = BinaryImage::empty(100, 100).unwrap();
        let s = borderless_structure(&page, b(10, 10, 90, 90), &[], &StructureParams::default());
        assert_eq!((s.n_rows, s.n_cols), (1, 1));
        assert!(s.cells.is_empty());
        assert_eq!(s.diagnostics.len(), 1);
    }

    #[test]
    fn text_without_cells_is_recovered() {
        let mut page = BinaryImage::empty(100, 100).unwrap();
        page.fill_rect(b(30, 30, 50, 38), true);
        let s = borderless_structure(&page, b(10, 10, 90, 90), &[], &StructureParams::default());
        assert_eq!(s.cells.len(), 1);
        assert_eq!(s.cells[0].source, CellSource::Recovered);
        assert_eq!(s.cells[0].bbox, b(30, 30, 50, 38));
    }
}
