//! Bordered tables: ruling lines → separator grid → one structure cell per grid slot.

use serde::{Deserialize, Serialize};

use super::{
    BorderedParams, CellSource, StructureCell, StructureParams, TableStructure, TableType,
};
use crate::raster::geometry::{Axis, BBox};
use crate::raster::image::BinaryImage;
use crate::raster::morphology::{bridge_gaps, open_binary};
use crate::raster::text::text_regions_in;

/// Minimum length (px) of the opening kernel, whatever the table size.
pub const MIN_RUN_KERNEL: u32 = 15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Horizontal,
    Vertical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RulingLine {
    pub orientation: Orientation,
    /// y for horizontal lines, x for vertical ones (center of the stroke).
    pub position: i32,
    /// Extent along the line, half-open.
    pub span: (i32, i32),
    /// Stroke width across the line.
    pub thickness: u32,
}

/// Separator positions, both including the table's own edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    pub row_separators: Vec<i32>,
    pub col_separators: Vec<i32>,
}

impl Grid {
    pub fn n_rows(&self) -> usize {
        self.row_separators.len() - 1
    }

    pub fn n_cols(&self) -> usize {
        self.col_separators.len() - 1
    }
}

/// Finds horizontal and vertical ruling lines inside `table`.
pub fn detect_ruling_lines(page: &BinaryImage, table: BBox, min_len_frac: f64) -> Vec<RulingLine> {
    let params = BorderedParams {
        min_len_frac,
        ..BorderedParams::default()
    };
    detect_lines_in(page, table, table, &params)
}

/// Line search over `region`, with length thresholds taken from `table`'s size.
fn detect_lines_in(
    page: &BinaryImage,
    region: BBox,
    table: BBox,
    params: &BorderedParams,
) -> Vec<RulingLine> {
    let Some(region) = region.clip(page.width(), page.height()) else {
        return Vec::new();
    };
    let crop = page.crop(region).expect("clipped to the page");
    let mut lines = Vec::new();
    for orientation in [Orientation::Horizontal, Orientation::Vertical] {
        let (along, dim) = match orientation {
            Orientation::Horizontal => (Axis::Column, table.width()),
            Orientation::Vertical => (Axis::Row, table.height()),
        };
        let min_len = params.min_len_frac * dim as f64;
        let kernel = MIN_RUN_KERNEL.max((params.min_len_frac * dim as f64).round() as u32);
        let bridged = bridge_gaps(&crop, along, params.max_gap);
        let opened = match orientation {
            Orientation::Horizontal => open_binary(&bridged, kernel, 1),
            Orientation::Vertical => open_binary(&bridged, 1, kernel),
        };
        let segments = runs(&opened, along);
        for line in group_segments(segments, params.merge_dist as i32, params.max_gap as i32) {
            if ((line.span.1 - line.span.0) as f64) < min_len {
                continue;
            }
            let (dpos, dspan) = match orientation {
                Orientation::Horizontal => (region.y0, region.x0),
                Orientation::Vertical => (region.x0, region.y0),
            };
            lines.push(RulingLine {
                orientation,
                position: line.position + dpos,
                span: (line.span.0 + dspan, line.span.1 + dspan),
                thickness: line.thickness,
            });
        }
    }
    lines.sort_by_key(|l| (l.orientation, l.position, l.span));
    lines
}

/// A maximal ink run: `cross` is the row (or column) index, `span` the extent along it.
#[derive(Clone, Copy, Debug)]
struct Segment {
    cross: i32,
    span: (i32, i32),
}

fn runs(img: &BinaryImage, along: Axis) -> Vec<Segment> {
    let (lines, len) = match along {
        Axis::Column => (img.height(), img.width()),
        Axis::Row => (img.width(), img.height()),
    };
    let get = |line: u32, i: u32| match along {
        Axis::Column => img.get(i, line),
        Axis::Row => img.get(line, i),
    };
    let mut out = Vec::new();
    for line in 0..lines {
        let mut i = 0;
        while i < len {
            if !get(line, i) {
                i += 1;
                continue;
            }
            let start = i;
            while i < len && get(line, i) {
                i += 1;
            }
            out.push(Segment {
                cross: line as i32,
                span: (start as i32, i as i32),
            });
        }
    }
    out
}

struct LineGroup {
    cross_min: i32,
    cross_max: i32,
    span: (i32, i32),
}

struct Merged {
    position: i32,
    span: (i32, i32),
    thickness: u32,
}

/// Joins segments lying within `merge_dist` across and overlapping (or within
/// `max_gap`) along into single lines.
fn group_segments(mut segs: Vec<Segment>, merge_dist: i32, max_gap: i32) -> Vec<Merged> {
    segs.sort_by_key(|s| (s.cross, s.span));
    let mut groups: Vec<LineGroup> = Vec::new();
    for s in segs {
        let target = groups.iter_mut().rev().find(|g| {
            s.cross - g.cross_max <= merge_dist
                && s.span.0 <= g.span.1 + max_gap
                && g.span.0 <= s.span.1 + max_gap
        });
        match target {
            Some(g) => {
                g.cross_max = g.cross_max.max(s.cross);
                g.span = (g.span.0.min(s.span.0), g.span.1.max(s.span.1));
            }
            None => groups.push(LineGroup {
                cross_min: s.cross,
                cross_max: s.cross,
                span: s.span,
            }),
        }
    }
    groups
        .into_iter()
        .map(|g| Merged {
            position: (g.cross_min + g.cross_max).div_euclid(2),
            span: g.span,
            thickness: (g.cross_max - g.cross_min + 1) as u32,
        })
        .collect()
}

/// Builds the separator grid: nearby lines collapse to their mean, and table
/// edges are added where no line sits within `snap_tol`.
pub fn grid_from_lines(lines: &[RulingLine], table: BBox, snap_tol: u32) -> Grid {
    let (grid, _) = grid_with_thickness(lines, table, snap_tol);
    grid
}

/// Like [`grid_from_lines`], also returning the stroke width at each separator (0 for bare edges).
fn grid_with_thickness(lines: &[RulingLine], table: BBox, snap_tol: u32) -> (Grid, [Vec<u32>; 2]) {
    let (rows, row_t) = separators(
        lines,
        Orientation::Horizontal,
        (table.y0, table.y1),
        snap_tol as i32,
    );
    let (cols, col_t) = separators(
        lines,
        Orientation::Vertical,
        (table.x0, table.x1),
        snap_tol as i32,
    );
    (
        Grid {
            row_separators: rows,
            col_separators: cols,
        },
        [row_t, col_t],
    )
}

fn separators(
    lines: &[RulingLine],
    orientation: Orientation,
    edges: (i32, i32),
    tol: i32,
) -> (Vec<i32>, Vec<u32>) {
    let mut found: Vec<(i32, u32)> = lines
        .iter()
        .filter(|l| l.orientation == orientation)
        .map(|l| (l.position, l.thickness))
        .collect();
    found.sort_unstable();

    let mut collapsed: Vec<(i32, u32)> = Vec::new();
    let mut cluster: Vec<(i32, u32)> = Vec::new();
    let flush = |cluster: &mut Vec<(i32, u32)>, out: &mut Vec<(i32, u32)>| {
        if cluster.is_empty() {
            return;
        }
        let sum: i64 = cluster.iter().map(|c| c.0 as i64).sum();
        let mean = sum.div_euclid(cluster.len() as i64) as i32;
        let thick = cluster.iter().map(|c| c.1).max().unwrap_or(0);
        out.push((mean, thick));
        cluster.clear();
    };
    for p in found {
        if cluster.last().is_some_and(|last| p.0 - last.0 > tol) {
            flush(&mut cluster, &mut collapsed);
        }
        cluster.push(p);
    }
    flush(&mut cluster, &mut collapsed);

    for edge in [edges.0, edges.1] {
        if !collapsed.iter().any(|c| (c.0 - edge).abs() <= tol) {
            collapsed.push((edge, 0));
        }
    }
    collapsed.sort_unstable();
    collapsed.dedup_by_key(|c| c.0);
    if collapsed.len() < 2 {
        collapsed = vec![(edges.0, 0), (edges.1, 0)];
    }
    collapsed.into_iter().unzip()
}

/// Full bordered branch for one table.
pub fn bordered_structure(
    page: &BinaryImage,
    table: BBox,
    params: &StructureParams,
) -> TableStructure {
    let bp = &params.bordered;
    let search = table.expand(bp.snap_tol as i32).unwrap_or(table);
    let lines = detect_lines_in(page, search, table, bp);
    let (grid, [row_t, col_t]) = grid_with_thickness(&lines, table, bp.snap_tol);

    let (rs, cs) = (&grid.row_separators, &grid.col_separators);
    let mut cells = Vec::with_capacity(grid.n_rows() * grid.n_cols());
    for r in 0..grid.n_rows() {
        for c in 0..grid.n_cols() {
            let bbox = BBox::new(cs[c], rs[r], cs[c + 1], rs[r + 1])
                .expect("separators strictly increase");
            let interior = BBox::new(
                cs[c] + inset(col_t[c]),
                rs[r] + inset(row_t[r]),
                cs[c + 1] - inset(col_t[c + 1]),
                rs[r + 1] - inset(row_t[r + 1]),
            );
            let content = match interior {
                Ok(inner) => text_regions_in(page, inner, &params.text),
                Err(_) => Vec::new(),
            };
            cells.push(StructureCell {
                row: [r as u32, r as u32 + 1],
                col: [c as u32, c as u32 + 1],
                bbox,
                content,
                source: CellSource::Model,
            });
        }
    }
    TableStructure {
        bbox: table,
        table_type: TableType::Bordered,
        n_rows: grid.n_rows() as u32,
        n_cols: grid.n_cols() as u32,
        cells,
        diagnostics: Vec::new(),
    }
}

/// Distance from a separator to the usable cell interior.
fn inset(thickness: u32) -> i32 {
    if thickness == 0 {
        0
    } else {
        thickness as i32 + 1
    }
}
