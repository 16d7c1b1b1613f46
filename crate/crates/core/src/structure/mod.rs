//! Recovered table structure and the two branches that produce it.
//!
//! Bordered tables get their grid from ruling lines; borderless (and
//! semi-bordered) tables get it from predicted cell boxes clustered into
//! row and column bands.

pub mod bordered;
pub mod borderless;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::geometry::BBox;
use crate::raster::TextParams;

pub use bordered::{
    bordered_structure, detect_ruling_lines, grid_from_lines, Grid, Orientation, RulingLine,
};
pub use borderless::{
    add_orphan_bands, assign_spans, borderless_structure, cluster_bands, estimate_separators,
    recover_missing_cells, Band,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableType {
    Bordered,
    Borderless,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellSource {
    Model,
    Recovered,
}

/// A cell covering rows `row[0]..row[1]` and columns `col[0]..col[1]` (half-open).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureCell {
    pub row: [u32; 2],
    pub col: [u32; 2],
    pub bbox: BBox,
    pub content: Vec<BBox>,
    pub source: CellSource,
}

impl StructureCell {
    pub fn overlaps(&self, other: &StructureCell) -> bool {
        self.row[0] < other.row[1]
            && other.row[0] < self.row[1]
            && self.col[0] < other.col[1]
            && other.col[0] < self.col[1]
    }

    pub fn span_rect(&self) -> [u32; 4] {
        [self.row[0], self.row[1], self.col[0], self.col[1]]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableStructure {
    pub bbox: BBox,
    #[serde(rename = "type")]
    pub table_type: TableType,
    pub n_rows: u32,
    pub n_cols: u32,
    pub cells: Vec<StructureCell>,
    /// Notes about clamped, shrunk or dropped cells and degenerate tables.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

impl TableStructure {
    /// Checks span bounds and that no two cells claim the same grid slot.
    pub fn validate(&self) -> Result<()> {
        for (i, c) in self.cells.iter().enumerate() {
            let ok = c.row[0] < c.row[1]
                && c.row[1] <= self.n_rows
                && c.col[0] < c.col[1]
                && c.col[1] <= self.n_cols;
            if !ok {
                return Err(Error::Geometry(format!(
                    "cell {i} span rows {:?} cols {:?} outside {}x{} grid",
                    c.row, c.col, self.n_rows, self.n_cols
                )));
            }
            if let Some(j) = self.cells[..i].iter().position(|o| o.overlaps(c)) {
                return Err(Error::Geometry(format!("cells {j} and {i} overlap")));
            }
        }
        Ok(())
    }

    /// Span rectangles `[r0, r1, c0, c1]`, sorted.
    pub fn span_map(&self) -> Vec<[u32; 4]> {
        let mut v: Vec<_> = self.cells.iter().map(StructureCell::span_rect).collect();
        v.sort_unstable();
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BorderedParams {
    /// Minimum ruling-line length as a fraction of the table dimension.
    pub min_len_frac: f64,
    /// Lines closer than this collapse to one separator.
    pub snap_tol: u32,
    /// Gaps along a ruling line up to this many pixels are bridged.
    pub max_gap: u32,
    /// Parallel run segments this close across the line are one (thick) line.
    pub merge_dist: u32,
}

impl Default for BorderedParams {
    fn default() -> Self {
        Self {
            min_len_frac: 0.5,
            snap_tol: 5,
            max_gap: 3,
            merge_dist: 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BorderlessParams {
    /// Required interval overlap (fraction of the shorter interval) to join a band.
    pub overlap_frac: f64,
    /// Cells longer than this multiple of the median extent are span candidates.
    pub span_factor: f64,
    /// Tolerance when deciding which separators a cell crosses.
    pub margin: u32,
    /// Ink runs at least this long and at most `rule_max_thickness` thick are
    /// treated as ruling lines and ignored by cell recovery.
    pub rule_min_len: u32,
    pub rule_max_thickness: u32,
}

impl Default for BorderlessParams {
    fn default() -> Self {
        Self {
            overlap_frac: 0.5,
            span_factor: 1.8,
            margin: 2,
            rule_min_len: 15,
            rule_max_thickness: 3,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StructureParams {
    pub bordered: BorderedParams,
    pub borderless: BorderlessParams,
    pub text: TextParams,
}

impl StructureParams {
    pub fn validate(&self) -> Result<()> {
        let b = &self.bordered;
        if !(b.min_len_frac > 0.0 && b.min_len_frac <= 1.0) {
            return Err(Error::Config(format!(
                "bordered.min_len_frac must be in (0, 1], got {}",
                b.min_len_frac
            )));
        }
        let l = &self.borderless;
        if !(l.overlap_frac > 0.0 && l.overlap_frac <= 1.0) {
            return Err(Error::Config(format!(
                "borderless.overlap_frac must be in (0, 1], got {}",
                l.overlap_frac
            )));
        }
        if !(l.span_factor >= 1.0 && l.span_factor.is_finite()) {
            return Err(Error::Config(format!(
                "borderless.span_factor must be >= 1, got {}",
                l.span_factor
            )));
        }
        if l.rule_min_len == 0 {
            return Err(Error::Config("borderless.rule_min_len must be >= 1".into()));
        }
        if self.text.min_area == 0 {
            return Err(Error::Config("text.min_area must be >= 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(row: [u32; 2], col: [u32; 2]) -> StructureCell {
        StructureCell {
            row,
            col,
            bbox: BBox::new(0, 0, 1, 1).unwrap(),
            content: vec![],
            source: CellSource::Model,
        }
    }

    #[test]
    fn validate_catches_overlap_and_bounds() {
        let mut t = TableStructure {
            bbox: BBox::new(0, 0, 10, 10).unwrap(),
            table_type: TableType::Borderless,
            n_rows: 2,
            n_cols: 2,
            cells: vec![cell([0, 1], [0, 2]), cell([1, 2], [0, 1])],
            diagnostics: vec![],
        };
        assert!(t.validate().is_ok());
        t.cells.push(cell([0, 2], [1, 2]));
        assert!(t.validate().is_err());
        t.cells.pop();
        t.cells.push(cell([1, 3], [1, 2]));
        assert!(t.validate().is_err());
    }

    #[test]
    fn params_validate() {
        assert!(StructureParams::default().validate().is_ok());
        let mut p = StructureParams::default();
        p.borderless.overlap_frac = 0.0;
        assert!(p.validate().is_err());
    }
}
