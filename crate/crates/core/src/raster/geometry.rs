//! Axis-aligned boxes and exact region-area arithmetic.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Half-open pixel rectangle `[x0, x1) × [y0, y1)`. Never empty.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "[i32; 4]", into = "[i32; 4]")]
pub struct BBox {
    pub x0: i32,
    pub y0: i32,
    pub x1: i32,
    pub y1: i32,
}

impl BBox {
    pub fn new(x0: i32, y0: i32, x1: i32, y1: i32) -> Result<Self> {
        if x1 <= x0 || y1 <= y0 {
            return Err(Error::Geometry(format!(
                "empty box [{x0}, {y0}, {x1}, {y1}]"
            )));
        }
        Ok(Self { x0, y0, x1, y1 })
    }

    /// Box from origin and size.
    pub fn from_xywh(x: i32, y: i32, w: i32, h: i32) -> Result<Self> {
        Self::new(x, y, x + w, y + h)
    }

    pub fn width(&self) -> i64 {
        (self.x1 - self.x0) as i64
    }

    pub fn height(&self) -> i64 {
        (self.y1 - self.y0) as i64
    }

    pub fn area(&self) -> i64 {
        self.width() * self.height()
    }

    /// Center in doubled coordinates, so that it stays integral.
    pub fn center2(&self) -> (i64, i64) {
        (
            self.x0 as i64 + self.x1 as i64,
            self.y0 as i64 + self.y1 as i64,
        )
    }

    /// The pixel containing the box center.
    pub fn center_pixel(&self) -> (i32, i32) {
        let (cx, cy) = self.center2();
        ((cx.div_euclid(2)) as i32, (cy.div_euclid(2)) as i32)
    }

    pub fn intersect(&self, other: &BBox) -> Option<BBox> {
        BBox::new(
            self.x0.max(other.x0),
            self.y0.max(other.y0),
            self.x1.min(other.x1),
            self.y1.min(other.y1),
        )
        .ok()
    }

    pub fn intersection_area(&self, other: &BBox) -> i64 {
        self.intersect(other).map_or(0, |b| b.area())
    }

    /// Smallest box enclosing both.
    pub fn hull(&self, other: &BBox) -> BBox {
        BBox {
            x0: self.x0.min(other.x0),
            y0: self.y0.min(other.y0),
            x1: self.x1.max(other.x1),
            y1: self.y1.max(other.y1),
        }
    }

    pub fn contains_box(&self, other: &BBox) -> bool {
        other.x0 >= self.x0 && other.y0 >= self.y0 && other.x1 <= self.x1 && other.y1 <= self.y1
    }

    /// Whether the center of `other` lies inside `self` (half-open test on doubled coordinates).
    pub fn contains_center_of(&self, other: &BBox) -> bool {
        let (cx, cy) = other.center2();
        cx >= 2 * self.x0 as i64
            && cx < 2 * self.x1 as i64
            && cy >= 2 * self.y0 as i64
            && cy < 2 * self.y1 as i64
    }

    pub fn contains_point(&self, x: i32, y: i32) -> bool {
        x >= self.x0 && x < self.x1 && y >= self.y0 && y < self.y1
    }

    /// Grows (or with negative `d`, shrinks) every side by `d`. `None` if the result is empty.
    pub fn expand(&self, d: i32) -> Option<BBox> {
        BBox::new(self.x0 - d, self.y0 - d, self.x1 + d, self.y1 + d).ok()
    }

    pub fn translate(&self, dx: i32, dy: i32) -> BBox {
        BBox {
            x0: self.x0 + dx,
            y0: self.y0 + dy,
            x1: self.x1 + dx,
            y1: self.y1 + dy,
        }
    }

    /// Intersection with `[0, width) × [0, height)`.
    pub fn clip(&self, width: u32, height: u32) -> Option<BBox> {
        self.intersect(&BBox {
            x0: 0,
            y0: 0,
            x1: width as i32,
            y1: height as i32,
        })
    }

    pub fn within(&self, width: u32, height: u32) -> bool {
        self.x0 >= 0 && self.y0 >= 0 && self.x1 <= width as i32 && self.y1 <= height as i32
    }

    /// Interval along an axis: `(x0, x1)` for columns, `(y0, y1)` for rows.
    pub fn interval(&self, axis: Axis) -> (i32, i32) {
        match axis {
            Axis::Row => (self.y0, self.y1),
            Axis::Column => (self.x0, self.x1),
        }
    }

    pub fn to_array(self) -> [i32; 4] {
        [self.x0, self.y0, self.x1, self.y1]
    }
}

impl TryFrom<[i32; 4]> for BBox {
    type Error = Error;

    fn try_from(v: [i32; 4]) -> Result<Self> {
        BBox::new(v[0], v[1], v[2], v[3])
    }
}

impl From<BBox> for [i32; 4] {
    fn from(b: BBox) -> Self {
        b.to_array()
    }
}

impl fmt::Display for BBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}, {}]", self.x0, self.y0, self.x1, self.y1)
    }
}

/// Grid axis. Rows are stacked along y, columns along x.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Row,
    Column,
}

/// Intersection over union. Zero for disjoint boxes.
pub fn iou(a: &BBox, b: &BBox) -> f64 {
    let inter = a.intersection_area(b);
    if inter == 0 {
        return 0.0;
    }
    let union = a.area() + b.area() - inter;
    inter as f64 / union as f64
}

/// Exact area covered by the union of `boxes`.
pub fn union_area(boxes: &[BBox]) -> i64 {
    covered_area(boxes, &[], |a, _| a)
}

/// Exact area of `(∪ a) ∩ (∪ b)`.
pub fn union_intersection_area(a: &[BBox], b: &[BBox]) -> i64 {
    covered_area(a, b, |in_a, in_b| in_a && in_b)
}

/// Coordinate-compressed sweep: every elementary cell of the compressed grid is
/// fully inside or fully outside each box, so testing its lower-left corner is exact.
fn covered_area(a: &[BBox], b: &[BBox], keep: impl Fn(bool, bool) -> bool) -> i64 {
    if a.is_empty() && b.is_empty() {
        return 0;
    }
    let mut xs: Vec<i32> = a.iter().chain(b).flat_map(|r| [r.x0, r.x1]).collect();
    let mut ys: Vec<i32> = a.iter().chain(b).flat_map(|r| [r.y0, r.y1]).collect();
    xs.sort_unstable();
    xs.dedup();
    ys.sort_unstable();
    ys.dedup();

    let mut total = 0i64;
    for yw in ys.windows(2) {
        let (y, h) = (yw[0], (yw[1] - yw[0]) as i64);
        let row_a: Vec<&BBox> = a.iter().filter(|r| r.y0 <= y && y < r.y1).collect();
        let row_b: Vec<&BBox> = b.iter().filter(|r| r.y0 <= y && y < r.y1).collect();
        if row_a.is_empty() && row_b.is_empty() {
            continue;
        }
        for xw in xs.windows(2) {
            let x = xw[0];
            let in_a = row_a.iter().any(|r| r.x0 <= x && x < r.x1);
            let in_b = row_b.iter().any(|r| r.x0 <= x && x < r.x1);
            if keep(in_a, in_b) {
                total += (xw[1] - xw[0]) as i64 * h;
            }
        }
    }
    total
}
