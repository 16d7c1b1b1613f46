//! Contour-style text detection: ink components grouped into word/line boxes.

use serde::{Deserialize, Serialize};

use super::components::{connected_components, Connectivity};
use super::geometry::{Axis, BBox};
use super::image::BinaryImage;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TextParams {
    /// Components with fewer ink pixels are treated as noise.
    pub min_area: u64,
    pub merge_gap_x: u32,
    pub merge_gap_y: u32,
}

impl Default for TextParams {
    fn default() -> Self {
        Self {
            min_area: 4,
            merge_gap_x: 8,
            merge_gap_y: 2,
        }
    }
}

/// Word/line boxes in reading order (top-to-bottom, then left-to-right).
///
/// Two boxes merge when their horizontal gap is at most `merge_gap_x` and they
/// either overlap vertically by at least half the shorter height or are at most
/// `merge_gap_y` apart vertically. Merging runs to a fixed point.
pub fn text_regions(img: &BinaryImage, params: &TextParams) -> Vec<BBox> {
    let boxes: Vec<BBox> = connected_components(img, Connectivity::Eight)
        .into_iter()
        .filter(|c| c.pixel_count >= params.min_area.max(1))
        .map(|c| c.bbox)
        .collect();
    let mut merged = merge_boxes(boxes, params);
    merged.sort_by_key(|b| (b.y0, b.x0, b.y1, b.x1));
    merged
}

/// Same as [`text_regions`] restricted to `region`, reported in image coordinates.
pub fn text_regions_in(img: &BinaryImage, region: BBox, params: &TextParams) -> Vec<BBox> {
    let Some(r) = region.clip(img.width(), img.height()) else {
        return Vec::new();
    };
    let crop = img.crop(r).expect("clipped region lies inside the image");
    text_regions(&crop, params)
        .into_iter()
        .map(|b| b.translate(r.x0, r.y0))
        .collect()
}

fn gap(a: (i32, i32), b: (i32, i32)) -> i64 {
    (a.0.max(b.0) as i64 - a.1.min(b.1) as i64).max(0)
}

fn overlap(a: (i32, i32), b: (i32, i32)) -> i64 {
    (a.1.min(b.1) as i64 - a.0.max(b.0) as i64).max(0)
}

pub fn should_merge(a: &BBox, b: &BBox, params: &TextParams) -> bool {
    if gap(a.interval(Axis::Column), b.interval(Axis::Column)) > params.merge_gap_x as i64 {
        return false;
    }
    let (ay, by) = (a.interval(Axis::Row), b.interval(Axis::Row));
    2 * overlap(ay, by) >= a.height().min(b.height()) || gap(ay, by) <= params.merge_gap_y as i64
}

fn merge_boxes(mut boxes: Vec<BBox>, params: &TextParams) -> Vec<BBox> {
    loop {
        let mut changed = false;
        let mut i = 0;
        while i < boxes.len() {
            let mut j = i + 1;
            while j < boxes.len() {
                if should_merge(&boxes[i], &boxes[j], params) {
                    let other = boxes.swap_remove(j);
                    boxes[i] = boxes[i].hull(&other);
                    changed = true;
                    // the grown box may now reach earlier candidates
                    j = i + 1;
                } else {
                    j += 1;
                }
            }
            i += 1;
        }
        if !changed {
            return boxes;
        }
    }
}

/// Removes thin long runs of ink (ruling lines) so that only text-like blobs remain.
///
/// A pixel is dropped when it sits on a horizontal run of at least `min_len`
/// whose vertical extent at that pixel is at most `max_thickness` (or the same
/// with axes swapped), or when both its runs are at least `min_len` long (line crossings).
pub fn suppress_ruling_lines(img: &BinaryImage, min_len: u32, max_thickness: u32) -> BinaryImage {
    let h_run = run_lengths(img, Axis::Column);
    let v_run = run_lengths(img, Axis::Row);
    let mut out = img.clone();
    let w = img.width() as usize;
    for (i, (&hr, &vr)) in h_run.iter().zip(&v_run).enumerate() {
        if hr == 0 {
            continue;
        }
        let line = (hr >= min_len && vr <= max_thickness)
            || (vr >= min_len && hr <= max_thickness)
            || (hr >= min_len && vr >= min_len);
        if line {
            out.set((i % w) as u32, (i / w) as u32, false);
        }
    }
    out
}

/// For each ink pixel, the length of the maximal run through it along the axis
/// (`Axis::Column` = horizontal runs); zero for background.
pub fn run_lengths(img: &BinaryImage, along: Axis) -> Vec<u32> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let mut out = vec![0u32; w * h];
    let (lines, len, stride_line, stride_i) = match along {
        Axis::Column => (h, w, w, 1),
        Axis::Row => (w, h, 1, w),
    };
    let fg = img.pixels();
    for line in 0..lines {
        let base = line * stride_line;
        let mut i = 0;
        while i < len {
            if !fg[base + i * stride_i] {
                i += 1;
                continue;
            }
            let start = i;
            while i < len && fg[base + i * stride_i] {
                i += 1;
            }
            for k in start..i {
                out[base + k * stride_i] = (i - start) as u32;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn page_with_blocks(gap: i32) -> BinaryImage {
        let mut img = BinaryImage::empty(40, 20).unwrap();
        img.fill_rect(BBox::new(5, 5, 10, 10).unwrap(), true);
        img.fill_rect(BBox::new(10 + gap, 5, 15 + gap, 10).unwrap(), true);
        img
    }

    #[test]
    fn empty_page() {
        let img = BinaryImage::empty(10, 10).unwrap();
        assert!(text_regions(&img, &TextParams::default()).is_empty());
    }

    #[test]
    fn nearby_blocks_merge() {
        let img = page_with_blocks(3);
        let p = TextParams {
            merge_gap_x: 5,
            ..TextParams::default()
        };
        assert_eq!(
            text_regions(&img, &p),
            vec![BBox::new(5, 5, 18, 10).unwrap()]
        );
        let p = TextParams {
            merge_gap_x: 2,
            ..TextParams::default()
        };
        assert_eq!(text_regions(&img, &p).len(), 2);
    }

    #[test]
    fn small_specks_are_dropped() {
        let img = BinaryImage::from_points(10, 10, &[(1, 1), (5, 5), (6, 5)]).unwrap();
        assert!(text_regions(&img, &TextParams::default()).is_empty());
    }

    #[test]
    fn reading_order() {
        let mut img = BinaryImage::empty(60, 60).unwrap();
        for (x, y) in [(40, 5), (5, 5), (5, 40)] {
            img.fill_rect(BBox::from_xywh(x, y, 6, 6).unwrap(), true);
        }
        let p = TextParams {
            merge_gap_x: 2,
            merge_gap_y: 2,
            ..TextParams::default()
        };
        let r = text_regions(&img, &p);
        assert_eq!(
            r.iter().map(|b| (b.x0, b.y0)).collect::<Vec<_>>(),
            vec![(5, 5), (40, 5), (5, 40)]
        );
    }

    #[test]
    fn ruling_lines_are_suppressed_but_blobs_kept() {
        let mut img = BinaryImage::empty(80, 60).unwrap();
        img.fill_rect(BBox::new(0, 0, 80, 2).unwrap(), true);
        img.fill_rect(BBox::new(0, 0, 2, 60).unwrap(), true);
        img.fill_rect(BBox::new(20, 20, 50, 28).unwrap(), true);
        let s = suppress_ruling_lines(&img, 15, 3);
        assert_eq!(s.count(), 30 * 8);
    }
}
