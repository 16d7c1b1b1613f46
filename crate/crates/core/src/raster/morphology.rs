//! Binary morphology with rectangular structuring elements.
//!
//! The structuring element `K = {0..kw-1} × {0..kh-1}` is anchored at its
//! top-left cell: dilation writes every ink pixel `p` to `p + k` for `k ∈ K`,
//! and erosion keeps `p` when `p + K` lies entirely in ink. Pixels outside the
//! image count as background.

use super::geometry::Axis;
use super::image::BinaryImage;

/// Minkowski dilation by a `kw × kh` rectangle, repeated `iterations` times.
pub fn dilate_binary(img: &BinaryImage, kw: u32, kh: u32, iterations: u32) -> BinaryImage {
    assert!(kw >= 1 && kh >= 1, "kernel must be at least 1x1");
    let mut out = img.clone();
    for _ in 0..iterations {
        out = sweep(&out, kw, Axis::Column, Dir::Forward, Op::Any);
        out = sweep(&out, kh, Axis::Row, Dir::Forward, Op::Any);
    }
    out
}

/// Erosion by a `kw × kh` rectangle.
pub fn erode_binary(img: &BinaryImage, kw: u32, kh: u32) -> BinaryImage {
    assert!(kw >= 1 && kh >= 1, "kernel must be at least 1x1");
    let out = sweep(img, kw, Axis::Column, Dir::Backward, Op::All);
    sweep(&out, kh, Axis::Row, Dir::Backward, Op::All)
}

/// Morphological opening: the union of all translates of the kernel that fit inside the ink.
pub fn open_binary(img: &BinaryImage, kw: u32, kh: u32) -> BinaryImage {
    dilate_binary(&erode_binary(img, kw, kh), kw, kh, 1)
}

/// Fills background gaps of at most `max_gap` pixels that have ink on both
/// sides along `axis` (rows for `Axis::Column` runs, i.e. horizontal gaps).
pub fn bridge_gaps(img: &BinaryImage, along: Axis, max_gap: u32) -> BinaryImage {
    let mut out = img.clone();
    if max_gap == 0 {
        return out;
    }
    let (w, h) = (img.width(), img.height());
    let (lines, len) = match along {
        Axis::Column => (h, w),
        Axis::Row => (w, h),
    };
    let at = |line: u32, i: u32| match along {
        Axis::Column => (i, line),
        Axis::Row => (line, i),
    };
    for line in 0..lines {
        let mut last_ink: Option<u32> = None;
        for i in 0..len {
            let (x, y) = at(line, i);
            if img.get(x, y) {
                if let Some(prev) = last_ink {
                    let gap = i - prev - 1;
                    if gap > 0 && gap <= max_gap {
                        for j in prev + 1..i {
                            let (gx, gy) = at(line, j);
                            out.set(gx, gy, true);
                        }
                    }
                }
                last_ink = Some(i);
            }
        }
    }
    out
}

#[derive(Clone, Copy)]
enum Dir {
    /// out[i] combines in[i - k] for k in 0..n (dilation with top-left anchor)
    Forward,
    /// out[i] combines in[i + k] for k in 0..n (erosion with top-left anchor)
    Backward,
}

#[derive(Clone, Copy)]
enum Op {
    Any,
    All,
}

/// One-dimensional running min/max along rows (`Axis::Column`) or columns (`Axis::Row`).
fn sweep(img: &BinaryImage, n: u32, along: Axis, dir: Dir, op: Op) -> BinaryImage {
    if n == 1 {
        return img.clone();
    }
    let (w, h) = (img.width(), img.height());
    let mut out = BinaryImage::empty(w, h).expect("same dims as input");
    let (lines, len) = match along {
        Axis::Column => (h, w),
        Axis::Row => (w, h),
    };
    let coord = |line: u32, i: u32| match along {
        Axis::Column => (i, line),
        Axis::Row => (line, i),
    };
    let n = n as i64;
    for line in 0..lines {
        // distance (in steps) to the most recent ink / background pixel seen in sweep order
        let mut since_ink = i64::MAX / 2;
        let mut since_bg = i64::MAX / 2;
        let idx: Box<dyn Iterator<Item = u32>> = match dir {
            Dir::Forward => Box::new(0..len),
            Dir::Backward => Box::new((0..len).rev()),
        };
        for (steps_from_edge, i) in idx.enumerate() {
            let steps_from_edge = steps_from_edge as i64;
            let (x, y) = coord(line, i);
            if img.get(x, y) {
                since_ink = 0;
            } else {
                since_bg = 0;
            }
            let v = match op {
                Op::Any => since_ink < n,
                // positions beyond the image edge are background
                Op::All => since_bg >= n && steps_from_edge >= n - 1,
            };
            out.set(x, y, v);
            since_ink += 1;
            since_bg += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(img: &BinaryImage) -> Vec<(u32, u32)> {
        img.foreground_points()
    }

    #[test]
    fn zero_iterations_is_identity() {
        let img = BinaryImage::from_points(8, 8, &[(1, 2), (5, 5)]).unwrap();
        assert_eq!(dilate_binary(&img, 2, 2, 0), img);
    }

    #[test]
    fn single_pixel_dilation() {
        let img = BinaryImage::from_points(8, 8, &[(3, 3)]).unwrap();
        assert_eq!(
            pts(&dilate_binary(&img, 2, 2, 1)),
            vec![(3, 3), (4, 3), (3, 4), (4, 4)]
        );
        let corner = BinaryImage::from_points(8, 8, &[(7, 7)]).unwrap();
        assert_eq!(pts(&dilate_binary(&corner, 2, 2, 1)), vec![(7, 7)]);
    }

    #[test]
    fn erosion_keeps_fitting_anchors() {
        let mut img = BinaryImage::empty(10, 3).unwrap();
        for x in 2..7 {
            img.set(x, 1, true);
        }
        let e = erode_binary(&img, 3, 1);
        assert_eq!(pts(&e), vec![(2, 1), (3, 1), (4, 1)]);
        assert_eq!(open_binary(&img, 3, 1), img);
        assert_eq!(open_binary(&img, 6, 1).count(), 0);
    }

    #[test]
    fn erosion_treats_outside_as_background() {
        let full = BinaryImage::new(4, 4, vec![true; 16]).unwrap();
        let e = erode_binary(&full, 2, 2);
        assert_eq!(e.count(), 9);
        assert!(!e.get(3, 0) && !e.get(0, 3));
    }

    #[test]
    fn bridging_fills_short_gaps_only() {
        let img = BinaryImage::from_points(12, 1, &[(0, 0), (3, 0), (8, 0)]).unwrap();
        let b = bridge_gaps(&img, Axis::Column, 3);
        assert_eq!(pts(&b), vec![(0, 0), (1, 0), (2, 0), (3, 0), (8, 0)]);
        let v = BinaryImage::from_points(1, 6, &[(0, 0), (0, 3)]).unwrap();
        assert_eq!(bridge_gaps(&v, Axis::Row, 2).count(), 4);
    }
}
