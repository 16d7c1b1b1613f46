use proptest::prelude::*;
use tabstruct_core::raster::components::label_components;
use tabstruct_core::raster::distance::no_ink_sentinel;
use tabstruct_core::raster::{
    binarize, dilate_binary, distance_transform, iou, otsu_threshold, union_area,
    union_intersection_area, BBox, BinarizeMethod, BinaryImage, Connectivity, GrayImage, Metric,
};

fn binary_image() -> impl Strategy<Value = BinaryImage> {
    (1u32..14, 1u32..14).prop_flat_map(|(w, h)| {
        proptest::collection::vec(proptest::bool::weighted(0.2), (w * h) as usize)
            .prop_map(move |fg| BinaryImage::new(w, h, fg).unwrap())
    })
}

fn gray_image() -> impl Strategy<Value = GrayImage> {
    (
        1u32..12,
        1u32..12,
        prop_oneof![Just(4u8), Just(16), Just(255)],
    )
        .prop_flat_map(|(w, h, levels)| {
            proptest::collection::vec(0u8..=levels, (w * h) as usize)
                .prop_map(move |v| GrayImage::new(w, h, v).unwrap())
        })
}

fn bbox() -> impl Strategy<Value = BBox> {
    (0i32..20, 0i32..20, 1i32..10, 1i32..10)
        .prop_map(|(x, y, w, h)| BBox::from_xywh(x, y, w, h).unwrap())
}

fn brute_distance(img: &BinaryImage, metric: Metric, x: u32, y: u32) -> f64 {
    img.foreground_points()
        .iter()
        .map(|&(px, py)| {
            let dx = (px as f64 - x as f64).abs();
            let dy = (py as f64 - y as f64).abs();
            match metric {
                Metric::Euclidean => (dx * dx + dy * dy).sqrt(),
                Metric::Cityblock => dx + dy,
                Metric::Chessboard => dx.max(dy),
            }
        })
        .fold(no_ink_sentinel(img.width(), img.height()), f64::min)
}

/// Exact between-class scores compared as fractions; returns the midpoint of
/// the first run of consecutive maximal thresholds.
fn brute_otsu(img: &GrayImage) -> Option<u16> {
    let px: Vec<u128> = img.data().iter().map(|&v| v as u128).collect();
    let n = px.len() as u128;
    let total: u128 = px.iter().sum();
    let scores: Vec<Option<(u128, u128)>> = (1u16..=255)
        .map(|t| {
            let n0 = px.iter().filter(|&&v| v < t as u128).count() as u128;
            let s0: u128 = px.iter().filter(|&&v| v < t as u128).sum();
            let n1 = n - n0;
            (n0 > 0 && n1 > 0).then(|| {
                let d = (n * s0).abs_diff(n0 * total);
                (d * d, n0 * n1)
            })
        })
        .collect();
    let greater = |a: (u128, u128), b: (u128, u128)| a.0 * b.1 > b.0 * a.1;
    let equal = |a: (u128, u128), b: (u128, u128)| a.0 * b.1 == b.0 * a.1;
    let best = scores
        .iter()
        .flatten()
        .copied()
        .reduce(|a, b| if greater(b, a) { b } else { a })?;
    let first = scores
        .iter()
        .position(|s| s.is_some_and(|s| equal(s, best)))?;
    let mut last = first;
    while last + 1 < scores.len() && scores[last + 1].is_some_and(|s| equal(s, best)) {
        last += 1;
    }
    Some(((first + last + 2) / 2) as u16)
}

fn brute_dilate(img: &BinaryImage, kw: u32, kh: u32) -> BinaryImage {
    let mut out = BinaryImage::empty(img.width(), img.height()).unwrap();
    for (x, y) in img.foreground_points() {
        for dy in 0..kh {
            for dx in 0..kw {
                if x + dx < img.width() && y + dy < img.height() {
                    out.set(x + dx, y + dy, true);
                }
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn distance_transform_matches_brute_force(img in binary_image()) {
        for metric in Metric::ALL {
            let field = distance_transform(&img, metric);
            for y in 0..img.height() {
                for x in 0..img.width() {
                    let want = brute_distance(&img, metric, x, y);
                    prop_assert!((field.get(x, y) - want).abs() < 1e-9, "{metric:?} at ({x},{y})");
                }
            }
        }
    }

    #[test]
    fn otsu_matches_exhaustive_search(img in gray_image()) {
        prop_assert_eq!(otsu_threshold(&img), brute_otsu(&img));
    }

    #[test]
    fn binarize_marks_pixels_below_threshold(img in gray_image(), t in 0u8..=255) {
        let bin = binarize(&img, BinarizeMethod::Fixed(t));
        for (v, fg) in img.data().iter().zip(bin.pixels()) {
            prop_assert_eq!(*fg, *v < t);
        }
    }

    #[test]
    fn dilation_matches_brute_force_and_keeps_ink(img in binary_image(), kw in 1u32..4, kh in 1u32..4) {
        let out = dilate_binary(&img, kw, kh, 1);
        prop_assert!(img.is_subset_of(&out));
        prop_assert_eq!(out, brute_dilate(&img, kw, kh));
    }

    #[test]
    fn dilation_is_monotone(img in binary_image(), kw in 1u32..4, kh in 1u32..4, iters in 0u32..3) {
        let mut bigger = img.clone();
        for (x, y) in [(0, 0), (img.width() - 1, img.height() - 1)] {
            bigger.set(x, y, true);
        }
        let a = dilate_binary(&img, kw, kh, iters);
        let b = dilate_binary(&bigger, kw, kh, iters);
        prop_assert!(a.is_subset_of(&b));
    }

    #[test]
    fn components_partition_the_ink(img in binary_image(), eight in any::<bool>()) {
        let conn = if eight { Connectivity::Eight } else { Connectivity::Four };
        let lab = label_components(&img, conn);
        let (w, h) = (img.width() as i64, img.height() as i64);
        let idx = |x: i64, y: i64| (y * w + x) as usize;
        for y in 0..h {
            for x in 0..w {
                prop_assert_eq!(lab.labels[idx(x, y)].is_some(), img.get(x as u32, y as u32));
                // adjacent ink pixels share a label
                let nbrs: &[(i64, i64)] = if eight { &[(1, 0), (0, 1), (1, 1), (1, -1)] } else { &[(1, 0), (0, 1)] };
                for (dx, dy) in nbrs {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx >= 0 && ny >= 0 && nx < w && ny < h && lab.labels[idx(x, y)].is_some() && lab.labels[idx(nx, ny)].is_some() {
                        prop_assert_eq!(lab.labels[idx(x, y)], lab.labels[idx(nx, ny)]);
                    }
                }
            }
        }
        let total: u64 = lab.components.iter().map(|c| c.pixel_count).sum();
        prop_assert_eq!(total as usize, img.count());
        for c in &lab.components {
            let pts: Vec<(i64, i64)> = (0..h)
                .flat_map(|y| (0..w).map(move |x| (x, y)))
                .filter(|&(x, y)| lab.labels[idx(x, y)] == Some(c.label))
                .collect();
            prop_assert_eq!(pts.len() as u64, c.pixel_count);
            let x0 = pts.iter().map(|p| p.0).min().unwrap() as i32;
            let y0 = pts.iter().map(|p| p.1).min().unwrap() as i32;
            let x1 = pts.iter().map(|p| p.0).max().unwrap() as i32 + 1;
            let y1 = pts.iter().map(|p| p.1).max().unwrap() as i32 + 1;
            prop_assert_eq!(c.bbox, BBox::new(x0, y0, x1, y1).unwrap());
        }
    }

    #[test]
    fn iou_is_symmetric_and_bounded(a in bbox(), b in bbox()) {
        let v = iou(&a, &b);
        prop_assert_eq!(v, iou(&b, &a));
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert_eq!(iou(&a, &a), 1.0);
    }

    #[test]
    fn union_areas_match_pixel_counting(
        a in proptest::collection::vec(bbox(), 0..5),
        b in proptest::collection::vec(bbox(), 0..5),
    ) {
        let inside = |boxes: &[BBox], x: i32, y: i32| boxes.iter().any(|r| r.contains_point(x, y));
        let (mut ua, mut both) = (0i64, 0i64);
        for y in 0..30 {
            for x in 0..30 {
                ua += inside(&a, x, y) as i64;
                both += (inside(&a, x, y) && inside(&b, x, y)) as i64;
            }
        }
        prop_assert_eq!(union_area(&a), ua);
        prop_assert_eq!(union_intersection_area(&a, &b), both);
    }
}
