//! Global thresholding.

use serde::{Deserialize, Serialize};

use super::image::{BinaryImage, GrayImage};

/// How the ink threshold is chosen. Pixels with intensity `< T` become ink.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BinarizeMethod {
    #[default]
    Otsu,
    Fixed(u8),
}

pub fn binarize(img: &GrayImage, method: BinarizeMethod) -> BinaryImage {
    let threshold = match method {
        BinarizeMethod::Fixed(t) => Some(t as u16),
        BinarizeMethod::Otsu => otsu_threshold(img),
    };
    let fg = match threshold {
        Some(t) => img.data().iter().map(|&v| (v as u16) < t).collect(),
        // uniform image: nothing to separate, so no ink
        None => vec![false; img.data().len()],
    };
    BinaryImage::new(img.width(), img.height(), fg).expect("dimensions come from a valid image")
}

pub fn histogram(img: &GrayImage) -> [u64; 256] {
    let mut hist = [0u64; 256];
    for &v in img.data() {
        hist[v as usize] += 1;
    }
    hist
}

/// Otsu's threshold `T` in `1..=255` (ink is `v < T`), or `None` for a uniform image.
///
/// When several thresholds tie for maximal variance (gaps in the histogram),
/// the middle of the first maximal run is returned.
pub fn otsu_threshold(img: &GrayImage) -> Option<u16> {
    let hist = histogram(img);
    if hist.iter().filter(|&&c| c > 0).count() < 2 {
        return None;
    }
    let total: u64 = hist.iter().sum();
    let sum_all: u128 = hist
        .iter()
        .enumerate()
        .map(|(v, &c)| v as u128 * c as u128)
        .sum();

    // n^2 * sigma_b^2 = (n*s0 - n0*sum)^2 / (n0*n1); across empty histogram bins the
    // inputs are identical, so tied thresholds produce bit-identical scores.
    let mut best: Option<f64> = None;
    let mut best_lo = 0u16;
    let mut best_hi = 0u16;
    let (mut n0, mut s0) = (0u128, 0u128);
    for t in 1u16..=255 {
        n0 += hist[t as usize - 1] as u128;
        s0 += (t as u128 - 1) * hist[t as usize - 1] as u128;
        let n1 = total as u128 - n0;
        if n0 == 0 || n1 == 0 {
            continue;
        }
        let diff = (total as u128 * s0).abs_diff(n0 * sum_all) as f64;
        let score = diff * diff / (n0 as f64 * n1 as f64);
        match best {
            Some(b) if score < b => {}
            Some(b) if score == b => {
                if best_hi == t - 1 {
                    best_hi = t;
                }
            }
            _ => {
                best = Some(score);
                best_lo = t;
                best_hi = t;
            }
        }
    }
    best.map(|_| (best_lo + best_hi) / 2)
}
