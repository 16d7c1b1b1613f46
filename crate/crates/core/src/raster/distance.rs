//! Exact distance transforms: distance from every pixel to the nearest ink pixel.

use serde::{Deserialize, Serialize};

use super::image::BinaryImage;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    /// `sqrt(dx² + dy²)`
    Euclidean,
    /// `|dx| + |dy|`
    Cityblock,
    /// `max(|dx|, |dy|)`
    Chessboard,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Euclidean, Metric::Cityblock, Metric::Chessboard];
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistanceField {
    width: u32,
    height: u32,
    values: Vec<f64>,
}

impl DistanceField {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> f64 {
        self.values[y as usize * self.width as usize + x as usize]
    }
}

/// Value reported everywhere when the image has no ink at all.
pub fn no_ink_sentinel(width: u32, height: u32) -> f64 {
    (width as u64 + height as u64) as f64
}

pub fn distance_transform(img: &BinaryImage, metric: Metric) -> DistanceField {
    let (w, h) = (img.width(), img.height());
    let values = if !img.pixels().iter().any(|&b| b) {
        vec![no_ink_sentinel(w, h); w as usize * h as usize]
    } else {
        match metric {
            Metric::Euclidean => euclidean(img),
            Metric::Cityblock => two_pass(img, false),
            Metric::Chessboard => two_pass(img, true),
        }
    };
    DistanceField {
        width: w,
        height: h,
        values,
    }
}

/// Forward/backward raster sweeps. With unit steps to the 4-neighbourhood this is
/// exact for the city-block metric, and with the 8-neighbourhood for chessboard.
fn two_pass(img: &BinaryImage, diagonals: bool) -> Vec<f64> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let far = (w + h) as u32 * 2;
    let mut d: Vec<u32> = img
        .pixels()
        .iter()
        .map(|&b| if b { 0 } else { far })
        .collect();
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let mut v = d[i];
            if x > 0 {
                v = v.min(d[i - 1] + 1);
            }
            if y > 0 {
                v = v.min(d[i - w] + 1);
                if diagonals {
                    if x > 0 {
                        v = v.min(d[i - w - 1] + 1);
                    }
                    if x + 1 < w {
                        v = v.min(d[i - w + 1] + 1);
                    }
                }
            }
            d[i] = v;
        }
    }
    for y in (0..h).rev() {
        for x in (0..w).rev() {
            let i = y * w + x;
            let mut v = d[i];
            if x + 1 < w {
                v = v.min(d[i + 1] + 1);
            }
            if y + 1 < h {
                v = v.min(d[i + w] + 1);
                if diagonals {
                    if x + 1 < w {
                        v = v.min(d[i + w + 1] + 1);
                    }
                    if x > 0 {
                        v = v.min(d[i + w - 1] + 1);
                    }
                }
            }
            d[i] = v;
        }
    }
    d.into_iter().map(f64::from).collect()
}

/// Separable exact squared-EDT (lower envelope of parabolas), then square root.
fn euclidean(img: &BinaryImage) -> Vec<f64> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let inf = ((w + h) * (w + h)) as f64 * 4.0;
    let mut sq: Vec<f64> = img
        .pixels()
        .iter()
        .map(|&b| if b { 0.0 } else { inf })
        .collect();

    let mut f = vec![0.0; w.max(h)];
    let mut out = vec![0.0; w.max(h)];
    let mut scratch = Envelope::with_capacity(w.max(h));

    for x in 0..w {
        for y in 0..h {
            f[y] = sq[y * w + x];
        }
        scratch.transform(&f[..h], &mut out[..h]);
        for y in 0..h {
            sq[y * w + x] = out[y];
        }
    }
    for y in 0..h {
        f[..w].copy_from_slice(&sq[y * w..(y + 1) * w]);
        scratch.transform(&f[..w], &mut out[..w]);
        sq[y * w..(y + 1) * w].copy_from_slice(&out[..w]);
    }
    sq.into_iter().map(f64::sqrt).collect()
}

struct Envelope {
    vertices: Vec<usize>,
    bounds: Vec<f64>,
}

impl Envelope {
    fn with_capacity(n: usize) -> Self {
        Self {
            vertices: vec![0; n],
            bounds: vec![0.0; n + 1],
        }
    }

    /// `out[q] = min_p (q - p)² + f[p]`
    fn transform(&mut self, f: &[f64], out: &mut [f64]) {
        let n = f.len();
        let v = &mut self.vertices;
        let z = &mut self.bounds;
        let mut k = 0usize;
        v[0] = 0;
        z[0] = f64::NEG_INFINITY;
        z[1] = f64::INFINITY;
        for q in 1..n {
            let mut s;
            loop {
                let p = v[k];
                s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64))
                    / (2.0 * (q as f64 - p as f64));
                // z[0] is -inf, so this stops at k == 0 at the latest
                if s > z[k] {
                    break;
                }
                k -= 1;
            }
            k += 1;
            v[k] = q;
            z[k] = s;
            z[k + 1] = f64::INFINITY;
        }
        k = 0;
        for (q, o) in out.iter_mut().enumerate().take(n) {
            while z[k + 1] < q as f64 {
                k += 1;
            }
            let p = v[k];
            let d = q as f64 - p as f64;
            *o = d * d + f[p];
        }
    }
}
