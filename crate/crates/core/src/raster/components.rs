//! Connected-component labelling.

use serde::{Deserialize, Serialize};

use super::geometry::BBox;
use super::image::BinaryImage;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Connectivity {
    Four,
    Eight,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Component {
    pub bbox: BBox,
    pub pixel_count: u64,
    /// Zero-based, in raster order of each component's first pixel.
    pub label: u32,
}

/// Per-pixel labels (`None` for background) alongside the component list.
#[derive(Clone, Debug)]
pub struct Labelling {
    pub labels: Vec<Option<u32>>,
    pub components: Vec<Component>,
}

pub fn connected_components(img: &BinaryImage, connectivity: Connectivity) -> Vec<Component> {
    label_components(img, connectivity).components
}

pub fn label_components(img: &BinaryImage, connectivity: Connectivity) -> Labelling {
    let (w, h) = (img.width() as i64, img.height() as i64);
    let mut labels: Vec<Option<u32>> = vec![None; (w * h) as usize];
    let mut components = Vec::new();
    let offsets: &[(i64, i64)] = match connectivity {
        Connectivity::Four => &[(1, 0), (-1, 0), (0, 1), (0, -1)],
        Connectivity::Eight => &[
            (1, 0),
            (-1, 0),
            (0, 1),
            (0, -1),
            (1, 1),
            (1, -1),
            (-1, 1),
            (-1, -1),
        ],
    };
    let fg = img.pixels();
    let mut stack = Vec::new();
    for start in 0..(w * h) as usize {
        if !fg[start] || labels[start].is_some() {
            continue;
        }
        let label = components.len() as u32;
        labels[start] = Some(label);
        stack.push(start);
        let (mut x0, mut y0, mut x1, mut y1) = (i64::MAX, i64::MAX, i64::MIN, i64::MIN);
        let mut count = 0u64;
        while let Some(i) = stack.pop() {
            let (x, y) = (i as i64 % w, i as i64 / w);
            count += 1;
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
            for &(dx, dy) in offsets {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w || ny >= h {
                    continue;
                }
                let j = (ny * w + nx) as usize;
                if fg[j] && labels[j].is_none() {
                    labels[j] = Some(label);
                    stack.push(j);
                }
            }
        }
        components.push(Component {
            bbox: BBox::new(x0 as i32, y0 as i32, x1 as i32 + 1, y1 as i32 + 1)
                .expect("non-empty component"),
            pixel_count: count,
            label,
        });
    }
    Labelling { labels, components }
}
