//! Grayscale and binary page rasters.
//!
//! Intensities: 0 is black ink, 255 is white background. Binary images store
//! `true` for ink.

use crate::error::{Error, Result};
use crate::raster::geometry::BBox;

pub const INK: u8 = 0;
pub const BACKGROUND: u8 = 255;

/// Row-major 8-bit grayscale raster.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Result<Self> {
        check_dims(width, height)?;
        if data.len() != (width as usize) * (height as usize) {
            return Err(Error::Image(format!(
                "buffer holds {} bytes, expected {}x{}",
                data.len(),
                width,
                height
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// A blank (all white) page.
    pub fn blank(width: u32, height: u32) -> Result<Self> {
        Self::filled(width, height, BACKGROUND)
    }

    pub fn filled(width: u32, height: u32, value: u8) -> Result<Self> {
        check_dims(width, height)?;
        Ok(Self {
            width,
            height,
            data: vec![value; width as usize * height as usize],
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.data[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, value: u8) {
        self.data[y as usize * self.width as usize + x as usize] = value;
    }

    /// Paints `rect` (clipped to the image) with `value`.
    pub fn fill_rect(&mut self, rect: BBox, value: u8) {
        let Some(r) = rect.clip(self.width, self.height) else {
            return;
        };
        let w = self.width as usize;
        for y in r.y0..r.y1 {
            let row = y as usize * w;
            self.data[row + r.x0 as usize..row + r.x1 as usize].fill(value);
        }
    }

    /// Number of pixels darker than mid-gray.
    pub fn dark_pixel_count(&self) -> usize {
        self.data.iter().filter(|&&v| v < 128).count()
    }
}

/// Per-pixel ink mask.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryImage {
    width: u32,
    height: u32,
    fg: Vec<bool>,
}

impl BinaryImage {
    pub fn new(width: u32, height: u32, fg: Vec<bool>) -> Result<Self> {
        check_dims(width, height)?;
        if fg.len() != (width as usize) * (height as usize) {
            return Err(Error::Image(format!(
                "mask holds {} pixels, expected {}x{}",
                fg.len(),
                width,
                height
            )));
        }
        Ok(Self { width, height, fg })
    }

    /// All-background image.
    pub fn empty(width: u32, height: u32) -> Result<Self> {
        check_dims(width, height)?;
        Ok(Self {
            width,
            height,
            fg: vec![false; width as usize * height as usize],
        })
    }

    /// Builds an image from a list of `(x, y)` ink pixels. Out-of-range points are ignored.
    pub fn from_points(width: u32, height: u32, points: &[(u32, u32)]) -> Result<Self> {
        let mut img = Self::empty(width, height)?;
        for &(x, y) in points {
            if x < width && y < height {
                img.set(x, y, true);
            }
        }
        Ok(img)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[bool] {
        &self.fg
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> bool {
        self.fg[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, value: bool) {
        self.fg[y as usize * self.width as usize + x as usize] = value;
    }

    pub fn fill_rect(&mut self, rect: BBox, value: bool) {
        let Some(r) = rect.clip(self.width, self.height) else {
            return;
        };
        let w = self.width as usize;
        for y in r.y0..r.y1 {
            let row = y as usize * w;
            self.fg[row + r.x0 as usize..row + r.x1 as usize].fill(value);
        }
    }

    pub fn count(&self) -> usize {
        self.fg.iter().filter(|&&b| b).count()
    }

    /// Ink pixels in raster order.
    pub fn foreground_points(&self) -> Vec<(u32, u32)> {
        let w = self.width as usize;
        self.fg
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| ((i % w) as u32, (i / w) as u32))
            .collect()
    }

    /// True when every ink pixel of `self` is also ink in `other`.
    pub fn is_subset_of(&self, other: &BinaryImage) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.fg.iter().zip(&other.fg).all(|(&a, &b)| !a || b)
    }

    /// Copies the region `rect` (must lie inside the image) into a new image.
    pub fn crop(&self, rect: BBox) -> Result<BinaryImage> {
        let r = rect
            .clip(self.width, self.height)
            .filter(|r| *r == rect)
            .ok_or_else(|| {
                Error::Image(format!(
                    "crop {rect} exceeds {}x{}",
                    self.width, self.height
                ))
            })?;
        let (cw, ch) = (r.width() as u32, r.height() as u32);
        let mut fg = Vec::with_capacity(cw as usize * ch as usize);
        let w = self.width as usize;
        for y in r.y0..r.y1 {
            let row = y as usize * w;
            fg.extend_from_slice(&self.fg[row + r.x0 as usize..row + r.x1 as usize]);
        }
        BinaryImage::new(cw, ch, fg)
    }

    /// Renders ink as black (0) on white (255).
    pub fn to_gray(&self) -> GrayImage {
        let data = self
            .fg
            .iter()
            .map(|&b| if b { INK } else { BACKGROUND })
            .collect();
        GrayImage {
            width: self.width,
            height: self.height,
            data,
        }
    }

    pub fn full_rect(&self) -> BBox {
        BBox::new(0, 0, self.width as i32, self.height as i32).expect("image dims are non-zero")
    }
}

fn check_dims(width: u32, height: u32) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::Image(format!(
            "image dimensions must be non-zero, got {width}x{height}"
        )));
    }
    if width > i32::MAX as u32 || height > i32::MAX as u32 {
        return Err(Error::Image(format!(
            "image dimensions too large: {width}x{height}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_buffers() {
        assert!(GrayImage::new(0, 3, vec![]).is_err());
        assert!(GrayImage::new(2, 2, vec![0; 3]).is_err());
        assert!(BinaryImage::new(2, 2, vec![false; 5]).is_err());
    }

    #[test]
    fn crop_copies_region() {
        let img = BinaryImage::from_points(5, 5, &[(2, 2), (3, 2), (4, 4)]).unwrap();
        let c = img.crop(BBox::new(2, 2, 4, 4).unwrap()).unwrap();
        assert_eq!(c.foreground_points(), vec![(0, 0), (1, 0)]);
        assert!(img.crop(BBox::new(3, 3, 6, 5).unwrap()).is_err());
    }
}
