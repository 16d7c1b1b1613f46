//! PNG / PGM reading and writing.

use std::io::Cursor;
use std::path::Path;

use image::{ImageFormat, Luma, Rgb};

use super::image::{BinaryImage, GrayImage};
use crate::error::{Error, Result};

/// Decodes any supported raster (PNG, PGM, ...) and converts it to 8-bit luminance.
pub fn decode_gray(bytes: &[u8]) -> Result<GrayImage> {
    let img = image::load_from_memory(bytes).map_err(|e| Error::Image(e.to_string()))?;
    let luma = img.to_luma8();
    let (w, h) = luma.dimensions();
    GrayImage::new(w, h, luma.into_raw())
}

pub fn read_gray(path: &Path) -> Result<GrayImage> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_gray(&bytes).map_err(|e| Error::Decode {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn buffer(img: &GrayImage) -> image::ImageBuffer<Luma<u8>, Vec<u8>> {
    image::ImageBuffer::from_raw(img.width(), img.height(), img.data().to_vec())
        .expect("buffer sized by GrayImage")
}

pub fn encode_png(img: &GrayImage) -> Result<Vec<u8>> {
    let mut out = Cursor::new(Vec::new());
    buffer(img)
        .write_to(&mut out, ImageFormat::Png)
        .map_err(|e| Error::Image(e.to_string()))?;
    Ok(out.into_inner())
}

/// Binary PGM (P5).
pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.data());
    out
}

/// Three interleaved planes as an RGB PNG.
pub fn encode_rgb_png(width: u32, height: u32, planes: [&[u8]; 3]) -> Result<Vec<u8>> {
    let n = width as usize * height as usize;
    if planes.iter().any(|p| p.len() != n) {
        return Err(Error::Image("plane size mismatch".into()));
    }
    let mut raw = Vec::with_capacity(n * 3);
    for ((a, b), c) in planes[0].iter().zip(planes[1]).zip(planes[2]) {
        raw.extend_from_slice(&[*a, *b, *c]);
    }
    let buf: image::ImageBuffer<Rgb<u8>, Vec<u8>> =
        image::ImageBuffer::from_raw(width, height, raw).expect("buffer sized from planes");
    let mut out = Cursor::new(Vec::new());
    buf.write_to(&mut out, ImageFormat::Png)
        .map_err(|e| Error::Image(e.to_string()))?;
    Ok(out.into_inner())
}

/// Writes PNG or PGM depending on the file extension (`.pgm` → P5, anything else → PNG).
pub fn write_gray(path: &Path, img: &GrayImage) -> Result<()> {
    let is_pgm = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
    let bytes = if is_pgm {
        encode_pgm(img)
    } else {
        encode_png(img)?
    };
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Binary masks are stored as grayscale with ink = 0 and background = 255.
pub fn write_binary(path: &Path, img: &BinaryImage) -> Result<()> {
    write_gray(path, &img.to_gray())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn png_and_pgm_round_trip() {
        let img = GrayImage::new(3, 2, vec![0, 10, 20, 200, 254, 255]).unwrap();
        assert_eq!(decode_gray(&encode_png(&img).unwrap()).unwrap(), img);
        assert_eq!(decode_gray(&encode_pgm(&img)).unwrap(), img);
    }

    #[test]
    fn garbage_is_an_error() {
        assert!(decode_gray(b"not an image").is_err());
    }
}
