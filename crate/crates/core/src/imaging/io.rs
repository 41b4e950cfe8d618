//! PNG / binary PPM reading and PNG writing.

use std::path::Path;

use image::{ImageFormat, ImageReader};
use thiserror::Error;

use super::{BinaryMask, RgbImage};

#[derive(Debug, Error)]
pub enum ImageIoError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot decode {path}: {source}")]
    Decode {
        path: String,
        #[source]
        source: image::ImageError,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: image::ImageError,
    },
}

/// Loads a PNG or binary PPM (P6) file as RGB.
pub fn load_rgb(path: impl AsRef<Path>) -> Result<RgbImage, ImageIoError> {
    let path = path.as_ref();
    let shown = path.display().to_string();
    let reader = ImageReader::open(path)
        .map_err(|source| ImageIoError::Read { path: shown.clone(), source })?
        .with_guessed_format()
        .map_err(|source| ImageIoError::Read { path: shown.clone(), source })?;
    let img = reader
        .decode()
        .map_err(|source| ImageIoError::Decode { path: shown, source })?
        .into_rgb8();
    let (w, h) = img.dimensions();
    Ok(RgbImage::new(w as usize, h as usize, img.into_raw()).expect("decoder yields consistent buffers"))
}

pub fn save_rgb_png(img: &RgbImage, path: impl AsRef<Path>) -> Result<(), ImageIoError> {
    let path = path.as_ref();
    let buf = image::RgbImage::from_raw(img.width() as u32, img.height() as u32, img.data().to_vec())
        .expect("buffer length checked at construction");
    buf.save_with_format(path, ImageFormat::Png)
        .map_err(|source| ImageIoError::Write { path: path.display().to_string(), source })
}

/// Writes binary PPM (P6).
pub fn save_rgb_ppm(img: &RgbImage, path: impl AsRef<Path>) -> Result<(), ImageIoError> {
    let path = path.as_ref();
    let mut bytes = format!("P6\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    bytes.extend_from_slice(img.data());
    std::fs::write(path, bytes).map_err(|e| ImageIoError::Write {
        path: path.display().to_string(),
        source: image::ImageError::IoError(e),
    })
}

/// Writes a mask as 8-bit grayscale PNG, 255 for foreground.
pub fn save_mask_png(mask: &BinaryMask, path: impl AsRef<Path>) -> Result<(), ImageIoError> {
    let path = path.as_ref();
    let raw = mask.data().iter().map(|&b| if b { 255u8 } else { 0 }).collect();
    let buf = image::GrayImage::from_raw(mask.width() as u32, mask.height() as u32, raw)
        .expect("buffer length checked at construction");
    buf.save_with_format(path, ImageFormat::Png)
        .map_err(|source| ImageIoError::Write { path: path.display().to_string(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn png_and_ppm_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut img = RgbImage::filled(5, 3, [10, 20, 30]).unwrap();
        img.put(4, 2, [255, 0, 7]);
        let png = dir.path().join("a.png");
        let ppm = dir.path().join("a.ppm");
        save_rgb_png(&img, &png).unwrap();
        save_rgb_ppm(&img, &ppm).unwrap();
        assert_eq!(load_rgb(&png).unwrap(), img);
        assert_eq!(load_rgb(&ppm).unwrap(), img);
        assert!(std::fs::read(&ppm).unwrap().starts_with(b"P6"));
    }

    #[test]
    fn missing_and_garbage_files() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(load_rgb(dir.path().join("nope.png")), Err(ImageIoError::Read { .. })));
        let junk = dir.path().join("junk.png");
        std::fs::write(&junk, b"not an image").unwrap();
        assert!(matches!(load_rgb(&junk), Err(ImageIoError::Decode { .. })));
    }
}
