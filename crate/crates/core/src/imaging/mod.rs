//! Raster containers and the binary-mask machinery shared by every stage:
//! connected components, open/close morphology and boundary extraction.

mod components;
mod edges;
pub mod io;
mod morph;

pub use components::connected_components;
pub use edges::{extract_edges, EdgeSet};
pub use morph::{morph_filter, MorphOp};

use thiserror::Error;

/// Integer pixel coordinate `(x, y)`, `x` along columns.
pub type Pixel = (i32, i32);

#[derive(Debug, Error, PartialEq)]
pub enum RasterError {
    #[error("image dimensions must be at least 1x1, got {width}x{height}")]
    EmptyImage { width: usize, height: usize },
    #[error("buffer holds {actual} values, expected {expected}")]
    DataLength { expected: usize, actual: usize },
    #[error("gray value {value} at index {index} is outside [0, 1]")]
    GrayOutOfRange { index: usize, value: f64 },
}

fn check_dims(width: usize, height: usize, per_pixel: usize, len: usize) -> Result<(), RasterError> {
    if width == 0 || height == 0 {
        return Err(RasterError::EmptyImage { width, height });
    }
    let expected = width * height * per_pixel;
    if len != expected {
        return Err(RasterError::DataLength { expected, actual: len });
    }
    Ok(())
}

/// 8-bit RGB raster, row-major interleaved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self, RasterError> {
        check_dims(width, height, 3, data.len())?;
        Ok(Self { width, height, data })
    }

    /// Image filled with a single color.
    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Result<Self, RasterError> {
        let data = rgb.iter().copied().cycle().take(width * height * 3).collect();
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_raw(self) -> Vec<u8> {
        self.data
    }

    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn put(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = (y * self.width + x) * 3;
        self.data[i..i + 3].copy_from_slice(&rgb);
    }

    /// Writes `rgb` at a signed coordinate, ignoring anything off-frame.
    pub fn put_clipped(&mut self, x: i64, y: i64, rgb: [u8; 3]) {
        if x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height {
            self.put(x as usize, y as usize, rgb);
        }
    }

    pub fn pixels(&self) -> impl Iterator<Item = [u8; 3]> + '_ {
        self.data.chunks_exact(3).map(|c| [c[0], c[1], c[2]])
    }
}

/// Real-valued single channel raster with values in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self, RasterError> {
        check_dims(width, height, 1, data.len())?;
        if let Some((index, &value)) = data
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && (0.0..=1.0).contains(*v)))
        {
            return Err(RasterError::GrayOutOfRange { index, value });
        }
        Ok(Self { width, height, data })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }
}

/// Row-major boolean raster.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, data: Vec<bool>) -> Result<Self, RasterError> {
        check_dims(width, height, 1, data.len())?;
        Ok(Self { width, height, data })
    }

    pub fn empty(width: usize, height: usize) -> Result<Self, RasterError> {
        Self::new(width, height, vec![false; width * height])
    }

    /// Builds a mask by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> bool,
    ) -> Result<Self, RasterError> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    /// Reads a signed coordinate; off-frame pixels are background.
    pub fn get_or_bg(&self, x: i64, y: i64) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.data[y as usize * self.width + x as usize]
    }

    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.data[y * self.width + x] = v;
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }
}

/// Inclusive pixel bounding box.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BBox {
    pub x_min: i32,
    pub y_min: i32,
    pub x_max: i32,
    pub y_max: i32,
}

impl BBox {
    pub fn width(&self) -> i32 {
        self.x_max - self.x_min + 1
    }

    pub fn height(&self) -> i32 {
        self.y_max - self.y_min + 1
    }

    pub fn contains(&self, (x, y): Pixel) -> bool {
        x >= self.x_min && x <= self.x_max && y >= self.y_min && y <= self.y_max
    }

    /// Smallest box containing every pixel; `None` for an empty iterator.
    pub fn enclosing(pixels: impl IntoIterator<Item = Pixel>) -> Option<Self> {
        pixels.into_iter().fold(None, |acc, (x, y)| {
            Some(match acc {
                None => BBox { x_min: x, y_min: y, x_max: x, y_max: y },
                Some(b) => BBox {
                    x_min: b.x_min.min(x),
                    y_min: b.y_min.min(y),
                    x_max: b.x_max.max(x),
                    y_max: b.y_max.max(y),
                },
            })
        })
    }
}

/// A connected foreground region.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Blob {
    pixels: Vec<Pixel>,
    bbox: BBox,
}

impl Blob {
    /// Wraps a pixel list, sorting it row-major. Returns `None` when empty.
    /// Connectivity is the caller's responsibility.
    pub fn from_pixels(mut pixels: Vec<Pixel>) -> Option<Self> {
        pixels.sort_unstable_by_key(|&(x, y)| (y, x));
        pixels.dedup();
        let bbox = BBox::enclosing(pixels.iter().copied())?;
        Some(Self { pixels, bbox })
    }

    pub fn pixels(&self) -> &[Pixel] {
        &self.pixels
    }

    pub fn bbox(&self) -> BBox {
        self.bbox
    }

    pub fn area(&self) -> usize {
        self.pixels.len()
    }

    pub fn contains(&self, p: Pixel) -> bool {
        self.bbox.contains(p) && self.pixels.binary_search_by_key(&(p.1, p.0), |&(x, y)| (y, x)).is_ok()
    }
}

pub(crate) const NEIGHBORS_8: [(i32, i32); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors_validate_lengths() {
        assert!(RgbImage::new(2, 2, vec![0; 12]).is_ok());
        assert_eq!(
            RgbImage::new(2, 2, vec![0; 11]),
            Err(RasterError::DataLength { expected: 12, actual: 11 })
        );
        assert_eq!(
            BinaryMask::new(0, 3, vec![]),
            Err(RasterError::EmptyImage { width: 0, height: 3 })
        );
        assert!(matches!(
            GrayImage::new(1, 2, vec![0.5, 1.5]),
            Err(RasterError::GrayOutOfRange { index: 1, .. })
        ));
        assert!(GrayImage::new(1, 1, vec![f64::NAN]).is_err());
    }

    #[test]
    fn blob_membership() {
        let b = Blob::from_pixels(vec![(3, 1), (1, 1), (2, 2)]).unwrap();
        assert_eq!(b.bbox(), BBox { x_min: 1, y_min: 1, x_max: 3, y_max: 2 });
        assert!(b.contains((2, 2)));
        assert!(!b.contains((2, 1)));
        assert!(Blob::from_pixels(vec![]).is_none());
    }
}
