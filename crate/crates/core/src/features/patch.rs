use crate::imaging::{BBox, BinaryMask, Blob};

pub const PATCH_SIDE: usize = 32;

/// 32x32 binary patch, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Patch32 {
    bits: [bool; PATCH_SIDE * PATCH_SIDE],
}

impl std::fmt::Debug for Patch32 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for y in 0..PATCH_SIDE {
            let row: String = (0..PATCH_SIDE).map(|x| if self.get(x, y) { '#' } else { '.' }).collect();
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

impl Default for Patch32 {
    fn default() -> Self {
        Self { bits: [false; PATCH_SIDE * PATCH_SIDE] }
    }
}

impl Patch32 {
    pub fn from_fn(mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut p = Self::default();
        for y in 0..PATCH_SIDE {
            for x in 0..PATCH_SIDE {
                p.bits[y * PATCH_SIDE + x] = f(x, y);
            }
        }
        p
    }

    pub fn filled() -> Self {
        Self::from_fn(|_, _| true)
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * PATCH_SIDE + x]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Quarter turn counter-clockwise in image coordinates.
    pub fn rotated_90(&self) -> Self {
        Self::from_fn(|x, y| self.get(PATCH_SIDE - 1 - y, x))
    }

    /// Gray levels (0/1) for co-occurrence counting.
    pub fn levels(&self) -> Vec<u8> {
        self.bits.iter().map(|&b| b as u8).collect()
    }
}

/// Resamples a rectangular region to 32x32 by nearest neighbor. The shorter
/// side is padded symmetrically with background so the aspect ratio holds.
/// `inside(x, y)` is queried in image coordinates and may be asked about
/// positions outside the region.
pub fn resize_region(bbox: BBox, inside: impl Fn(i32, i32) -> bool) -> Patch32 {
    let (w, h) = (bbox.width() as i64, bbox.height() as i64);
    let side = w.max(h);
    let x0 = bbox.x_min as i64 - (side - w) / 2;
    let y0 = bbox.y_min as i64 - (side - h) / 2;
    let n = PATCH_SIDE as i64;
    Patch32::from_fn(|u, v| {
        // center of output cell u maps to floor((u + 0.5) * side / 32)
        let sx = x0 + (2 * u as i64 + 1) * side / (2 * n);
        let sy = y0 + (2 * v as i64 + 1) * side / (2 * n);
        let in_box = sx >= bbox.x_min as i64
            && sx <= bbox.x_max as i64
            && sy >= bbox.y_min as i64
            && sy <= bbox.y_max as i64;
        in_box && inside(sx as i32, sy as i32)
    })
}

/// Blob crop resized to a 32x32 binary patch; only the blob's own pixels
/// are foreground.
pub fn resize_binary(mask: &BinaryMask, blob: &Blob) -> Patch32 {
    resize_region(blob.bbox(), |x, y| mask.get_or_bg(x as i64, y as i64) && blob.contains((x, y)))
}
