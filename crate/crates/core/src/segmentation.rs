//! Color segmentation: red/blue chromatic enhancement, a global mean + std
//! threshold, open/close cleanup and connected-component extraction.

use crate::imaging::{connected_components, morph_filter, BinaryMask, Blob, GrayImage, MorphOp, RgbImage};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EnhanceChannel {
    Red,
    Blue,
}

impl EnhanceChannel {
    pub const ALL: [EnhanceChannel; 2] = [EnhanceChannel::Red, EnhanceChannel::Blue];

    pub fn name(self) -> &'static str {
        match self {
            EnhanceChannel::Red => "red",
            EnhanceChannel::Blue => "blue",
        }
    }
}

impl std::str::FromStr for EnhanceChannel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "red" => Ok(EnhanceChannel::Red),
            "blue" => Ok(EnhanceChannel::Blue),
            other => Err(format!("unknown channel `{other}` (expected red or blue)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SegmentationConfig {
    /// Threshold is `mean + alpha * std` of the enhanced image.
    pub alpha: f64,
    pub morph_radius: usize,
    pub min_area: usize,
}

impl Default for SegmentationConfig {
    fn default() -> Self {
        Self { alpha: 4.0, morph_radius: 1, min_area: 50 }
    }
}

impl SegmentationConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(format!("alpha must be positive, got {}", self.alpha));
        }
        if self.morph_radius < 1 {
            return Err("morph_radius must be at least 1".into());
        }
        if self.min_area < 1 {
            return Err("min_area must be at least 1".into());
        }
        Ok(())
    }
}

/// Chromatic evidence of one pixel: how much the target channel exceeds the
/// larger of the other two, relative to total intensity.
pub fn enhance_pixel([r, g, b]: [u8; 3], ch: EnhanceChannel) -> f64 {
    let (r, g, b) = (r as i32, g as i32, b as i32);
    let sum = r + g + b;
    if sum == 0 {
        return 0.0;
    }
    let excess = match ch {
        EnhanceChannel::Red => (r - g).min(r - b),
        EnhanceChannel::Blue => (b - g).min(b - r),
    };
    (excess as f64 / sum as f64).max(0.0)
}

pub fn enhance_color(img: &RgbImage, ch: EnhanceChannel) -> GrayImage {
    let data = img.pixels().map(|px| enhance_pixel(px, ch)).collect();
    GrayImage::new(img.width(), img.height(), data).expect("enhancement stays in [0, 1]")
}

/// Global threshold `T = mean + alpha * std` (population std); strictly
/// greater pixels are foreground.
pub fn adaptive_threshold(gray: &GrayImage, alpha: f64) -> BinaryMask {
    let n = gray.data().len() as f64;
    let mean = gray.data().iter().sum::<f64>() / n;
    let var = gray.data().iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let t = mean + alpha * var.sqrt();
    BinaryMask::new(gray.width(), gray.height(), gray.data().iter().map(|&v| v > t).collect())
        .expect("same dimensions as input")
}

/// Full single-channel pass returning the cleaned mask alongside its blobs.
pub fn segment_mask(img: &RgbImage, ch: EnhanceChannel, cfg: &SegmentationConfig) -> (BinaryMask, Vec<Blob>) {
    let enhanced = enhance_color(img, ch);
    let raw = adaptive_threshold(&enhanced, cfg.alpha);
    let opened = morph_filter(&raw, MorphOp::Open, cfg.morph_radius);
    let cleaned = morph_filter(&opened, MorphOp::Close, cfg.morph_radius);
    let blobs = connected_components(&cleaned, cfg.min_area);
    (cleaned, blobs)
}

pub fn segment(img: &RgbImage, ch: EnhanceChannel, cfg: &SegmentationConfig) -> Vec<Blob> {
    segment_mask(img, ch, cfg).1
}
