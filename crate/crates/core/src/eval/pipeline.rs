//! End-to-end detection: segmentation, RHT per blob, texture features and
//! the optional classifier.

use super::DetectionRecord;
use crate::features::{feature_vector, resize_region, FeatureVector, Patch32};
use crate::imaging::{extract_edges, BBox, BinaryMask, Blob, RgbImage};
use crate::learn::{Label, SignClassifier};
use crate::rht::{rht_detect, EllipseParams, RhtConfig};
use crate::segmentation::{segment_mask, EnhanceChannel, SegmentationConfig};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PipelineConfig {
    pub segmentation: SegmentationConfig,
    pub rht: RhtConfig,
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), String> {
        self.segmentation.validate()?;
        self.rht.validate()
    }
}

/// One RHT ellipse with the texture descriptor of its region.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub channel: EnhanceChannel,
    pub ellipse: EllipseParams,
    pub features: FeatureVector,
}

/// Bounding box of the ellipse, rounded outward to pixels.
pub fn ellipse_bbox(e: &EllipseParams) -> BBox {
    let (hx, hy) = e.half_extents();
    BBox {
        x_min: (e.center.0 - hx).floor() as i32,
        y_min: (e.center.1 - hy).floor() as i32,
        x_max: (e.center.0 + hx).ceil() as i32,
        y_max: (e.center.1 + hy).ceil() as i32,
    }
}

/// The ellipse's bounding box resampled to 32x32. Foreground is the source
/// blob's mask restricted to the ellipse interior, so a detection on the
/// inner edge of a rim sees an almost empty disk.
pub fn candidate_patch(mask: &BinaryMask, blob: &Blob, e: &EllipseParams) -> Patch32 {
    let conic = e.to_conic();
    resize_region(ellipse_bbox(e), |x, y| {
        conic.form((x as f64, y as f64)) <= 1.0 && mask.get_or_bg(x as i64, y as i64) && blob.contains((x, y))
    })
}

/// Segments red then blue, runs the detector on every blob and describes
/// each hit. Blob `k` (counted across both channels) seeds its detector
/// with `rng_seed ^ k`.
pub fn detect_candidates(img: &RgbImage, cfg: &PipelineConfig) -> Vec<Candidate> {
    let mut out = Vec::new();
    let mut blob_index = 0u64;
    for channel in EnhanceChannel::ALL {
        let (mask, blobs) = segment_mask(img, channel, &cfg.segmentation);
        for blob in &blobs {
            let edges = extract_edges(&mask, blob);
            let rht = RhtConfig { rng_seed: cfg.rht.rng_seed ^ blob_index, ..cfg.rht };
            blob_index += 1;
            for ellipse in rht_detect(&edges, &rht) {
                let features = feature_vector(&candidate_patch(&mask, blob, &ellipse));
                out.push(Candidate { channel, ellipse, features });
            }
        }
    }
    out
}

/// Scores candidates. Without a classifier every candidate is accepted and
/// scored by its support.
pub fn score_candidates(image_id: &str, cands: &[Candidate], classifier: Option<&SignClassifier>) -> Vec<DetectionRecord> {
    cands
        .iter()
        .map(|c| {
            let (svm_score, accepted) = match classifier {
                Some(clf) => {
                    let (s, l) = clf.decide(&c.features);
                    (s, l == Label::Sign)
                }
                None => (c.ellipse.support, true),
            };
            DetectionRecord { image_id: image_id.to_string(), ellipse: c.ellipse, svm_score, accepted }
        })
        .collect()
}

pub fn run_pipeline(
    img: &RgbImage,
    image_id: &str,
    cfg: &PipelineConfig,
    classifier: Option<&SignClassifier>,
) -> Vec<DetectionRecord> {
    score_candidates(image_id, &detect_candidates(img, cfg), classifier)
}

/// Draws the outline of `e` with a 1-pixel pen.
pub fn draw_ellipse(img: &mut RgbImage, e: &EllipseParams, rgb: [u8; 3]) {
    let steps = (e.perimeter() * 2.0).ceil().max(16.0) as usize;
    for i in 0..steps {
        let (x, y) = e.point_at(i as f64 * std::f64::consts::TAU / steps as f64);
        img.put_clipped(x.round() as i64, y.round() as i64, rgb);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{match_detections, synth_scene, SceneConfig};

    #[test]
    fn blank_image_has_no_detections() {
        let img = RgbImage::filled(120, 90, [128, 128, 128]).unwrap();
        assert!(run_pipeline(&img, "blank", &PipelineConfig::default(), None).is_empty());
    }

    #[test]
    fn noiseless_single_sign_is_recovered() {
        for seed in 0..6 {
            let cfg = SceneConfig { n_signs: 1, n_distractors: 0, noise_level: 0.0, seed, ..Default::default() };
            let (img, gts) = synth_scene(&cfg).unwrap();
            let dets = run_pipeline(&img, &cfg.image_id(), &PipelineConfig::default(), None);
            let g = &gts[0];
            let best = dets
                .iter()
                .map(|d| (d.ellipse.center.0 - g.center.0).hypot(d.ellipse.center.1 - g.center.1))
                .fold(f64::INFINITY, f64::min);
            assert!(best <= 2.0, "seed {seed}: {best}");
            assert_eq!(match_detections(&dets, &gts).tp, 1);
        }
    }

    #[test]
    fn patch_is_clipped_to_the_ellipse() {
        let ring = |x: usize, y: usize| {
            let d = (x as f64 - 40.0).hypot(y as f64 - 40.0);
            (16.0..=24.0).contains(&d)
        };
        let mask = BinaryMask::from_fn(80, 80, ring).unwrap();
        let blob = crate::imaging::connected_components(&mask, 1).remove(0);
        let outer = candidate_patch(&mask, &blob, &EllipseParams::circle((40.0, 40.0), 24.0));
        assert!(outer.get(16, 1) && outer.get(1, 16) && !outer.get(16, 16));
        assert!(!outer.get(0, 0) && !outer.get(31, 31));
        // the inner-edge fit only keeps a thin band of the rim
        let inner = candidate_patch(&mask, &blob, &EllipseParams::circle((40.0, 40.0), 16.0));
        assert!(inner.count() * 4 < outer.count(), "{} vs {}", inner.count(), outer.count());
    }
}
