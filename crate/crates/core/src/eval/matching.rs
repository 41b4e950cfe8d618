//! Greedy detection-to-ground-truth matching and precision/recall curves.

use std::collections::HashMap;
use std::ops::Add;

use super::{DetectionRecord, GroundTruth};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MatchCounts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl Add for MatchCounts {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { tp: self.tp + o.tp, fp: self.fp + o.fp, fn_: self.fn_ + o.fn_ }
    }
}

impl std::iter::Sum for MatchCounts {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::default(), Add::add)
    }
}

pub const CENTER_GATE: f64 = 0.5;
pub const SIZE_GATE: (f64, f64) = (0.6, 1.4);

/// Whether `det` is close enough to `gt` in center and size to count as a hit.
pub fn gate(det: &DetectionRecord, gt: &GroundTruth) -> bool {
    let e = &det.ellipse;
    let dist = (e.center.0 - gt.center.0).hypot(e.center.1 - gt.center.1);
    let ratio = e.semi_major.max(e.semi_minor) / gt.radius;
    dist <= CENTER_GATE * gt.radius && (SIZE_GATE.0..=SIZE_GATE.1).contains(&ratio)
}

/// Indices of detections in descending score order; equal scores keep
/// input order.
fn score_order(dets: &[DetectionRecord]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..dets.len()).collect();
    order.sort_by(|&a, &b| dets[b].svm_score.total_cmp(&dets[a].svm_score));
    order
}

/// For each detection in `order`, whether it claimed a ground truth. Each
/// detection takes the nearest unmatched gated ground truth of its image.
fn greedy(dets: &[DetectionRecord], gts: &[GroundTruth], order: &[usize]) -> Vec<bool> {
    let mut by_image: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, g) in gts.iter().enumerate() {
        by_image.entry(g.image_id.as_str()).or_default().push(i);
    }
    let mut taken = vec![false; gts.len()];
    order
        .iter()
        .map(|&di| {
            let d = &dets[di];
            let Some(cands) = by_image.get(d.image_id.as_str()) else { return false };
            let best = cands
                .iter()
                .copied()
                .filter(|&gi| !taken[gi] && gate(d, &gts[gi]))
                .min_by(|&a, &b| {
                    let dist = |g: &GroundTruth| (d.ellipse.center.0 - g.center.0).hypot(d.ellipse.center.1 - g.center.1);
                    dist(&gts[a]).total_cmp(&dist(&gts[b]))
                });
            match best {
                Some(gi) => {
                    taken[gi] = true;
                    true
                }
                None => false,
            }
        })
        .collect()
}

/// Greedy one-to-one matching of all given detections in descending score.
pub fn match_detections(dets: &[DetectionRecord], gts: &[GroundTruth]) -> MatchCounts {
    let hits = greedy(dets, gts, &score_order(dets));
    let tp = hits.iter().filter(|&&h| h).count();
    MatchCounts { tp, fp: dets.len() - tp, fn_: gts.len() - tp }
}

/// `(precision, recall)` with empty denominators read as 1.
pub fn precision_recall(c: MatchCounts) -> (f64, f64) {
    let ratio = |num: usize, den: usize| if den == 0 { 1.0 } else { num as f64 / den as f64 };
    (ratio(c.tp, c.tp + c.fp), ratio(c.tp, c.tp + c.fn_))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrPoint {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
}

/// Precision/recall at `+inf` and at every distinct score, threshold
/// descending. A threshold admits detections scoring at least it.
///
/// Greedy matching visits detections in score order, so the matching of a
/// score prefix is the prefix of the full matching; one pass suffices.
pub fn pr_curve(dets: &[DetectionRecord], gts: &[GroundTruth]) -> Vec<PrPoint> {
    let order = score_order(dets);
    let hits = greedy(dets, gts, &order);
    let point = |threshold: f64, tp: usize, n: usize| {
        let (precision, recall) = precision_recall(MatchCounts { tp, fp: n - tp, fn_: gts.len() - tp });
        PrPoint { threshold, precision, recall }
    };
    let mut curve = vec![point(f64::INFINITY, 0, 0)];
    let mut tp = 0;
    for (k, (&di, &hit)) in order.iter().zip(&hits).enumerate() {
        tp += hit as usize;
        let score = dets[di].svm_score;
        let last_of_score = order.get(k + 1).is_none_or(|&next| dets[next].svm_score != score);
        if last_of_score && score != f64::INFINITY {
            curve.push(point(score, tp, k + 1));
        } else if last_of_score {
            curve[0] = point(score, tp, k + 1);
        }
    }
    curve
}

/// Interpolated precision: the best precision among points reaching at
/// least `recall`, or 0 if none does.
pub fn precision_at_recall(curve: &[PrPoint], recall: f64) -> f64 {
    curve.iter().filter(|p| p.recall >= recall).map(|p| p.precision).fold(0.0, f64::max)
}
