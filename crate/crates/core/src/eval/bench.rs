//! Paired comparison of the bare detector against detector plus classifier
//! on seeded synthetic scenes.

use std::ops::Range;

use rayon::prelude::*;

use super::matching::{gate, match_detections, pr_curve, MatchCounts, PrPoint};
use super::pipeline::{detect_candidates, score_candidates, Candidate, PipelineConfig};
use super::synth::{synth_scene, GroundTruth, SceneConfig, SceneError};
use super::DetectionRecord;
use crate::features::FeatureVector;
use crate::learn::{Label, LearnError, SignClassifier, TrainConfig};

#[derive(Clone, Debug, thiserror::Error)]
pub enum BenchError {
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error("thread pool: {0}")]
    Threads(String),
}

/// Candidates and ground truth of one generated scene.
pub struct SceneRun {
    pub image_id: String,
    pub candidates: Vec<Candidate>,
    pub ground_truth: Vec<GroundTruth>,
}

/// Generates and processes scenes `seeds` in parallel; results come back in
/// seed order whatever the thread count.
pub fn run_scenes(
    template: &SceneConfig,
    seeds: Range<u64>,
    pipeline: &PipelineConfig,
    threads: Option<usize>,
) -> Result<Vec<SceneRun>, BenchError> {
    let work = || {
        seeds
            .clone()
            .into_par_iter()
            .map(|seed| {
                let cfg = template.for_seed(seed);
                let (img, ground_truth) = synth_scene(&cfg)?;
                Ok(SceneRun { image_id: cfg.image_id(), candidates: detect_candidates(&img, pipeline), ground_truth })
            })
            .collect::<Result<Vec<_>, BenchError>>()
    };
    match threads {
        None => work(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| BenchError::Threads(e.to_string()))?
            .install(work),
    }
}

/// Training labels for one scene. For each ground truth, the gated
/// candidate whose size is closest to it is a sign. Other gated candidates
/// (concentric duplicates on the same sign) are ambiguous and get `None`;
/// candidates gated to no sign are not signs.
pub fn label_candidates(cands: &[Candidate], gts: &[GroundTruth]) -> Vec<Option<Label>> {
    let probe = |c: &Candidate, g: &GroundTruth| {
        gate(&DetectionRecord { image_id: g.image_id.clone(), ellipse: c.ellipse, svm_score: 0.0, accepted: true }, g)
    };
    let mut labels: Vec<Option<Label>> =
        cands.iter().map(|c| if gts.iter().any(|g| probe(c, g)) { None } else { Some(Label::NonSign) }).collect();
    for g in gts {
        let best = cands
            .iter()
            .enumerate()
            .filter(|(_, c)| probe(c, g))
            .min_by(|(_, a), (_, b)| {
                let off = |c: &Candidate| (c.ellipse.semi_major.max(c.ellipse.semi_minor) / g.radius - 1.0).abs();
                off(a).total_cmp(&off(b))
            });
        if let Some((i, _)) = best {
            labels[i] = Some(Label::Sign);
        }
    }
    labels
}

pub fn training_rows(runs: &[SceneRun]) -> Vec<(FeatureVector, Label)> {
    runs.iter()
        .flat_map(|r| {
            let labels = label_candidates(&r.candidates, &r.ground_truth);
            r.candidates.iter().zip(labels).filter_map(|(c, l)| Some((c.features, l?))).collect::<Vec<_>>()
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub scene: SceneConfig,
    pub train_seeds: Range<u64>,
    pub test_seeds: Range<u64>,
    pub pipeline: PipelineConfig,
    pub train: TrainConfig,
    pub threads: Option<usize>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            scene: SceneConfig::default(),
            train_seeds: 10_000..10_300,
            test_seeds: 0..200,
            pipeline: PipelineConfig::default(),
            train: TrainConfig::default(),
            threads: None,
        }
    }
}

pub struct BenchReport {
    pub classifier: SignClassifier,
    pub ground_truth: Vec<GroundTruth>,
    pub rht_only: Vec<DetectionRecord>,
    pub full: Vec<DetectionRecord>,
}

impl BenchReport {
    pub fn rht_only_counts(&self) -> MatchCounts {
        match_detections(&self.rht_only, &self.ground_truth)
    }

    /// Counts over the classifier-accepted detections.
    pub fn full_counts(&self) -> MatchCounts {
        let accepted: Vec<DetectionRecord> = self.full.iter().filter(|d| d.accepted).cloned().collect();
        match_detections(&accepted, &self.ground_truth)
    }

    pub fn rht_only_curve(&self) -> Vec<PrPoint> {
        pr_curve(&self.rht_only, &self.ground_truth)
    }

    pub fn full_curve(&self) -> Vec<PrPoint> {
        pr_curve(&self.full, &self.ground_truth)
    }
}

/// Trains on `train_seeds`, then scores `test_seeds` both ways.
pub fn run_benchmark(cfg: &BenchConfig) -> Result<BenchReport, BenchError> {
    let train_runs = run_scenes(&cfg.scene, cfg.train_seeds.clone(), &cfg.pipeline, cfg.threads)?;
    let classifier = SignClassifier::train(&training_rows(&train_runs), &cfg.train)?;
    let test_runs = run_scenes(&cfg.scene, cfg.test_seeds.clone(), &cfg.pipeline, cfg.threads)?;
    let mut report = BenchReport { classifier, ground_truth: Vec::new(), rht_only: Vec::new(), full: Vec::new() };
    for run in &test_runs {
        report.ground_truth.extend(run.ground_truth.iter().cloned());
        report.rht_only.extend(score_candidates(&run.image_id, &run.candidates, None));
        report.full.extend(score_candidates(&run.image_id, &run.candidates, Some(&report.classifier)));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{SignColor, SignShape};
    use crate::features::FeatureVector;
    use crate::rht::EllipseParams;

    fn cand(x: f64, r: f64) -> Candidate {
        Candidate {
            channel: crate::segmentation::EnhanceChannel::Red,
            ellipse: EllipseParams::circle((x, 50.0), r),
            features: FeatureVector::from_array([0.0; 6]),
        }
    }

    #[test]
    fn labels_best_fit_and_skips_duplicates() {
        let g = GroundTruth { image_id: "s".into(), center: (50.0, 50.0), radius: 20.0, shape: SignShape::Circle, color: SignColor::Red };
        let cands = [cand(50.0, 16.0), cand(50.0, 19.5), cand(200.0, 20.0), cand(50.0, 5.0)];
        let labels = label_candidates(&cands, &[g]);
        assert_eq!(labels, vec![None, Some(Label::Sign), Some(Label::NonSign), Some(Label::NonSign)]);
    }

    #[test]
    fn scene_runs_ignore_thread_count() {
        let tmpl = SceneConfig::default();
        let a = run_scenes(&tmpl, 0..4, &PipelineConfig::default(), Some(1)).unwrap();
        let b = run_scenes(&tmpl, 0..4, &PipelineConfig::default(), Some(3)).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.image_id, y.image_id);
            assert_eq!(x.candidates, y.candidates);
        }
    }
}
