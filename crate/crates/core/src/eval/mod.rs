//! Evaluation: ground-truth matching, precision/recall, synthetic scenes
//! and the end-to-end pipeline.

mod bench;
mod matching;
mod pipeline;
mod plot;
mod records;
mod synth;

pub use bench::{label_candidates, run_benchmark, run_scenes, training_rows, BenchConfig, BenchError, BenchReport, SceneRun};
pub use matching::{gate, match_detections, pr_curve, precision_at_recall, precision_recall, MatchCounts, PrPoint};
pub use pipeline::{
    candidate_patch, detect_candidates, draw_ellipse, ellipse_bbox, run_pipeline, score_candidates, Candidate, PipelineConfig,
};
pub use plot::render_pr_plot;
pub use records::{read_detections, read_ground_truth, write_detections, write_ground_truth, DetectionRecord, RecordError};
pub use synth::{
    scene_id, synth_distractor_scene, synth_scene, GroundTruth, SceneConfig, SceneError, SignColor, SignShape, MAX_SIGN_RADIUS,
    MIN_SIGN_RADIUS,
};
