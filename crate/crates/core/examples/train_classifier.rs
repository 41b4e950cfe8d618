//! Trains the sign/non-sign classifier on synthetic scenes and saves it.
//!
//! cargo run --release --example train_classifier [-- model.txt]

use signscan::eval::{run_scenes, training_rows, PipelineConfig, SceneConfig};
use signscan::learn::{Label, SignClassifier, TrainConfig};

fn main() {
    let out = std::env::args().nth(1).unwrap_or_else(|| "model.txt".into());
    let runs = run_scenes(&SceneConfig::default(), 10_000..10_100, &PipelineConfig::default(), None).expect("scenes");
    let rows = training_rows(&runs);
    let model = SignClassifier::train(&rows, &TrainConfig::default()).expect("training");

    let correct = rows.iter().filter(|(f, l)| model.decide(f).1 == *l).count();
    let signs = rows.iter().filter(|r| r.1 == Label::Sign).count();
    println!("{} rows ({signs} signs), {} components kept", rows.len(), model.pca.output_dim());
    println!("training accuracy {:.3}", correct as f64 / rows.len() as f64);
    std::fs::write(&out, model.to_text()).expect("write model");
    println!("saved {out}");
}
