//! Full pipeline on one image: segmentation, Hough detection and, given a
//! model file, texture classification. Writes an annotated copy.
//!
//! cargo run --release --example detect_signs -- [image.png] [model.txt]

use signscan::eval::{draw_ellipse, run_pipeline, synth_scene, write_detections, PipelineConfig, SceneConfig};
use signscan::imaging::io::{load_rgb, save_rgb_png};
use signscan::learn::SignClassifier;

fn main() {
    let mut args = std::env::args().skip(1);
    let (mut img, id) = match args.next() {
        Some(path) => (load_rgb(&path).expect("readable image"), path),
        None => {
            let cfg = SceneConfig { n_signs: 2, seed: 12, ..SceneConfig::default() };
            (synth_scene(&cfg).expect("scene").0, cfg.image_id())
        }
    };
    let model = args.next().map(|p| SignClassifier::from_text(&std::fs::read_to_string(p).expect("model file")).expect("valid model"));

    let dets = run_pipeline(&img, &id, &PipelineConfig::default(), model.as_ref());
    write_detections(std::io::stdout().lock(), &dets).expect("stdout");
    for d in dets.iter().filter(|d| d.accepted) {
        draw_ellipse(&mut img, &d.ellipse, [0, 255, 0]);
    }
    save_rgb_png(&img, "detections.png").expect("write annotated image");
}
