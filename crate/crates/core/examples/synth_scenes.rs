//! Writes a few synthetic road scenes and their ground truth.
//!
//! cargo run --example synth_scenes -- <out_dir> [count]

use std::fs::File;

use signscan::eval::{synth_scene, write_ground_truth, SceneConfig};
use signscan::imaging::io::save_rgb_png;

fn main() {
    let mut args = std::env::args().skip(1);
    let out = args.next().unwrap_or_else(|| "scenes".into());
    let count: u64 = args.next().map_or(4, |s| s.parse().expect("count"));
    std::fs::create_dir_all(&out).expect("output dir");

    let mut all = Vec::new();
    for seed in 0..count {
        let cfg = SceneConfig::default().for_seed(seed);
        let (img, gts) = synth_scene(&cfg).expect("layout");
        save_rgb_png(&img, format!("{out}/{}.png", cfg.image_id())).expect("write png");
        for g in &gts {
            println!("{} {} {} at ({:.1}, {:.1}) r {:.1}", g.image_id, g.color.name(), g.shape.name(), g.center.0, g.center.1, g.radius);
        }
        all.extend(gts);
    }
    write_ground_truth(File::create(format!("{out}/ground_truth.tsv")).expect("gt file"), &all).expect("write gt");
}
