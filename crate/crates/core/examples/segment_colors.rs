//! Red and blue chromatic segmentation of one image.
//!
//! cargo run --example segment_colors [-- image.png]

use signscan::eval::{synth_scene, SceneConfig};
use signscan::imaging::io::{load_rgb, save_mask_png};
use signscan::segmentation::{segment_mask, EnhanceChannel, SegmentationConfig};

fn main() {
    let img = match std::env::args().nth(1) {
        Some(path) => load_rgb(path).expect("readable image"),
        None => synth_scene(&SceneConfig { n_signs: 3, seed: 1, ..SceneConfig::default() }).expect("scene").0,
    };
    let cfg = SegmentationConfig::default();
    for ch in [EnhanceChannel::Red, EnhanceChannel::Blue] {
        let (mask, blobs) = segment_mask(&img, ch, &cfg);
        println!("{}: {} foreground pixels, {} blobs", ch.name(), mask.count(), blobs.len());
        for b in &blobs {
            let bb = b.bbox();
            println!("  [{}, {}] .. [{}, {}] area {}", bb.x_min, bb.y_min, bb.x_max, bb.y_max, b.area());
        }
        save_mask_png(&mask, format!("mask_{}.png", ch.name())).expect("write mask");
    }
}
