//! Detector alone vs detector plus texture classifier on 200 synthetic
//! scenes.
//!
//! cargo run --release --example benchmark [-- <n_distractors>]

use std::time::Instant;

use signscan::eval::{precision_at_recall, precision_recall, run_benchmark, BenchConfig, SceneConfig};

fn main() {
    let n_distractors = std::env::args().nth(1).map_or(3, |s| s.parse().expect("distractor count"));
    let cfg = BenchConfig { scene: SceneConfig { n_distractors, ..SceneConfig::default() }, ..BenchConfig::default() };
    let start = Instant::now();
    let report = run_benchmark(&cfg).expect("benchmark");
    println!("elapsed {:.1}s", start.elapsed().as_secs_f64());

    for (name, c) in [("rht-only", report.rht_only_counts()), ("rht+texture", report.full_counts())] {
        let (p, r) = precision_recall(c);
        println!("{name:12} tp {:4} fp {:4} fn {:4} precision {p:.3} recall {r:.3}", c.tp, c.fp, c.fn_);
    }
    let (base, full) = (report.rht_only_curve(), report.full_curve());
    for anchor in [0.8, 0.84, 0.88, 0.92, 0.96] {
        println!(
            "recall {anchor:.2}: precision {:.3} -> {:.3}",
            precision_at_recall(&base, anchor),
            precision_at_recall(&full, anchor)
        );
    }
}
