//! Precision/recall of a detections file against ground truth, plus a
//! plotted curve.
//!
//! cargo run --example pr_curve -- detections.tsv ground_truth.tsv [plot.png]

use std::fs::File;
use std::io::BufReader;

use signscan::eval::{match_detections, pr_curve, precision_recall, read_detections, read_ground_truth, render_pr_plot};
use signscan::imaging::io::save_rgb_png;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.len() < 2 {
        eprintln!("usage: pr_curve <detections.tsv> <ground_truth.tsv> [plot.png]");
        std::process::exit(1);
    }
    let dets = read_detections(BufReader::new(File::open(&args[0]).expect("detections"))).expect("detections format");
    let gts = read_ground_truth(BufReader::new(File::open(&args[1]).expect("ground truth"))).expect("ground truth format");

    let accepted: Vec<_> = dets.iter().filter(|d| d.accepted).cloned().collect();
    let c = match_detections(&accepted, &gts);
    let (p, r) = precision_recall(c);
    println!("tp {} fp {} fn {} precision {p:.3} recall {r:.3}", c.tp, c.fp, c.fn_);

    let curve = pr_curve(&dets, &gts);
    for pt in curve.iter().step_by((curve.len() / 20).max(1)) {
        println!("{:>10.4} {:.3} {:.3}", pt.threshold, pt.precision, pt.recall);
    }
    let plot = args.get(2).cloned().unwrap_or_else(|| "pr.png".into());
    save_rgb_png(&render_pr_plot(&[(&curve, [200, 30, 30])], 400), &plot).expect("write plot");
}
