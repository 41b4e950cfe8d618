//! End-to-end acceptance checks. Each test prints one PASS/FAIL line.
//!
//! cargo test --release --test acceptance -- --nocapture

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use signscan::eval::{precision_at_recall, precision_recall, run_benchmark, run_scenes, BenchConfig, BenchReport, PipelineConfig};
use signscan::features::{
    compute_glcm, glcm_from_levels, haralick_features, pseudo_zernike, Glcm, Patch32, DEFAULT_OFFSETS, PATCH_SIDE,
};
use signscan::imaging::EdgeSet;
use signscan::learn::{pca_fit, pca_project, pca_reconstruct, svm_objective, svm_train, Label, LabeledSample, SvmModel};
use signscan::rht::{fit_conic, rht_detect, EllipseParams, RhtConfig};

fn report(id: u32, name: &str, ok: bool, detail: String) {
    println!("{} criterion {id} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
}

struct Bench {
    report: BenchReport,
    elapsed: Duration,
}

fn bench() -> &'static Bench {
    static BENCH: OnceLock<Bench> = OnceLock::new();
    BENCH.get_or_init(|| {
        let start = Instant::now();
        let report = run_benchmark(&BenchConfig::default()).expect("benchmark runs");
        Bench { report, elapsed: start.elapsed() }
    })
}

#[test]
fn c1_recall_on_synthetic_scenes() {
    let b = bench();
    let c = b.report.full_counts();
    let (_, recall) = precision_recall(c);
    let scenes = b.report.ground_truth.iter().map(|g| &g.image_id).collect::<std::collections::BTreeSet<_>>().len();
    let ok = recall >= 0.95 && b.elapsed < Duration::from_secs(300) && scenes == 200;
    report(
        1,
        "recall",
        ok,
        format!("recall {recall:.4} (tp {} fn {}) over {scenes} scenes in {:.1}s", c.tp, c.fn_, b.elapsed.as_secs_f64()),
    );
    assert!(ok);
}

#[test]
fn c2_false_detection_reduction() {
    let b = bench();
    let base = b.report.rht_only_counts().fp;
    let full = b.report.full_counts().fp;
    let ok = base >= 20 && full as f64 <= 0.6 * base as f64;
    report(2, "false detections", ok, format!("fp {full} vs {base} without texture (ratio {:.3})", full as f64 / base as f64));
    assert!(ok);
}

#[test]
fn c3_pr_dominance() {
    let b = bench();
    let (base, full) = (b.report.rht_only_curve(), b.report.full_curve());
    let mut ok = true;
    let mut detail = Vec::new();
    for anchor in [0.80, 0.84, 0.88, 0.92, 0.96] {
        let (pb, pf) = (precision_at_recall(&base, anchor), precision_at_recall(&full, anchor));
        ok &= pf + 0.02 >= pb;
        detail.push(format!("r{anchor:.2} {pf:.3}/{pb:.3}"));
    }
    report(3, "pr dominance", ok, detail.join(", "));
    assert!(ok);
}

fn outline(e: &EllipseParams) -> Vec<(i32, i32)> {
    let steps = (e.perimeter() * 8.0) as usize;
    (0..steps)
        .map(|i| {
            let t = i as f64 / steps as f64 * 2.0 * PI;
            let (c, s) = (e.theta.cos(), e.theta.sin());
            let (u, v) = (e.semi_major * t.cos(), e.semi_minor * t.sin());
            ((e.center.0 + u * c - v * s).round() as i32, (e.center.1 + u * s + v * c).round() as i32)
        })
        .collect()
}

#[test]
fn c4_rht_recovery_and_exact_conic() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut recovered = 0;
    for i in 0..100u64 {
        let a: f64 = rng.random_range(10.0..=40.0);
        let b: f64 = rng.random_range((a / 1.5).max(10.0)..=a);
        let truth = EllipseParams::new((rng.random_range(60.0..140.0), rng.random_range(60.0..140.0)), a, b, rng.random_range(0.0..PI));
        let edges = EdgeSet::new(outline(&truth));
        let found = rht_detect(&edges, &RhtConfig { rng_seed: i, ..RhtConfig::default() });
        let hit = found.iter().any(|e| {
            let dc = (e.center.0 - truth.center.0).hypot(e.center.1 - truth.center.1);
            dc <= 2.0 && (e.semi_major - a).abs() <= 0.05 * a && (e.semi_minor - b).abs() <= 0.05 * b
        });
        recovered += hit as usize;
    }

    let mut worst = 0.0f64;
    let mut trials = 0;
    while trials < 1000 {
        let a: f64 = rng.random_range(3.0..60.0);
        let b: f64 = rng.random_range(3.0..60.0);
        let th: f64 = rng.random_range(0.0..PI);
        let (c, s) = (th.cos(), th.sin());
        // centered conic coefficients from the rotated axes
        let (ia, ib) = (1.0 / (a * a), 1.0 / (b * b));
        let k = (ia * c * c + ib * s * s, (ia - ib) * c * s, ia * s * s + ib * c * c);
        let ts: [f64; 3] = [rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..2.0 * PI)];
        let apart = |x: f64, y: f64| {
            let d = (x - y).rem_euclid(PI);
            d.min(PI - d) > 0.2
        };
        if !(apart(ts[0], ts[1]) && apart(ts[1], ts[2]) && apart(ts[0], ts[2])) {
            continue;
        }
        let p = ts.map(|t| {
            let (u, v) = (a * t.cos(), b * t.sin());
            (u * c - v * s, u * s + v * c)
        });
        let got = fit_conic(p[0], p[1], p[2]).expect("points on an ellipse");
        let scale = k.0.abs().max(k.1.abs()).max(k.2.abs());
        let err = [(got.0 - k.0).abs(), (got.1 - k.1).abs(), (got.2 - k.2).abs()].into_iter().fold(0.0, f64::max) / scale;
        worst = worst.max(err);
        trials += 1;
    }
    let ok = recovered >= 99 && worst <= 1e-9;
    report(4, "rht recovery", ok, format!("{recovered}/100 ellipses recovered, worst relative conic error {worst:.2e} over {trials} triples"));
    assert!(ok);
}

/// Enumerates every pixel pair and keeps the ones an offset connects.
fn glcm_oracle(w: usize, h: usize, levels: &[u8], n: usize) -> Vec<f64> {
    let mut counts = vec![0.0; n * n];
    for p in 0..w * h {
        for q in 0..w * h {
            let (dx, dy) = ((q % w) as i32 - (p % w) as i32, (q / w) as i32 - (p / w) as i32);
            for &(ox, oy) in &DEFAULT_OFFSETS {
                if (dx, dy) == (ox, oy) {
                    let (i, j) = (levels[p] as usize, levels[q] as usize);
                    counts[i * n + j] += 1.0;
                    counts[j * n + i] += 1.0;
                }
            }
        }
    }
    let total: f64 = counts.iter().sum();
    counts.iter().map(|c| c / total).collect()
}

fn haralick_oracle(p: &[f64], n: usize) -> [f64; 4] {
    let at = |i: usize, j: usize| p[i * n + j];
    let (mut mx, mut my) = (0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            mx += i as f64 * at(i, j);
            my += j as f64 * at(i, j);
        }
    }
    let (mut sx, mut sy, mut cov, mut hom, mut var, mut dv) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let (di, dj) = (i as f64 - mx, j as f64 - my);
            sx += di * di * at(i, j);
            sy += dj * dj * at(i, j);
            cov += di * dj * at(i, j);
            hom += at(i, j) * at(i, j);
            var += di * di * at(i, j);
            let k = i as f64 - j as f64;
            dv += k * k * at(i, j);
        }
    }
    let corr = if sx > 0.0 && sy > 0.0 { cov / (sx.sqrt() * sy.sqrt()) } else { 0.0 };
    [hom, corr, var, dv]
}

#[test]
fn c5_glcm_and_haralick_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for t in 0..500 {
        let side = if t % 2 == 0 { 8 } else { 32 };
        let n = [2, 4, 8][t % 3];
        let fill: f64 = rng.random_range(0.1..0.9);
        let levels: Vec<u8> = if n == 2 {
            (0..side * side).map(|_| rng.random_bool(fill) as u8).collect()
        } else {
            (0..side * side).map(|_| rng.random_range(0..n as u8)).collect()
        };
        let g = if side == PATCH_SIDE && n == 2 {
            compute_glcm(&Patch32::from_fn(|x, y| levels[y * side + x] == 1), &DEFAULT_OFFSETS)
        } else {
            glcm_from_levels(side, side, &levels, n, &DEFAULT_OFFSETS).expect("valid grid")
        };
        let want = glcm_oracle(side, side, &levels, n);
        for (a, b) in g.matrix().iter().zip(&want) {
            worst = worst.max((a - b).abs());
        }
        let h = haralick_features(&g);
        for (a, b) in [h.hom, h.corr, h.var, h.diff_var].iter().zip(haralick_oracle(&want, n)) {
            worst = worst.max((a - b).abs());
        }
    }

    let board = glcm_from_levels(2, 2, &[0, 1, 1, 0], 2, &[(1, 0)]).expect("valid grid");
    let hb = haralick_features(&board);
    let exact = board.matrix() == [0.0, 0.5, 0.5, 0.0] && (hb.hom, hb.corr, hb.var, hb.diff_var) == (0.5, -1.0, 0.25, 1.0);
    let from_probs = Glcm::from_probabilities(2, vec![0.0, 0.5, 0.5, 0.0]).map(|g| haralick_features(&g));
    let exact = exact && from_probs == Some(hb);

    let ok = worst <= 1e-12 && exact;
    report(5, "glcm oracle", ok, format!("max deviation {worst:.2e} over 500 patches, checkerboard exact: {exact}"));
    assert!(ok);
}

#[test]
fn c6_moment_checks() {
    let full = Patch32::filled();
    let z00 = pseudo_zernike(&full, 0, 0).unwrap().norm();
    let z10 = pseudo_zernike(&full, 1, 0).unwrap().norm();

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for t in 0..100 {
        let patch = if t % 2 == 0 {
            let fill: f64 = rng.random_range(0.1..0.9);
            Patch32::from_fn(|_, _| rng.random_bool(fill))
        } else {
            let e = EllipseParams::new(
                (rng.random_range(8.0..24.0), rng.random_range(8.0..24.0)),
                rng.random_range(4.0..14.0),
                rng.random_range(3.0..10.0),
                rng.random_range(0.0..PI),
            );
            let k = e.to_conic();
            Patch32::from_fn(|x, y| k.form((x as f64, y as f64)) <= 1.0)
        };
        let mut rotated = patch.clone();
        for _ in 0..3 {
            rotated = rotated.rotated_90();
            for (n, m) in [(0, 0), (1, 0)] {
                let a = pseudo_zernike(&patch, n, m).unwrap().norm();
                let b = pseudo_zernike(&rotated, n, m).unwrap().norm();
                worst = worst.max((a - b).abs() / a.max(1e-12));
            }
        }
    }
    let ok = (z00 - 1.0).abs() <= 0.05 && z10 <= 0.05 && worst <= 0.02;
    report(6, "moments", ok, format!("|Z00| {z00:.4}, |Z10| {z10:.2e}, worst rotation change {worst:.2e}"));
    assert!(ok);
}

/// Cyclic Jacobi eigenvalues of a symmetric matrix.
fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

fn grid_oracle(samples: &[LabeledSample], c: f64) -> f64 {
    let steps: Vec<f64> = (-100..=100).map(|i| i as f64 * 0.05).collect();
    let mut best = f64::INFINITY;
    for &w1 in &steps {
        for &w2 in &steps {
            for &b in &steps {
                let m = SvmModel { weights: vec![w1, w2], bias: b, c_param: c };
                best = best.min(svm_objective(&m, samples));
            }
        }
    }
    best
}

#[test]
fn c7_learning_sanity() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let d = 6;
    let mix: Vec<Vec<f64>> = (0..d).map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    let samples: Vec<Vec<f64>> = (0..300)
        .map(|_| {
            let z: Vec<f64> = (0..d).map(|i| rng.random_range(-1.0..1.0) * (d - i) as f64).collect();
            (0..d).map(|r| (0..d).map(|c| mix[r][c] * z[c]).sum::<f64>() + 3.0).collect()
        })
        .collect();
    let model = pca_fit(&samples, 0.9).unwrap();
    let mut ortho = 0.0f64;
    for (i, a) in model.components.iter().enumerate() {
        for (j, b) in model.components.iter().enumerate() {
            let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
            ortho = ortho.max((dot - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    let n = samples.len() as f64;
    let mean: Vec<f64> = (0..d).map(|j| samples.iter().map(|s| s[j]).sum::<f64>() / n).collect();
    let cov: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| samples.iter().map(|s| (s[i] - mean[i]) * (s[j] - mean[j])).sum::<f64>() / (n - 1.0)).collect())
        .collect();
    let eig = jacobi_eigenvalues(cov);
    let discarded: f64 = eig[model.output_dim()..].iter().sum();
    let recon: f64 = samples
        .iter()
        .map(|s| {
            let r = pca_reconstruct(&model, &pca_project(&model, s).unwrap());
            s.iter().zip(&r).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
        })
        .sum::<f64>()
        / (n - 1.0);
    let recon_gap = (recon - discarded).abs();

    let mut rng = ChaCha8Rng::seed_from_u64(70);
    let separable: Vec<LabeledSample> = (0..20)
        .map(|i| {
            let label = if i % 2 == 0 { Label::Sign } else { Label::NonSign };
            let along: f64 = rng.random_range(-2.0..2.0);
            let off: f64 = rng.random_range(0.4..2.0) * label.sign();
            LabeledSample { features: vec![along + off, -along + off + 0.3], label }
        })
        .collect();
    let strong = svm_train(&separable, 100.0, 200, 0).unwrap();
    let correct = separable
        .iter()
        .filter(|s| (strong.weights.iter().zip(&s.features).map(|(w, x)| w * x).sum::<f64>() + strong.bias).signum() == s.label.sign())
        .count();
    let c = 1.0;
    let trained = svm_train(&separable, c, 200, 0).unwrap();
    let ours = svm_objective(&trained, &separable);
    let grid = grid_oracle(&separable, c);
    let gap = (ours - grid).abs() / grid;

    let ok = ortho <= 1e-9 && recon_gap <= 1e-6 && correct == separable.len() && gap <= 0.05;
    report(
        7,
        "learning",
        ok,
        format!(
            "orthonormality {ortho:.1e}, reconstruction gap {recon_gap:.1e} (k {}), training accuracy {correct}/20, objective {ours:.4} vs grid {grid:.4}",
            model.output_dim()
        ),
    );
    assert!(ok);
}

fn signscan(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_signscan")).args(args).output().expect("binary runs");
    assert!(out.status.success(), "signscan {args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

/// Runs the seeded commands in `root`; returns every produced byte stream.
fn seeded_run(root: &Path, threads: &str) -> Vec<(String, Vec<u8>)> {
    let p = |s: &str| root.join(s).to_string_lossy().into_owned();
    let mut out = Vec::new();
    signscan(&["synth", "--output-dir", &p("train"), "--count", "12", "--seed", "500"]);
    signscan(&["synth", "--output-dir", &p("test"), "--count", "6", "--seed", "900"]);
    signscan(&["train", "--scenes", &p("train"), "--output", &p("model.txt"), "--threads", threads, "--seed", "3"]);
    let det = signscan(&["detect", "--input", &p("test"), "--model", &p("model.txt"), "--threads", threads, "--annotate", &p("ann")]);
    let base = signscan(&["detect", "--input", &p("test"), "--no-classifier", "--threads", threads]);
    std::fs::write(root.join("det.tsv"), &det).unwrap();
    let feats = signscan(&["features", "--input", &p("test/scene_00900.png"), "--ground-truth", &p("test/ground_truth.tsv")]);
    let seg = signscan(&["segment", "--input", &p("test/scene_00901.png"), "--channel", "blue", "--output", &p("mask.png")]);
    let eval = signscan(&["eval", "--detections", &p("det.tsv"), "--ground-truth", &p("test/ground_truth.tsv")]);
    let pr = signscan(&["pr-curve", "--detections", &p("det.tsv"), "--ground-truth", &p("test/ground_truth.tsv"), "--plot", &p("pr.png")]);
    for (name, bytes) in [("detect", det), ("detect-base", base), ("features", feats), ("segment", seg), ("eval", eval), ("pr-curve", pr)] {
        out.push((name.to_string(), bytes));
    }
    for sub in ["train", "test", "ann"] {
        out.extend(files(&root.join(sub)).into_iter().map(|(n, b)| (format!("{sub}/{n}"), b)));
    }
    for f in ["model.txt", "mask.png", "pr.png"] {
        out.push((f.to_string(), std::fs::read(root.join(f)).unwrap()));
    }
    out
}

#[test]
fn c8_determinism() {
    let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    let a = seeded_run(dirs[0].path(), "1");
    let b = seeded_run(dirs[1].path(), "1");
    let c = seeded_run(dirs[2].path(), "4");
    let cli_same = a == b && a == c;

    let tmpl = signscan::eval::SceneConfig::default();
    let cfg = PipelineConfig::default();
    let runs: Vec<_> = [Some(1), Some(2), Some(5)].into_iter().map(|t| run_scenes(&tmpl, 20..32, &cfg, t).unwrap()).collect();
    let lib_same = runs.windows(2).all(|w| w[0].iter().zip(&w[1]).all(|(x, y)| x.candidates == y.candidates));

    let ok = cli_same && lib_same && !a.is_empty();
    report(8, "determinism", ok, format!("{} outputs identical across runs and 1/4 threads: {cli_same}; scene runs across 1/2/5 threads: {lib_same}", a.len()));
    assert!(ok);
}
