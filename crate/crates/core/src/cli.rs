//! `signscan` command line.
//!
//! Exit codes: 0 success, 1 invalid arguments, 2 input/output failure,
//! 3 malformed model file, 4 detections and ground truth disagree on image
//! ids.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::eval::{
    detect_candidates, draw_ellipse, label_candidates, match_detections, pr_curve, precision_recall, read_detections,
    read_ground_truth, render_pr_plot, score_candidates, scene_id, synth_scene, write_detections, write_ground_truth,
    Candidate, DetectionRecord, GroundTruth, PipelineConfig, SceneConfig,
};
use crate::features::{read_csv, write_csv, FeatureVector};
use crate::imaging::io::{load_rgb, save_mask_png, save_rgb_png};
use crate::imaging::RgbImage;
use crate::learn::{Label, SignClassifier, TrainConfig};
use crate::rht::RhtConfig;
use crate::segmentation::{segment_mask, EnhanceChannel, SegmentationConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_MODEL: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

fn io_err(e: impl std::fmt::Display) -> CliError {
    CliError::new(EXIT_IO, e.to_string())
}

fn usage_err(e: impl std::fmt::Display) -> CliError {
    CliError::new(EXIT_USAGE, e.to_string())
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "signscan", version, about = "Color segmentation + randomized Hough transform + texture SVM road-sign detector")]
pub struct Cli {
    /// key=value file; each line becomes `--key value` ahead of the command-line flags
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write the segmentation mask and list blob bounding boxes
    Segment(SegmentArgs),
    /// Detect signs in an image or a directory of images
    Detect(DetectArgs),
    /// Print the texture features of every detector candidate as CSV
    Features(FeaturesArgs),
    /// Train a classifier from labeled features or from scenes with ground truth
    Train(TrainArgs),
    /// Count tp/fp/fn and print precision and recall
    Eval(EvalArgs),
    /// Generate synthetic scenes and their ground truth
    Synth(SynthArgs),
    /// Sweep the score threshold and write the precision/recall curve
    PrCurve(PrCurveArgs),
}

#[derive(Args, Debug, Clone)]
pub struct SegFlags {
    #[arg(long, default_value_t = SegmentationConfig::default().alpha)]
    pub alpha: f64,
    #[arg(long, default_value_t = SegmentationConfig::default().morph_radius)]
    pub morph_radius: usize,
    #[arg(long, default_value_t = SegmentationConfig::default().min_area)]
    pub min_area: usize,
}

impl SegFlags {
    fn config(&self) -> CliResult<SegmentationConfig> {
        let cfg = SegmentationConfig { alpha: self.alpha, morph_radius: self.morph_radius, min_area: self.min_area };
        cfg.validate().map_err(usage_err)?;
        Ok(cfg)
    }
}

#[derive(Args, Debug, Clone)]
pub struct RhtFlags {
    #[arg(long, default_value_t = RhtConfig::default().max_iters)]
    pub max_iters: usize,
    #[arg(long, default_value_t = RhtConfig::default().tangent_radius)]
    pub tangent_radius: usize,
    #[arg(long, default_value_t = RhtConfig::default().center_tol)]
    pub center_tol: f64,
    #[arg(long, default_value_t = RhtConfig::default().axis_tol)]
    pub axis_tol: f64,
    #[arg(long, default_value_t = RhtConfig::default().theta_tol)]
    pub theta_tol: f64,
    #[arg(long, default_value_t = RhtConfig::default().min_score)]
    pub min_score: u32,
    #[arg(long, default_value_t = RhtConfig::default().support_eps)]
    pub support_eps: f64,
    #[arg(long, default_value_t = RhtConfig::default().min_support)]
    pub min_support: f64,
    #[arg(long, default_value_t = RhtConfig::default().min_axis)]
    pub min_axis: f64,
    #[arg(long, default_value_t = RhtConfig::default().max_aspect)]
    pub max_aspect: f64,
    /// Detector seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl RhtFlags {
    fn config(&self) -> CliResult<RhtConfig> {
        let cfg = RhtConfig {
            max_iters: self.max_iters,
            tangent_radius: self.tangent_radius,
            center_tol: self.center_tol,
            axis_tol: self.axis_tol,
            theta_tol: self.theta_tol,
            min_score: self.min_score,
            support_eps: self.support_eps,
            min_support: self.min_support,
            min_axis: self.min_axis,
            max_aspect: self.max_aspect,
            rng_seed: self.seed,
        };
        cfg.validate().map_err(usage_err)?;
        Ok(cfg)
    }
}

#[derive(Args, Debug, Clone)]
pub struct PipelineFlags {
    #[command(flatten)]
    pub seg: SegFlags,
    #[command(flatten)]
    pub rht: RhtFlags,
}

impl PipelineFlags {
    fn config(&self) -> CliResult<PipelineConfig> {
        Ok(PipelineConfig { segmentation: self.seg.config()?, rht: self.rht.config()? })
    }
}

#[derive(Args, Debug)]
pub struct SegmentArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "red")]
    pub channel: EnhanceChannel,
    /// Mask PNG to write
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub seg: SegFlags,
}

#[derive(Args, Debug)]
pub struct DetectArgs {
    /// Image file, or a directory whose .png/.ppm files are processed in name order
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, conflicts_with = "no_classifier")]
    pub model: Option<PathBuf>,
    /// Emit every detector candidate, scored by support
    #[arg(long)]
    pub no_classifier: bool,
    /// Annotated PNG (a directory when the input is a directory)
    #[arg(long)]
    pub annotate: Option<PathBuf>,
    /// Detections TSV to write instead of standard output
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[command(flatten)]
    pub pipeline: PipelineFlags,
}

#[derive(Args, Debug)]
pub struct FeaturesArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Ground truth used to label rows; duplicates of a matched sign are skipped
    #[arg(long)]
    pub ground_truth: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub pipeline: PipelineFlags,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    /// Labeled feature CSV
    #[arg(long, conflicts_with = "scenes", required_unless_present = "scenes")]
    pub features: Option<PathBuf>,
    /// Directory with images and a ground_truth.tsv
    #[arg(long)]
    pub scenes: Option<PathBuf>,
    /// Model file to write
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = TrainConfig::default().variance_keep)]
    pub variance_keep: f64,
    #[arg(long = "c", default_value_t = TrainConfig::default().c_param)]
    pub c_param: f64,
    #[arg(long, default_value_t = TrainConfig::default().epochs)]
    pub epochs: usize,
    /// Training seed (also seeds the detector when reading scenes)
    #[arg(long, default_value_t = TrainConfig::default().seed)]
    pub train_seed: u64,
    #[arg(long)]
    pub threads: Option<usize>,
    #[command(flatten)]
    pub pipeline: PipelineFlags,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long)]
    pub detections: PathBuf,
    #[arg(long)]
    pub ground_truth: PathBuf,
    /// Count rejected detections too
    #[arg(long)]
    pub all: bool,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[arg(long)]
    pub output_dir: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub count: u64,
    /// Seed of the first scene; scene i uses seed + i
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = SceneConfig::default().width)]
    pub width: usize,
    #[arg(long, default_value_t = SceneConfig::default().height)]
    pub height: usize,
    /// Signs per scene; cycles 1..=3 with the seed when omitted
    #[arg(long)]
    pub n_signs: Option<usize>,
    #[arg(long, default_value_t = SceneConfig::default().n_distractors)]
    pub n_distractors: usize,
    #[arg(long, default_value_t = SceneConfig::default().noise_level)]
    pub noise_level: f64,
}

#[derive(Args, Debug)]
pub struct PrCurveArgs {
    #[arg(long)]
    pub detections: PathBuf,
    #[arg(long)]
    pub ground_truth: PathBuf,
    /// CSV to write instead of standard output
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Plot PNG
    #[arg(long)]
    pub plot: Option<PathBuf>,
    /// Second detections file drawn as a reference curve in the plot
    #[arg(long, requires = "plot")]
    pub baseline: Option<PathBuf>,
}

/// Rewrites `argv` so that `--config FILE` entries become flags placed right
/// after the subcommand, ahead of the user's own flags (which then win).
pub fn expand_config(argv: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut config = None;
    let mut it = argv.into_iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            config = Some(PathBuf::from(it.next().ok_or_else(|| usage_err("--config needs a file"))?));
        } else if let Some(path) = s.strip_prefix("--config=") {
            config = Some(PathBuf::from(path));
        } else {
            rest.push(a);
        }
    }
    let Some(path) = config else { return Ok(rest) };
    let text = std::fs::read_to_string(&path).map_err(|e| io_err(format!("cannot read {}: {e}", path.display())))?;
    let mut flags = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| usage_err(format!("{}:{}: expected key=value", path.display(), i + 1)))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        match value {
            "true" => flags.push(OsString::from(format!("--{key}"))),
            "false" => {}
            v => {
                flags.push(OsString::from(format!("--{key}")));
                flags.push(OsString::from(v));
            }
        }
    }
    let sub = rest.iter().skip(1).position(|a| !a.to_string_lossy().starts_with('-')).map(|p| p + 2);
    match sub {
        Some(at) => {
            let tail = rest.split_off(at);
            rest.extend(flags);
            rest.extend(tail);
        }
        None => rest.extend(flags),
    }
    Ok(rest)
}

/// Parses `argv` (program name first), runs the command and returns the exit
/// code. Diagnostics go to standard error.
pub fn run(argv: Vec<OsString>) -> i32 {
    let argv = match expand_config(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("signscan: {}", e.message);
            return e.code;
        }
    };
    let cli = match Cli::command_with_overrides().try_get_matches_from(argv).and_then(|m| {
        use clap::FromArgMatches;
        Cli::from_arg_matches(&m)
    }) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("signscan: {}", e.message);
            e.code
        }
    }
}

impl Cli {
    fn command_with_overrides() -> clap::Command {
        use clap::CommandFactory;
        let cmd = Cli::command().args_override_self(true);
        let subs: Vec<String> = cmd.get_subcommands().map(|s| s.get_name().to_string()).collect();
        subs.into_iter().fold(cmd, |c, name| c.mut_subcommand(name, |s| s.args_override_self(true)))
    }
}

fn dispatch(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Segment(a) => cmd_segment(&a),
        Command::Detect(a) => cmd_detect(&a),
        Command::Features(a) => cmd_features(&a),
        Command::Train(a) => cmd_train(&a),
        Command::Eval(a) => cmd_eval(&a),
        Command::Synth(a) => cmd_synth(&a),
        Command::PrCurve(a) => cmd_pr_curve(&a),
    }
}

fn output_sink(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| io_err(format!("cannot create {}: {e}", p.display())))?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| io_err(format!("cannot read {}: {e}", path.display())))
}

fn image_id(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

/// The file itself, or the directory's .png/.ppm files sorted by name.
fn image_inputs(input: &Path) -> CliResult<Vec<PathBuf>> {
    if !input.is_dir() {
        return Ok(vec![input.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(input)
        .map_err(|e| io_err(format!("cannot list {}: {e}", input.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("png") || x.eq_ignore_ascii_case("ppm")))
        .collect();
    files.sort();
    Ok(files)
}

fn with_threads<T: Send>(threads: Option<usize>, work: impl FnOnce() -> T + Send) -> CliResult<T> {
    match threads {
        None => Ok(work()),
        Some(0) => Err(usage_err("--threads must be at least 1")),
        Some(n) => Ok(rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(usage_err)?.install(work)),
    }
}

fn load_model(path: &Path) -> CliResult<SignClassifier> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(format!("cannot read {}: {e}", path.display())))?;
    SignClassifier::from_text(&text).map_err(|e| CliError::new(EXIT_MODEL, format!("{}: {e}", path.display())))
}

fn cmd_segment(a: &SegmentArgs) -> CliResult<()> {
    let cfg = a.seg.config()?;
    let img = load_rgb(&a.input).map_err(io_err)?;
    let (mask, blobs) = segment_mask(&img, a.channel, &cfg);
    if let Some(out) = &a.output {
        save_mask_png(&mask, out).map_err(io_err)?;
    }
    let mut out = output_sink(None)?;
    for b in &blobs {
        let bb = b.bbox();
        writeln!(out, "{}\t{}\t{}\t{}\t{}", bb.x_min, bb.y_min, bb.x_max, bb.y_max, b.area()).map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

fn cmd_detect(a: &DetectArgs) -> CliResult<()> {
    let cfg = a.pipeline.config()?;
    let model = match (&a.model, a.no_classifier) {
        (Some(p), false) => Some(load_model(p)?),
        (None, false) => return Err(usage_err("detect needs --model or --no-classifier")),
        _ => None,
    };
    let inputs = image_inputs(&a.input)?;
    let many = a.input.is_dir();
    if let (Some(dir), true) = (&a.annotate, many) {
        std::fs::create_dir_all(dir).map_err(|e| io_err(format!("cannot create {}: {e}", dir.display())))?;
    }
    let results: Vec<CliResult<Vec<DetectionRecord>>> = with_threads(a.threads, || {
        inputs
            .par_iter()
            .map(|path| {
                let img = load_rgb(path).map_err(io_err)?;
                let id = image_id(path);
                let dets = score_candidates(&id, &detect_candidates(&img, &cfg), model.as_ref());
                if let Some(target) = &a.annotate {
                    let target = if many { target.join(format!("{id}.png")) } else { target.clone() };
                    annotate(img, &dets, &target)?;
                }
                Ok(dets)
            })
            .collect()
    })?;
    let mut out = output_sink(a.output.as_deref())?;
    for r in results {
        write_detections(&mut out, &r?).map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

fn annotate(mut img: RgbImage, dets: &[DetectionRecord], path: &Path) -> CliResult<()> {
    for d in dets.iter().filter(|d| d.accepted) {
        draw_ellipse(&mut img, &d.ellipse, [0, 255, 0]);
    }
    save_rgb_png(&img, path).map_err(io_err)
}

fn read_gt(path: &Path) -> CliResult<Vec<GroundTruth>> {
    read_ground_truth(open(path)?).map_err(|e| io_err(format!("{}: {e}", path.display())))
}

fn labeled_rows(cands: &[Candidate], gts: &[GroundTruth]) -> Vec<(FeatureVector, Label)> {
    cands.iter().zip(label_candidates(cands, gts)).filter_map(|(c, l)| Some((c.features, l?))).collect()
}

fn cmd_features(a: &FeaturesArgs) -> CliResult<()> {
    let cfg = a.pipeline.config()?;
    let img = load_rgb(&a.input).map_err(io_err)?;
    let cands = detect_candidates(&img, &cfg);
    let rows: Vec<(FeatureVector, Option<Label>)> = match &a.ground_truth {
        Some(p) => {
            let id = image_id(&a.input);
            let gts: Vec<GroundTruth> = read_gt(p)?.into_iter().filter(|g| g.image_id == id).collect();
            labeled_rows(&cands, &gts).into_iter().map(|(f, l)| (f, Some(l))).collect()
        }
        None => cands.iter().map(|c| (c.features, None)).collect(),
    };
    let mut out = output_sink(a.output.as_deref())?;
    write_csv(&mut out, &rows).map_err(io_err)?;
    out.flush().map_err(io_err)
}

fn cmd_train(a: &TrainArgs) -> CliResult<()> {
    let tcfg = TrainConfig { variance_keep: a.variance_keep, c_param: a.c_param, epochs: a.epochs, seed: a.train_seed };
    if !(tcfg.variance_keep > 0.0 && tcfg.variance_keep <= 1.0) {
        return Err(usage_err("--variance-keep must lie in (0, 1]"));
    }
    let rows = if let Some(csv) = &a.features {
        read_csv(open(csv)?)
            .map_err(|e| io_err(format!("{}: {e}", csv.display())))?
            .into_iter()
            .map(|(f, l)| l.map(|l| (f, l)).ok_or_else(|| io_err(format!("{}: every row needs a label", csv.display()))))
            .collect::<CliResult<Vec<_>>>()?
    } else {
        let dir = a.scenes.as_ref().expect("clap enforces one source");
        let cfg = a.pipeline.config()?;
        let gts = read_gt(&dir.join("ground_truth.tsv"))?;
        let inputs = image_inputs(dir)?;
        let per_image: Vec<CliResult<Vec<(FeatureVector, Label)>>> = with_threads(a.threads, || {
            inputs
                .par_iter()
                .map(|path| {
                    let img = load_rgb(path).map_err(io_err)?;
                    let id = image_id(path);
                    let mine: Vec<GroundTruth> = gts.iter().filter(|g| g.image_id == id).cloned().collect();
                    Ok(labeled_rows(&detect_candidates(&img, &cfg), &mine))
                })
                .collect()
        })?;
        let mut rows = Vec::new();
        for r in per_image {
            rows.extend(r?);
        }
        rows
    };
    let model = SignClassifier::train(&rows, &tcfg).map_err(usage_err)?;
    std::fs::write(&a.output, model.to_text()).map_err(|e| io_err(format!("cannot write {}: {e}", a.output.display())))?;
    eprintln!(
        "trained on {} rows ({} signs), {} principal components",
        rows.len(),
        rows.iter().filter(|r| r.1 == Label::Sign).count(),
        model.pca.output_dim()
    );
    Ok(())
}

/// Detections must only name images that the ground truth covers.
fn check_ids(dets: &[DetectionRecord], gts: &[GroundTruth]) -> CliResult<()> {
    let known: BTreeSet<&str> = gts.iter().map(|g| g.image_id.as_str()).collect();
    match dets.iter().find(|d| !known.contains(d.image_id.as_str())) {
        Some(d) => Err(CliError::new(EXIT_MISMATCH, format!("image `{}` has detections but no ground truth", d.image_id))),
        None => Ok(()),
    }
}

fn read_pair(dets: &Path, gts: &Path) -> CliResult<(Vec<DetectionRecord>, Vec<GroundTruth>)> {
    let d = read_detections(open(dets)?).map_err(|e| io_err(format!("{}: {e}", dets.display())))?;
    let g = read_gt(gts)?;
    check_ids(&d, &g)?;
    Ok((d, g))
}

fn cmd_eval(a: &EvalArgs) -> CliResult<()> {
    let (dets, gts) = read_pair(&a.detections, &a.ground_truth)?;
    let used: Vec<DetectionRecord> = dets.into_iter().filter(|d| a.all || d.accepted).collect();
    let c = match_detections(&used, &gts);
    let (p, r) = precision_recall(c);
    println!("tp {} fp {} fn {} precision {p} recall {r}", c.tp, c.fp, c.fn_);
    Ok(())
}

fn cmd_synth(a: &SynthArgs) -> CliResult<()> {
    std::fs::create_dir_all(&a.output_dir).map_err(|e| io_err(format!("cannot create {}: {e}", a.output_dir.display())))?;
    let template = SceneConfig {
        width: a.width,
        height: a.height,
        n_signs: a.n_signs.unwrap_or(1),
        n_distractors: a.n_distractors,
        noise_level: a.noise_level,
        seed: a.seed,
    };
    let mut all = Vec::new();
    for i in 0..a.count {
        let seed = a.seed + i;
        let cfg = match a.n_signs {
            Some(n) => SceneConfig { seed, n_signs: n, ..template },
            None => template.for_seed(seed),
        };
        let (img, gts) = synth_scene(&cfg).map_err(usage_err)?;
        save_rgb_png(&img, a.output_dir.join(format!("{}.png", scene_id(seed)))).map_err(io_err)?;
        all.extend(gts);
    }
    let gt_path = a.output_dir.join("ground_truth.tsv");
    let mut f = BufWriter::new(File::create(&gt_path).map_err(|e| io_err(format!("cannot create {}: {e}", gt_path.display())))?);
    write_ground_truth(&mut f, &all).map_err(io_err)?;
    f.flush().map_err(io_err)
}

fn cmd_pr_curve(a: &PrCurveArgs) -> CliResult<()> {
    let (dets, gts) = read_pair(&a.detections, &a.ground_truth)?;
    let curve = pr_curve(&dets, &gts);
    let mut out = output_sink(a.output.as_deref())?;
    writeln!(out, "threshold,precision,recall").map_err(io_err)?;
    for p in &curve {
        writeln!(out, "{},{},{}", p.threshold, p.precision, p.recall).map_err(io_err)?;
    }
    out.flush().map_err(io_err)?;
    if let Some(plot) = &a.plot {
        let base = match &a.baseline {
            Some(b) => {
                let (d, g) = read_pair(b, &a.ground_truth)?;
                Some(pr_curve(&d, &g))
            }
            None => None,
        };
        let mut curves: Vec<(&[_], [u8; 3])> = Vec::new();
        if let Some(b) = &base {
            curves.push((b, [160, 160, 255]));
        }
        curves.push((&curve, [220, 30, 30]));
        save_rgb_png(&render_pr_plot(&curves, 400), plot).map_err(io_err)?;
    }
    Ok(())
}
