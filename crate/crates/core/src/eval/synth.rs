//! Seeded synthetic road scenes with exact ground truth.
//!
//! A scene is a gray background with Gaussian channel noise, 1-3 signs
//! (red-rimmed circles, red-rimmed octagons, blue discs with a white arrow)
//! and colored distractors (rectangles and lumpy blobs) placed without
//! overlap.

use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::imaging::RgbImage;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SignShape {
    Circle,
    Octagon,
}

impl SignShape {
    pub fn name(self) -> &'static str {
        match self {
            SignShape::Circle => "circle",
            SignShape::Octagon => "octagon",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SignColor {
    Red,
    Blue,
}

impl SignColor {
    pub fn name(self) -> &'static str {
        match self {
            SignColor::Red => "red",
            SignColor::Blue => "blue",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroundTruth {
    pub image_id: String,
    pub center: (f64, f64),
    /// Outer radius (circumradius for octagons).
    pub radius: f64,
    pub shape: SignShape,
    pub color: SignColor,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SceneConfig {
    pub width: usize,
    pub height: usize,
    pub n_signs: usize,
    pub n_distractors: usize,
    /// Channel noise standard deviation as a fraction of full scale.
    pub noise_level: f64,
    pub seed: u64,
}

impl Default for SceneConfig {
    fn default() -> Self {
        Self { width: 640, height: 480, n_signs: 1, n_distractors: 3, noise_level: 0.05, seed: 0 }
    }
}

pub const MIN_SIGN_RADIUS: f64 = 10.0;
pub const MAX_SIGN_RADIUS: f64 = 40.0;
const PLACEMENT_ATTEMPTS: usize = 100;
const GAP: f64 = 6.0;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum SceneError {
    #[error("invalid scene config: {0}")]
    InvalidConfig(String),
    #[error("could not place sign {index} without overlap after {attempts} attempts")]
    LayoutFailure { index: usize, attempts: usize },
}

impl SceneConfig {
    /// Benchmark convention: 1-3 signs cycling with the seed.
    pub fn for_seed(self, seed: u64) -> Self {
        Self { seed, n_signs: 1 + (seed % 3) as usize, ..self }
    }

    pub fn validate(&self) -> Result<(), SceneError> {
        let bad = |m: String| Err(SceneError::InvalidConfig(m));
        if !(1..=3).contains(&self.n_signs) {
            return bad(format!("n_signs must be 1..=3, got {}", self.n_signs));
        }
        if !(0.0..=1.0).contains(&self.noise_level) {
            return bad(format!("noise_level must lie in [0, 1], got {}", self.noise_level));
        }
        let min_side = 2.0 * (MAX_SIGN_RADIUS + GAP);
        if (self.width as f64) < min_side || (self.height as f64) < min_side {
            return bad(format!("frame must be at least {min_side} px on each side"));
        }
        Ok(())
    }

    pub fn image_id(&self) -> String {
        scene_id(self.seed)
    }
}

pub fn scene_id(seed: u64) -> String {
    format!("scene_{seed:05}")
}

#[derive(Clone, Copy, Debug)]
enum Kind {
    RedRimCircle { rim: f64 },
    RedRimOctagon { rim: f64, rot: f64 },
    BlueDisc,
    Rectangle { half_w: f64, half_h: f64, rot: f64 },
    Lumpy { harmonics: [(f64, f64); 4] },
}

#[derive(Clone, Copy, Debug)]
struct Object {
    kind: Kind,
    center: (f64, f64),
    /// Bounding radius used for layout.
    radius: f64,
    color: [u8; 3],
}

fn red(rng: &mut ChaCha8Rng) -> [u8; 3] {
    [rng.random_range(185..=235), rng.random_range(10..=40), rng.random_range(10..=40)]
}

fn blue(rng: &mut ChaCha8Rng) -> [u8; 3] {
    [rng.random_range(5..=30), rng.random_range(30..=60), rng.random_range(175..=225)]
}

fn place(rng: &mut ChaCha8Rng, cfg: &SceneConfig, placed: &[Object], radius: f64) -> Option<(f64, f64)> {
    let margin = radius + 2.0;
    for _ in 0..PLACEMENT_ATTEMPTS {
        let cx = rng.random_range(margin..cfg.width as f64 - margin);
        let cy = rng.random_range(margin..cfg.height as f64 - margin);
        let free = placed
            .iter()
            .all(|o| (o.center.0 - cx).hypot(o.center.1 - cy) >= o.radius + radius + GAP);
        if free {
            return Some((cx, cy));
        }
    }
    None
}

/// Inside test for a regular octagon of apothem `apothem` rotated by `rot`.
fn in_octagon(dx: f64, dy: f64, apothem: f64, rot: f64) -> bool {
    (0..8).all(|k| {
        let a = rot + k as f64 * PI / 4.0;
        dx * a.cos() + dy * a.sin() <= apothem
    })
}

/// Pixels whose center is within half a pixel inside the rim band are rim,
/// so a 3-pixel rim stays 8-connected through a 3x3 opening on diagonals.
const RIM_SLACK: f64 = 0.5;
const WHITE: [u8; 3] = [238, 238, 238];
const DARK: [u8; 3] = [35, 35, 35];

/// Color of `obj` at offset `(dx, dy)` from its center, `None` outside.
fn shade(obj: &Object, dx: f64, dy: f64) -> Option<[u8; 3]> {
    let r = obj.radius;
    let d = dx.hypot(dy);
    match obj.kind {
        Kind::RedRimCircle { rim } => {
            if d > r {
                None
            } else if d > r - rim - RIM_SLACK {
                Some(obj.color)
            } else if dy.abs() <= 0.12 * r && dx.abs() <= 0.45 * r {
                Some(DARK)
            } else {
                Some(WHITE)
            }
        }
        Kind::RedRimOctagon { rim, rot } => {
            let outer = r * (PI / 8.0).cos();
            if !in_octagon(dx, dy, outer, rot) {
                None
            } else if !in_octagon(dx, dy, outer - rim - RIM_SLACK, rot) {
                Some(obj.color)
            } else if dy.abs() <= 0.15 * r && dx.abs() <= 0.5 * r {
                Some(DARK)
            } else {
                Some(WHITE)
            }
        }
        Kind::BlueDisc => {
            if d > r {
                return None;
            }
            // upward arrow: shaft plus triangular head
            let shaft = dx.abs() <= 0.12 * r && dy >= -0.2 * r && dy <= 0.55 * r;
            let head = dy < -0.2 * r && dy >= -0.6 * r && dx.abs() <= (dy + 0.6 * r) * 0.75;
            Some(if shaft || head { WHITE } else { obj.color })
        }
        Kind::Rectangle { half_w, half_h, rot } => {
            let (s, c) = rot.sin_cos();
            let (u, v) = (dx * c + dy * s, -dx * s + dy * c);
            (u.abs() <= half_w && v.abs() <= half_h).then_some(obj.color)
        }
        Kind::Lumpy { harmonics } => {
            let phi = dy.atan2(dx);
            let scale: f64 = 1.0 + harmonics.iter().enumerate().map(|(k, (a, p))| a * ((k as f64 + 2.0) * phi + p).cos()).sum::<f64>();
            // radius field is the maximal extent; harmonics stay inside it
            let base = r / 1.4;
            (d <= base * scale).then_some(obj.color)
        }
    }
}

fn render(cfg: &SceneConfig, rng: &mut ChaCha8Rng, objects: &[Object]) -> RgbImage {
    let (w, h) = (cfg.width, cfg.height);
    let base = rng.random_range(95.0..165.0);
    let slope = rng.random_range(-30.0..30.0);
    let mut img = RgbImage::filled(w, h, [0, 0, 0]).expect("validated frame");
    for y in 0..h {
        for x in 0..w {
            let g = (base + slope * (x as f64 / w as f64 - 0.5)).round() as u8;
            img.put(x, y, [g, g, g]);
        }
    }
    for obj in objects {
        let r = obj.radius.ceil() as i64 + 1;
        let (cx, cy) = obj.center;
        let (x0, y0) = (cx.floor() as i64, cy.floor() as i64);
        for y in y0 - r..=y0 + r {
            for x in x0 - r..=x0 + r {
                if let Some(rgb) = shade(obj, x as f64 - cx, y as f64 - cy) {
                    img.put_clipped(x, y, rgb);
                }
            }
        }
    }
    if cfg.noise_level > 0.0 {
        let normal = Normal::new(0.0, cfg.noise_level * 255.0).expect("finite sigma");
        let mut data = img.into_raw();
        for v in data.iter_mut() {
            let n: f64 = normal.sample(rng);
            *v = (*v as f64 + n).round().clamp(0.0, 255.0) as u8;
        }
        img = RgbImage::new(w, h, data).expect("same buffer");
    }
    img
}

fn layout(cfg: &SceneConfig, rng: &mut ChaCha8Rng, n_signs: usize) -> Result<(Vec<Object>, Vec<GroundTruth>), SceneError> {
    let mut objects = Vec::new();
    let mut gts = Vec::new();
    for index in 0..n_signs {
        let radius = rng.random_range(MIN_SIGN_RADIUS..=MAX_SIGN_RADIUS);
        let rim = rng.random_range(3.0..=5.0);
        let (kind, shape, color, rgb) = match rng.random_range(0..3) {
            0 => (Kind::RedRimCircle { rim }, SignShape::Circle, SignColor::Red, red(rng)),
            1 => {
                let rot = PI / 8.0 + rng.random_range(-0.15..0.15);
                (Kind::RedRimOctagon { rim, rot }, SignShape::Octagon, SignColor::Red, red(rng))
            }
            _ => (Kind::BlueDisc, SignShape::Circle, SignColor::Blue, blue(rng)),
        };
        let center = place(rng, cfg, &objects, radius).ok_or(SceneError::LayoutFailure { index, attempts: PLACEMENT_ATTEMPTS })?;
        objects.push(Object { kind, center, radius, color: rgb });
        gts.push(GroundTruth { image_id: cfg.image_id(), center, radius, shape, color });
    }
    for _ in 0..cfg.n_distractors {
        let rgb = if rng.random_bool(0.5) { red(rng) } else { blue(rng) };
        let (kind, radius) = if rng.random_bool(0.5) {
            let half_w = rng.random_range(7.0..22.0);
            let half_h = rng.random_range(7.0..22.0);
            let rot = if rng.random_bool(0.5) { 0.0 } else { rng.random_range(0.0..PI) };
            (Kind::Rectangle { half_w, half_h, rot }, half_w.hypot(half_h))
        } else {
            let mut harmonics = [(0.0, 0.0); 4];
            for hmc in harmonics.iter_mut() {
                *hmc = (rng.random_range(0.0..0.1), rng.random_range(0.0..2.0 * PI));
            }
            (Kind::Lumpy { harmonics }, rng.random_range(14.0..35.0))
        };
        // distractors that do not fit are dropped
        if let Some(center) = place(rng, cfg, &objects, radius) {
            objects.push(Object { kind, center, radius, color: rgb });
        }
    }
    Ok((objects, gts))
}

/// Renders a scene and its exact ground truth. Identical configs give
/// identical bytes.
pub fn synth_scene(cfg: &SceneConfig) -> Result<(RgbImage, Vec<GroundTruth>), SceneError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (objects, gts) = layout(cfg, &mut rng, cfg.n_signs)?;
    Ok((render(cfg, &mut rng, &objects), gts))
}

/// Same generator with the sign pass skipped: distractors only, empty
/// ground truth.
pub fn synth_distractor_scene(cfg: &SceneConfig) -> Result<RgbImage, SceneError> {
    SceneConfig { n_signs: 1, ..*cfg }.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (objects, _) = layout(cfg, &mut rng, 0)?;
    Ok(render(cfg, &mut rng, &objects))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let cfg = SceneConfig { n_signs: 3, seed: 42, ..Default::default() };
        let (a, ga) = synth_scene(&cfg).unwrap();
        let (b, gb) = synth_scene(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(ga, gb);
        let (c, _) = synth_scene(&SceneConfig { seed: 43, ..cfg }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn ground_truth_is_in_frame_and_disjoint() {
        for seed in 0..30 {
            let cfg = SceneConfig::default().for_seed(seed);
            let (_, gts) = synth_scene(&cfg).unwrap();
            assert_eq!(gts.len(), cfg.n_signs);
            for g in &gts {
                assert!((MIN_SIGN_RADIUS..=MAX_SIGN_RADIUS).contains(&g.radius));
                assert!(g.center.0 - g.radius >= 0.0 && g.center.0 + g.radius <= cfg.width as f64);
                assert!(g.center.1 - g.radius >= 0.0 && g.center.1 + g.radius <= cfg.height as f64);
                assert_eq!(g.image_id, "scene_".to_string() + &format!("{seed:05}"));
            }
            for (i, a) in gts.iter().enumerate() {
                for b in &gts[i + 1..] {
                    assert!((a.center.0 - b.center.0).hypot(a.center.1 - b.center.1) > a.radius + b.radius);
                }
            }
        }
    }

    #[test]
    fn invalid_configs() {
        assert!(synth_scene(&SceneConfig { n_signs: 0, ..Default::default() }).is_err());
        assert!(synth_scene(&SceneConfig { n_signs: 4, ..Default::default() }).is_err());
        assert!(synth_scene(&SceneConfig { width: 50, ..Default::default() }).is_err());
        assert!(synth_scene(&SceneConfig { noise_level: 1.5, ..Default::default() }).is_err());
    }

    #[test]
    fn crowded_frame_fails_layout() {
        let cfg = SceneConfig { width: 92, height: 92, n_signs: 3, seed: 1, ..Default::default() };
        assert!(matches!(synth_scene(&cfg), Err(SceneError::LayoutFailure { .. })));
    }

    #[test]
    fn distractor_scene_without_signs() {
        let cfg = SceneConfig { n_distractors: 5, seed: 9, ..Default::default() };
        let img = synth_distractor_scene(&cfg).unwrap();
        assert_eq!((img.width(), img.height()), (640, 480));
        assert_eq!(img, synth_distractor_scene(&cfg).unwrap());
    }
}
