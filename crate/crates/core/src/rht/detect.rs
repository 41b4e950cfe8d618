use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::geometry::{
    angle_diff, conic_to_geometric, ellipse_center, fit_conic, tangent_from_points, ConicCoeffs, EllipseParams,
    Point, TangentLine,
};
use super::RhtError;
use crate::imaging::{EdgeSet, Pixel, NEIGHBORS_8};

/// Detector thresholds. Lengths in pixels, angles in radians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RhtConfig {
    pub max_iters: usize,
    pub tangent_radius: usize,
    pub center_tol: f64,
    pub axis_tol: f64,
    pub theta_tol: f64,
    pub min_score: u32,
    pub support_eps: f64,
    pub min_support: f64,
    pub min_axis: f64,
    pub max_aspect: f64,
    pub rng_seed: u64,
}

impl Default for RhtConfig {
    fn default() -> Self {
        Self {
            max_iters: 2000,
            tangent_radius: 3,
            center_tol: 2.0,
            axis_tol: 2.0,
            theta_tol: 0.1,
            min_score: 3,
            support_eps: 1.5,
            min_support: 0.5,
            min_axis: 5.0,
            max_aspect: 1.5,
            rng_seed: 0,
        }
    }
}

impl RhtConfig {
    pub fn validate(&self) -> Result<(), String> {
        let positive = [
            ("center_tol", self.center_tol),
            ("axis_tol", self.axis_tol),
            ("theta_tol", self.theta_tol),
            ("support_eps", self.support_eps),
            ("min_axis", self.min_axis),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("{name} must be positive, got {v}"));
            }
        }
        if self.tangent_radius < 1 {
            return Err("tangent_radius must be at least 1".into());
        }
        if self.min_score < 1 {
            return Err("min_score must be at least 1".into());
        }
        if !(self.min_support > 0.0 && self.min_support <= 1.0) {
            return Err(format!("min_support must lie in (0, 1], got {}", self.min_support));
        }
        if !(self.max_aspect >= 1.0) {
            return Err(format!("max_aspect must be at least 1, got {}", self.max_aspect));
        }
        Ok(())
    }

    fn admits(&self, e: &EllipseParams) -> bool {
        e.semi_minor >= self.min_axis && e.semi_major / e.semi_minor <= self.max_aspect
    }
}

/// Fraction of the ellipse's perimeter covered by edge points lying within
/// `eps` of the curve, clamped to `[0, 1]`.
pub fn verify_candidate(edges: &EdgeSet, e: &EllipseParams, eps: f64) -> f64 {
    let k = e.to_conic();
    support_of(edges.points().iter().copied(), &k, e.perimeter(), eps)
}

fn support_of(points: impl Iterator<Item = Pixel>, k: &ConicCoeffs, perimeter: f64, eps: f64) -> f64 {
    if !(perimeter > 0.0) {
        return 0.0;
    }
    let hits = points.filter(|&(x, y)| k.distance_proxy((x as f64, y as f64)) <= eps).count();
    (hits as f64 / perimeter).clamp(0.0, 1.0)
}

/// Running mean of near-identical hypotheses.
#[derive(Clone, Debug)]
struct Cell {
    hits: u32,
    cx: f64,
    cy: f64,
    major: f64,
    minor: f64,
    // doubled-angle vector sum, orientation has period pi
    dir: (f64, f64),
}

impl Cell {
    fn new(e: &EllipseParams) -> Self {
        let (s, c) = (2.0 * e.theta).sin_cos();
        Self { hits: 1, cx: e.center.0, cy: e.center.1, major: e.semi_major, minor: e.semi_minor, dir: (c, s) }
    }

    fn theta(&self) -> f64 {
        if self.dir.0 == 0.0 && self.dir.1 == 0.0 {
            0.0
        } else {
            0.5 * self.dir.1.atan2(self.dir.0)
        }
    }

    fn ellipse(&self) -> EllipseParams {
        let mut e = EllipseParams::new((self.cx, self.cy), self.major, self.minor, self.theta());
        e.score = self.hits;
        e
    }

    fn matches(&self, e: &EllipseParams, cfg: &RhtConfig) -> bool {
        if (self.cx - e.center.0).abs() > cfg.center_tol
            || (self.cy - e.center.1).abs() > cfg.center_tol
            || (self.major - e.semi_major).abs() > cfg.axis_tol
            || (self.minor - e.semi_minor).abs() > cfg.axis_tol
        {
            return false;
        }
        // orientation is meaningless for near-circles
        let round = self.major - self.minor <= cfg.axis_tol || e.semi_major - e.semi_minor <= cfg.axis_tol;
        round || angle_diff(self.theta(), e.theta) <= cfg.theta_tol
    }

    fn absorb(&mut self, e: &EllipseParams) {
        let n = self.hits as f64;
        let w = 1.0 / (n + 1.0);
        self.cx += (e.center.0 - self.cx) * w;
        self.cy += (e.center.1 - self.cy) * w;
        self.major += (e.semi_major - self.major) * w;
        self.minor += (e.semi_minor - self.minor) * w;
        let (s, c) = (2.0 * e.theta).sin_cos();
        self.dir = (self.dir.0 + c, self.dir.1 + s);
        self.hits += 1;
    }
}

/// Edge points with a dense occupancy grid for window queries, split into
/// 8-connected chains.
struct EdgeIndex {
    points: Vec<Pixel>,
    alive: Vec<bool>,
    active: Vec<usize>,
    chain: Vec<u32>,
    // chain label -> its active point indices
    chain_active: Vec<Vec<usize>>,
    origin: Pixel,
    width: i32,
    height: i32,
    // grid cell -> point index + 1 (0 = empty)
    grid: Vec<u32>,
}

impl EdgeIndex {
    fn new(edges: &EdgeSet) -> Self {
        let points = edges.points().to_vec();
        let (mut x0, mut y0, mut x1, mut y1) = (i32::MAX, i32::MAX, i32::MIN, i32::MIN);
        for &(x, y) in &points {
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
        }
        let (width, height) = if points.is_empty() { (0, 0) } else { (x1 - x0 + 1, y1 - y0 + 1) };
        let mut grid = vec![0u32; (width as usize) * (height as usize)];
        for (i, &(x, y)) in points.iter().enumerate() {
            grid[((y - y0) * width + (x - x0)) as usize] = i as u32 + 1;
        }
        let n = points.len();
        let mut idx = Self {
            points,
            alive: vec![true; n],
            active: (0..n).collect(),
            chain: vec![u32::MAX; n],
            chain_active: Vec::new(),
            origin: (x0, y0),
            width,
            height,
            grid,
        };
        idx.label_chains();
        idx
    }

    fn slot(&self, (x, y): Pixel) -> Option<usize> {
        let (gx, gy) = (x - self.origin.0, y - self.origin.1);
        if gx < 0 || gy < 0 || gx >= self.width || gy >= self.height {
            return None;
        }
        match self.grid[(gy * self.width + gx) as usize] {
            0 => None,
            s => Some(s as usize - 1),
        }
    }

    fn label_chains(&mut self) {
        let mut stack = Vec::new();
        for start in 0..self.points.len() {
            if self.chain[start] != u32::MAX {
                continue;
            }
            let label = self.chain_active.len() as u32;
            let mut members = vec![start];
            self.chain[start] = label;
            stack.push(start);
            while let Some(i) = stack.pop() {
                let (x, y) = self.points[i];
                for (dx, dy) in NEIGHBORS_8 {
                    if let Some(j) = self.slot((x + dx, y + dy)) {
                        if self.chain[j] == u32::MAX {
                            self.chain[j] = label;
                            members.push(j);
                            stack.push(j);
                        }
                    }
                }
            }
            members.sort_unstable();
            self.chain_active.push(members);
        }
    }

    /// Alive points of `p`'s chain within Chebyshev distance `r`.
    fn window(&self, p: Pixel, r: i32, out: &mut Vec<Pixel>) {
        out.clear();
        let label = self.slot(p).map(|i| self.chain[i]);
        let (gx, gy) = (p.0 - self.origin.0, p.1 - self.origin.1);
        for y in (gy - r).max(0)..=(gy + r).min(self.height - 1) {
            for x in (gx - r).max(0)..=(gx + r).min(self.width - 1) {
                let slot = self.grid[(y * self.width + x) as usize];
                if slot != 0 && self.alive[slot as usize - 1] && Some(self.chain[slot as usize - 1]) == label {
                    out.push(self.points[slot as usize - 1]);
                }
            }
        }
    }

    fn active_points(&self) -> impl Iterator<Item = Pixel> + '_ {
        self.active.iter().map(|&i| self.points[i])
    }

    fn remove_near(&mut self, k: &ConicCoeffs, eps: f64) {
        for &i in &self.active {
            let (x, y) = self.points[i];
            if k.distance_proxy((x as f64, y as f64)) <= eps {
                self.alive[i] = false;
            }
        }
        let alive = &self.alive;
        self.active.retain(|&i| alive[i]);
        for members in &mut self.chain_active {
            members.retain(|&i| alive[i]);
        }
    }
}

fn to_point(p: Pixel) -> Point {
    (p.0 as f64, p.1 as f64)
}

/// One RHT hypothesis from three sampled edge points.
fn hypothesis(idx: &EdgeIndex, sample: [Pixel; 3], cfg: &RhtConfig, scratch: &mut Vec<Pixel>) -> Result<EllipseParams, RhtError> {
    let r = cfg.tangent_radius as i32;
    let mut tangents = [None::<TangentLine>; 3];
    for (slot, &p) in tangents.iter_mut().zip(&sample) {
        idx.window(p, r, scratch);
        *slot = Some(tangent_from_points(p, scratch)?);
    }
    let [ta, tb, tc] = tangents.map(|t| t.expect("filled above"));
    let [a, b, c] = sample.map(to_point);
    let center = ellipse_center(a, b, c, &ta, &tb, &tc)?;
    let rel = |p: Point| (p.0 - center.0, p.1 - center.1);
    let (ka, kb, kc) = fit_conic(rel(a), rel(b), rel(c))?;
    conic_to_geometric(&ConicCoeffs { a: ka, b: kb, c: kc, center })
}

/// Least-squares conic through `points` in coordinates relative to `origin`:
/// `A x^2 + B xy + C y^2 + D x + E y = 1`, reduced to centered form.
fn fit_general_conic(points: &[Pixel], origin: Point) -> Option<ConicCoeffs> {
    if points.len() < 5 {
        return None;
    }
    let mut ata = nalgebra::Matrix5::<f64>::zeros();
    let mut atb = nalgebra::Vector5::<f64>::zeros();
    for &(px, py) in points {
        let (x, y) = (px as f64 - origin.0, py as f64 - origin.1);
        let row = nalgebra::Vector5::new(x * x, x * y, y * y, x, y);
        ata += row * row.transpose();
        atb += row;
    }
    let sol = ata.cholesky()?.solve(&atb);
    let (a, b, c, d, e) = (sol[0], sol[1], sol[2], sol[3], sol[4]);
    let det = 4.0 * a * c - b * b;
    if !(det > 0.0) {
        return None;
    }
    let x0 = (b * e - 2.0 * c * d) / det;
    let y0 = (b * d - 2.0 * a * e) / det;
    let rhs = 1.0 - (a * x0 * x0 + b * x0 * y0 + c * y0 * y0 + d * x0 + e * y0);
    if !(rhs > 0.0) {
        return None;
    }
    let k = ConicCoeffs { a: a / rhs, b: 0.5 * b / rhs, c: c / rhs, center: (origin.0 + x0, origin.1 + y0) };
    k.is_ellipse().then_some(k)
}

/// Polishes an accumulator estimate on the edge points near it. Returns the
/// input unchanged when the fit is degenerate or wanders off.
fn refine(idx: &EdgeIndex, e: &EllipseParams, eps: f64) -> EllipseParams {
    let mut best = *e;
    for tol in [eps, eps * 2.0 / 3.0] {
        let k = best.to_conic();
        let inliers: Vec<Pixel> =
            idx.active_points().filter(|&(x, y)| k.distance_proxy((x as f64, y as f64)) <= tol).collect();
        let Some(fit) = fit_general_conic(&inliers, best.center) else { break };
        let Ok(mut cand) = conic_to_geometric(&fit) else { break };
        let moved = (cand.center.0 - best.center.0).hypot(cand.center.1 - best.center.1);
        if moved > 2.0 * eps
            || (cand.semi_major - best.semi_major).abs() > 2.0 * eps
            || (cand.semi_minor - best.semi_minor).abs() > 2.0 * eps
        {
            break;
        }
        cand.score = e.score;
        best = cand;
    }
    best
}

/// Sequential randomized Hough transform for ellipses.
///
/// Each iteration samples three distinct active edge points from one
/// 8-connected edge chain, builds one
/// hypothesis and votes it into a list of tolerance-matched cells. A cell
/// reaching `min_score` is refined and verified; accepted ellipses remove
/// their supporting points and reset the accumulator. Output is sorted by
/// support, descending.
pub fn rht_detect(edges: &EdgeSet, cfg: &RhtConfig) -> Vec<EllipseParams> {
    let mut idx = EdgeIndex::new(edges);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut cells: Vec<Cell> = Vec::new();
    let mut found = Vec::new();
    let mut scratch = Vec::new();
    let min_sep = (2 * cfg.tangent_radius) as i32;

    for _ in 0..cfg.max_iters {
        let n = idx.active.len();
        if n < 3 {
            break;
        }
        // first point anywhere, the other two on the same edge chain, so
        // concentric contours such as both sides of a rim never mix
        let i = idx.active[rng.random_range(0..n)];
        let members = &idx.chain_active[idx.chain[i] as usize];
        let j = members[rng.random_range(0..members.len())];
        let k = members[rng.random_range(0..members.len())];
        if i == j || j == k || i == k {
            continue;
        }
        let sample = [idx.points[i], idx.points[j], idx.points[k]];
        let far = |p: Pixel, q: Pixel| (p.0 - q.0).abs().max((p.1 - q.1).abs()) >= min_sep;
        if !(far(sample[0], sample[1]) && far(sample[1], sample[2]) && far(sample[0], sample[2])) {
            continue;
        }
        let Ok(e) = hypothesis(&idx, sample, cfg, &mut scratch) else { continue };
        if !cfg.admits(&e) {
            continue;
        }

        let hit = match cells.iter().position(|c| c.matches(&e, cfg)) {
            Some(ci) => {
                cells[ci].absorb(&e);
                ci
            }
            None => {
                cells.push(Cell::new(&e));
                cells.len() - 1
            }
        };
        if cells[hit].hits < cfg.min_score {
            continue;
        }

        let cand = refine(&idx, &cells[hit].ellipse(), cfg.support_eps);
        let k = cand.to_conic();
        let support = support_of(idx.active_points(), &k, cand.perimeter(), cfg.support_eps);
        if support >= cfg.min_support && cfg.admits(&cand) {
            found.push(EllipseParams { support, ..cand });
            idx.remove_near(&k, cfg.support_eps);
            cells.clear();
        } else {
            cells.swap_remove(hit);
        }
    }

    found.sort_by(|a, b| b.support.total_cmp(&a.support));
    found
}
