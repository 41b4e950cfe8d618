//! Three-point ellipse construction: tangent estimation, tangent-based
//! center recovery, centered-conic solve and conversion to axes/orientation.

use std::f64::consts::PI;

use super::RhtError;
use crate::imaging::{EdgeSet, Pixel};

pub type Point = (f64, f64);

/// Line through `point` along a unit `direction`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentLine {
    pub point: Point,
    pub direction: Point,
}

impl TangentLine {
    /// Normalizes `direction`; `None` for a zero vector.
    pub fn new(point: Point, direction: Point) -> Option<Self> {
        let n = direction.0.hypot(direction.1);
        (n > 0.0 && n.is_finite()).then(|| Self { point, direction: (direction.0 / n, direction.1 / n) })
    }
}

/// Centered conic `a x^2 + 2b xy + c y^2 = 1` around `center`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConicCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub center: Point,
}

impl ConicCoeffs {
    pub fn is_ellipse(&self) -> bool {
        self.a > 0.0 && self.a * self.c - self.b * self.b > 0.0
    }

    /// Quadratic form at `pt` (1 on the curve).
    pub fn form(&self, (x, y): Point) -> f64 {
        let (dx, dy) = (x - self.center.0, y - self.center.1);
        self.a * dx * dx + 2.0 * self.b * dx * dy + self.c * dy * dy
    }

    /// First-order geometric distance of `pt` to the curve: `|Q - 1| / |grad Q|`.
    pub fn distance_proxy(&self, (x, y): Point) -> f64 {
        let (dx, dy) = (x - self.center.0, y - self.center.1);
        let q = self.a * dx * dx + 2.0 * self.b * dx * dy + self.c * dy * dy;
        let gx = 2.0 * (self.a * dx + self.b * dy);
        let gy = 2.0 * (self.b * dx + self.c * dy);
        let g = gx.hypot(gy);
        if g == 0.0 {
            f64::INFINITY
        } else {
            (q - 1.0).abs() / g
        }
    }
}

/// Geometric ellipse with RHT bookkeeping.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EllipseParams {
    pub center: Point,
    pub semi_major: f64,
    pub semi_minor: f64,
    /// Orientation of the major axis in `[0, pi)`.
    pub theta: f64,
    /// Accumulator hits behind this ellipse.
    pub score: u32,
    /// Fraction of the ideal perimeter covered by edge evidence.
    pub support: f64,
}

impl EllipseParams {
    pub fn new(center: Point, semi_major: f64, semi_minor: f64, theta: f64) -> Self {
        Self { center, semi_major, semi_minor, theta: fold_angle(theta), score: 0, support: 0.0 }
    }

    pub fn circle(center: Point, radius: f64) -> Self {
        Self::new(center, radius, radius, 0.0)
    }

    pub fn to_conic(&self) -> ConicCoeffs {
        let (s, c) = self.theta.sin_cos();
        let ia = 1.0 / (self.semi_major * self.semi_major);
        let ib = 1.0 / (self.semi_minor * self.semi_minor);
        ConicCoeffs {
            a: c * c * ia + s * s * ib,
            b: (ia - ib) * s * c,
            c: s * s * ia + c * c * ib,
            center: self.center,
        }
    }

    /// Ramanujan's perimeter approximation.
    pub fn perimeter(&self) -> f64 {
        let (a, b) = (self.semi_major, self.semi_minor);
        PI * (3.0 * (a + b) - ((3.0 * a + b) * (a + 3.0 * b)).sqrt())
    }

    /// Half extents of the axis-aligned bounding box.
    pub fn half_extents(&self) -> Point {
        let (s, c) = self.theta.sin_cos();
        let (a, b) = (self.semi_major, self.semi_minor);
        ((a * a * c * c + b * b * s * s).sqrt(), (a * a * s * s + b * b * c * c).sqrt())
    }

    /// Point at parameter angle `t` along the curve.
    pub fn point_at(&self, t: f64) -> Point {
        let (s, c) = self.theta.sin_cos();
        let (u, v) = (self.semi_major * t.cos(), self.semi_minor * t.sin());
        (self.center.0 + u * c - v * s, self.center.1 + u * s + v * c)
    }

    /// Unit tangent direction at parameter angle `t`.
    pub fn tangent_at(&self, t: f64) -> Point {
        let (s, c) = self.theta.sin_cos();
        let (du, dv) = (-self.semi_major * t.sin(), self.semi_minor * t.cos());
        let (x, y) = (du * c - dv * s, du * s + dv * c);
        let n = x.hypot(y);
        (x / n, y / n)
    }
}

/// Folds an angle into `[0, pi)`.
pub fn fold_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(PI);
    if t >= PI {
        0.0
    } else {
        t
    }
}

/// Smallest difference between two orientations modulo `pi`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

/// Total-least-squares direction of a point cloud, anchored at `p`.
pub(crate) fn tangent_from_points(p: Pixel, pts: &[Pixel]) -> Result<TangentLine, RhtError> {
    if pts.len() < 3 {
        return Err(RhtError::InsufficientNeighbors);
    }
    let n = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(sx, sy), &(x, y)| (sx + x as f64, sy + y as f64));
    let (mx, my) = (mx / n, my / n);
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in pts {
        let (dx, dy) = (x as f64 - mx, y as f64 - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let phi = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let point = (p.0 as f64, p.1 as f64);
    TangentLine::new(point, (phi.cos(), phi.sin())).ok_or(RhtError::InsufficientNeighbors)
}

/// Tangent at `p` from the edge points within Chebyshev distance `radius`.
pub fn estimate_tangent(edges: &EdgeSet, p: Pixel, radius: usize) -> Result<TangentLine, RhtError> {
    let r = radius as i32;
    let window: Vec<Pixel> = edges
        .points()
        .iter()
        .copied()
        .filter(|&(x, y)| (x - p.0).abs() <= r && (y - p.1).abs() <= r)
        .collect();
    tangent_from_points(p, &window)
}

const PARALLEL_EPS: f64 = 1e-9;

fn intersect(p1: Point, d1: Point, p2: Point, d2: Point) -> Option<Point> {
    let n1 = d1.0.hypot(d1.1);
    let n2 = d2.0.hypot(d2.1);
    if n1 == 0.0 || n2 == 0.0 {
        return None;
    }
    let cross = d1.0 * d2.1 - d1.1 * d2.0;
    if (cross / (n1 * n2)).abs() < PARALLEL_EPS {
        return None;
    }
    let (wx, wy) = (p2.0 - p1.0, p2.1 - p1.1);
    let s = (wx * d2.1 - wy * d2.0) / cross;
    Some((p1.0 + s * d1.0, p1.1 + s * d1.1))
}

fn midpoint(a: Point, b: Point) -> Point {
    ((a.0 + b.0) * 0.5, (a.1 + b.1) * 0.5)
}

/// Ellipse center from three boundary points and their tangents: the line
/// joining the AB tangent intersection with the AB midpoint passes through
/// the center, as does the analogous line for BC.
pub fn ellipse_center(
    a: Point,
    b: Point,
    c: Point,
    ta: &TangentLine,
    tb: &TangentLine,
    tc: &TangentLine,
) -> Result<Point, RhtError> {
    if a == b || b == c || a == c {
        return Err(RhtError::DegenerateSample);
    }
    let s = intersect(a, ta.direction, b, tb.direction).ok_or(RhtError::DegenerateSample)?;
    let t = midpoint(a, b);
    let n = intersect(b, tb.direction, c, tc.direction).ok_or(RhtError::DegenerateSample)?;
    let m = midpoint(b, c);
    intersect(t, (s.0 - t.0, s.1 - t.1), m, (n.0 - m.0, n.1 - m.1)).ok_or(RhtError::DegenerateSample)
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Solves `[x^2, 2xy, y^2] . (a, b, c) = 1` for three center-relative points.
///
/// Point pairs symmetric about the center give identical rows; such a
/// rank-deficient but consistent system is solved in the minimum-norm sense.
/// Inconsistent singular systems are rejected.
pub fn fit_conic(p1: Point, p2: Point, p3: Point) -> Result<(f64, f64, f64), RhtError> {
    let row = |(x, y): Point| [x * x, 2.0 * x * y, y * y];
    let m = [row(p1), row(p2), row(p3)];
    let det = det3(m);
    let (a, b, c) = if det.is_finite() && det.abs() >= 1e-12 {
        // Cramer's rule with a ones right-hand side
        let replace = |col: usize| {
            let mut k = m;
            for r in k.iter_mut() {
                r[col] = 1.0;
            }
            det3(k) / det
        };
        (replace(0), replace(1), replace(2))
    } else {
        min_norm_solve(m).ok_or(RhtError::SingularSystem)?
    };
    if a <= 0.0 || a * c - b * b <= 0.0 {
        return Err(RhtError::NotAnEllipse);
    }
    Ok((a, b, c))
}

fn min_norm_solve(m: [[f64; 3]; 3]) -> Option<(f64, f64, f64)> {
    let mat = nalgebra::Matrix3::from_fn(|r, c| m[r][c]);
    if !mat.iter().all(|v| v.is_finite()) {
        return None;
    }
    let ones = nalgebra::Vector3::repeat(1.0);
    let scale = mat.amax().max(1.0);
    let svd = mat.svd(true, true);
    let sol = svd.solve(&ones, 1e-12 * scale).ok()?;
    let residual = (mat * sol - ones).amax();
    (residual <= 1e-9).then(|| (sol[0], sol[1], sol[2]))
}

/// Axes from the eigenvalues of `[[a, b], [b, c]]`, orientation from the
/// eigenvector of the smaller one (the major axis).
pub fn conic_to_geometric(k: &ConicCoeffs) -> Result<EllipseParams, RhtError> {
    if !k.is_ellipse() || !(k.a.is_finite() && k.b.is_finite() && k.c.is_finite()) {
        return Err(RhtError::NotAnEllipse);
    }
    let mean = 0.5 * (k.a + k.c);
    let half = (0.5 * (k.a - k.c)).hypot(k.b);
    let (l1, l2) = (mean - half, mean + half);
    if l1 <= 0.0 {
        return Err(RhtError::NotAnEllipse);
    }
    let theta = 0.5 * (-2.0 * k.b).atan2(k.c - k.a);
    Ok(EllipseParams::new(k.center, 1.0 / l1.sqrt(), 1.0 / l2.sqrt(), theta))
}
