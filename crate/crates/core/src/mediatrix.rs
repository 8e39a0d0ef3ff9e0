//! Mediatrices (equidistant sets) of two points: sides, analytic bisectors,
//! and numerical continuation of `H_a(x) = ||x - a|| - ||x|| = 0` for smooth
//! `L^k` norms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{lk_norm, lk_norm_gradient, Metric, Point2};
use crate::zones::Window;

/// Which of two points `a`, `b` is closer to a query point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Strictly closer to `a`.
    Closer0,
    Equidistant,
    /// Strictly closer to `b`.
    CloserA,
}

/// Sign of `d(x, a) - d(x, b)`, with `|difference| <= tol * (1 + d(x, a))`
/// reported as equidistant.
pub fn side_of(metric: &Metric, a: Point2, b: Point2, x: Point2, tol: f64) -> Result<Side> {
    if a == b {
        return Err(Error::Degenerate("side_of needs two distinct points".into()));
    }
    let da = metric.distance(x, a)?;
    let db = metric.distance(x, b)?;
    let diff = da - db;
    Ok(if diff.abs() <= tol * (1.0 + da.max(db)) {
        Side::Equidistant
    } else if diff < 0.0 {
        Side::Closer0
    } else {
        Side::CloserA
    })
}

/// A line `{x : (x - point) · normal = 0}` with unit `normal`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub point: Point2,
    pub normal: Point2,
}

impl Line {
    pub fn signed_distance(&self, x: Point2) -> f64 {
        let d = x - self.point;
        d.x * self.normal.x + d.y * self.normal.y
    }

    /// Point at arclength `t` from `point` along the line.
    pub fn at(&self, t: f64) -> Point2 {
        self.point + Point2::new(-self.normal.y, self.normal.x) * t
    }
}

/// Perpendicular bisector of `a` and `b` in the Euclidean plane; the normal
/// points from `a` toward `b`.
pub fn euclidean_bisector(a: Point2, b: Point2) -> Result<Line> {
    if a == b {
        return Err(Error::Degenerate("bisector of a point with itself".into()));
    }
    let d = b - a;
    let len = d.x.hypot(d.y);
    Ok(Line { point: (a + b) * 0.5, normal: d * (1.0 / len) })
}

/// A geodesic of the disk given as a circle orthogonal to the unit circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicArc {
    pub center: Point2,
    pub radius: f64,
}

impl GeodesicArc {
    /// `count` points on the arc inside the disk, covering the central part
    /// of the arc (parameter `s ∈ [-0.9, 0.9]` of the half-opening angle).
    pub fn sample(&self, count: usize) -> Vec<Point2> {
        let c = self.center.norm_sq().sqrt();
        let phi = self.center.y.atan2(self.center.x);
        let alpha = (self.radius / c).acos();
        (0..count)
            .map(|i| {
                let s = if count == 1 { 0.0 } else { -0.9 + 1.8 * i as f64 / (count - 1) as f64 };
                let th = phi + std::f64::consts::PI + s * alpha;
                self.center + Point2::new(th.cos(), th.sin()) * self.radius
            })
            .collect()
    }

    /// Closest point of the arc's circle to the origin.
    pub fn apex(&self) -> Point2 {
        let c = self.center.norm_sq().sqrt();
        self.center * ((c - self.radius) / c)
    }
}

/// The mediatrix of `0` and `w` in the disk.
pub fn hyperbolic_mediatrix(w: Point2) -> Result<GeodesicArc> {
    let rw = w.norm_sq().sqrt();
    if rw == 0.0 {
        return Err(Error::Degenerate("mediatrix of the origin with itself".into()));
    }
    if !(rw < 1.0) {
        return Err(Error::Domain(w));
    }
    // Midpoint of the segment 0 -> w sits at Euclidean radius mu.
    let mu = (rw.atanh() / 2.0).tanh();
    let c = (1.0 + mu * mu) / (2.0 * mu);
    let rho = (1.0 - mu * mu) / (2.0 * mu);
    Ok(GeodesicArc { center: w * (c / rw), radius: rho })
}

/// Piece of an `L^1` mediatrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ManhattanPiece {
    Segment { from: Point2, to: Point2 },
    Ray { origin: Point2, direction: Point2 },
    /// `{x : sx·(x - corner).x >= 0, sy·(x - corner).y >= 0}`.
    QuarterPlane { corner: Point2, sx: f64, sy: f64 },
}

/// The `L^1` mediatrix of `0` and `a`, built in closed form.
///
/// For `|a1| != |a2|` it is a ray, a diagonal segment and a ray; for
/// `|a1| = |a2|` it is a diagonal segment plus two closed quarter-planes.
pub fn manhattan_mediatrix(a: Point2) -> Result<Vec<ManhattanPiece>> {
    if a == Point2::ORIGIN {
        return Err(Error::Degenerate("mediatrix of the origin with itself".into()));
    }
    if !a.is_finite() {
        return Err(Error::Precondition("non-finite point".into()));
    }
    // Work with u >= v >= 0, then undo the reflections and the swap.
    let (sx, sy) = (if a.x < 0.0 { -1.0 } else { 1.0 }, if a.y < 0.0 { -1.0 } else { 1.0 });
    let (ax, ay) = (a.x.abs(), a.y.abs());
    let swap = ay > ax;
    let (u, v) = if swap { (ay, ax) } else { (ax, ay) };
    let map = |p: Point2| {
        let p = if swap { Point2::new(p.y, p.x) } else { p };
        Point2::new(sx * p.x, sy * p.y)
    };
    let map_dir = |d: Point2| map(d);
    let mut pieces = Vec::new();
    if u == v {
        pieces.push(ManhattanPiece::Segment { from: map(Point2::new(u, 0.0)), to: map(Point2::new(0.0, u)) });
        for (corner, qx, qy) in [(Point2::new(u, 0.0), 1.0, -1.0), (Point2::new(0.0, u), -1.0, 1.0)] {
            let c = map(corner);
            let d = map_dir(Point2::new(qx, qy));
            pieces.push(ManhattanPiece::QuarterPlane { corner: c, sx: d.x.signum(), sy: d.y.signum() });
        }
    } else {
        let low = Point2::new((u + v) / 2.0, 0.0);
        let high = Point2::new((u - v) / 2.0, v);
        pieces.push(ManhattanPiece::Ray { origin: map(low), direction: map_dir(Point2::new(0.0, -1.0)) });
        if v > 0.0 {
            pieces.push(ManhattanPiece::Segment { from: map(low), to: map(high) });
        }
        pieces.push(ManhattanPiece::Ray { origin: map(high), direction: map_dir(Point2::new(0.0, 1.0)) });
    }
    Ok(pieces)
}

/// Whether `x` lies on one of the pieces (within `tol`).
pub fn manhattan_contains(pieces: &[ManhattanPiece], x: Point2, tol: f64) -> bool {
    pieces.iter().any(|p| match *p {
        ManhattanPiece::Segment { from, to } => point_segment_distance(x, from, to) <= tol,
        ManhattanPiece::Ray { origin, direction } => {
            let d = x - origin;
            let t = (d.x * direction.x + d.y * direction.y).max(0.0);
            let q = origin + direction * t;
            (x - q).norm_sq().sqrt() <= tol
        }
        ManhattanPiece::QuarterPlane { corner, sx, sy } => {
            sx * (x.x - corner.x) >= -tol && sy * (x.y - corner.y) >= -tol
        }
    })
}

fn point_segment_distance(x: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sq();
    let t = if len2 == 0.0 { 0.0 } else { (((x - a).x * ab.x + (x - a).y * ab.y) / len2).clamp(0.0, 1.0) };
    (x - (a + ab * t)).norm_sq().sqrt()
}

/// `H_a(x) = ||x - a||_k - ||x||_k`.
pub fn level_function(k: f64, a: Point2, x: Point2) -> f64 {
    lk_norm(k, x.x - a.x, x.y - a.y) - lk_norm(k, x.x, x.y)
}

fn level_gradient(k: f64, a: Point2, x: Point2) -> Point2 {
    lk_norm_gradient(k, x - a) - lk_norm_gradient(k, x)
}

/// A traced branch of a level set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub points: Vec<Point2>,
    /// `|H_a|` at each vertex.
    pub residuals: Vec<f64>,
    pub closed: bool,
}

impl Polyline {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Parameters for [`trace_level_set`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceOptions {
    /// Predictor step; `None` means `1e-3` of the window diagonal.
    pub step_size: Option<f64>,
    /// Required `|H_a|` at every vertex.
    pub tol: f64,
    /// Safety cap on vertices per direction.
    pub max_vertices: usize,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self { step_size: None, tol: 1e-8, max_vertices: 2_000_000 }
    }
}

/// Radius around `0` and `a` inside which the tracer refuses to step.
const SINGULAR_RADIUS: f64 = 1e-6;

fn even_exponent(metric: &Metric) -> Result<f64> {
    match *metric {
        Metric::Lk { exponent } if exponent >= 2.0 && exponent.fract() == 0.0 && (exponent as u64).is_multiple_of(2) => {
            Ok(exponent)
        }
        _ => Err(Error::InvalidMetric(
            "level-set tracing needs an L^k norm with even integer k >= 2".into(),
        )),
    }
}

/// Traces the mediatrix of `0` and `a` inside `window` by predictor-corrector
/// continuation of `H_a = 0`.
///
/// The seed comes from bisection on a scan line: the segment from `0` to `a`
/// by default, or the horizontal line through `start_hint` across the window.
/// The curve is followed in both directions from the seed until it leaves the
/// window or closes up.
pub fn trace_level_set(
    metric: &Metric,
    a: Point2,
    start_hint: Option<Point2>,
    window: Window,
    opts: TraceOptions,
) -> Result<Polyline> {
    let k = even_exponent(metric)?;
    window.validate()?;
    if a == Point2::ORIGIN || !a.is_finite() {
        return Err(Error::Degenerate("need a finite a != 0".into()));
    }
    let seed = find_seed(k, a, start_hint, window, opts.tol)?;
    trace_from(metric, a, seed, window, opts)
}

/// Like [`trace_level_set`], starting from `seed` (corrected onto the curve first).
pub fn trace_from(metric: &Metric, a: Point2, seed: Point2, window: Window, opts: TraceOptions) -> Result<Polyline> {
    let k = even_exponent(metric)?;
    window.validate()?;
    if !(opts.tol > 0.0) {
        return Err(Error::Precondition("trace tolerance must be positive".into()));
    }
    let step = opts.step_size.unwrap_or(1e-3 * window.diagonal());
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Precondition(format!("step size {step} must be positive")));
    }
    let seed = correct(k, a, seed, step, opts.tol).ok_or_else(|| Error::StepFailure {
        at: seed,
        reason: "could not project the seed onto the level set".into(),
    })?;
    if !window.contains(seed) {
        return Err(Error::SeedNotFound("seed lies outside the window".into()));
    }
    let (fwd, closed) = march(k, a, seed, 1.0, step, window, opts)?;
    let mut points: Vec<Point2> = Vec::new();
    if closed {
        points.push(seed);
        points.extend(fwd);
    } else {
        let (back, _) = march(k, a, seed, -1.0, step, window, opts)?;
        points.extend(back.into_iter().rev());
        points.push(seed);
        points.extend(fwd);
    }
    let points = insert_axis_crossings(k, a, points, opts.tol);
    let residuals = points.iter().map(|&p| level_function(k, a, p).abs()).collect();
    Ok(Polyline { points, residuals, closed })
}

fn find_seed(k: f64, a: Point2, hint: Option<Point2>, window: Window, tol: f64) -> Result<Point2> {
    let h = |p: Point2| level_function(k, a, p);
    let (p0, p1, samples) = match hint {
        None => (Point2::ORIGIN, a, 2usize),
        Some(hint) => (Point2::new(window.x_min, hint.y), Point2::new(window.x_max, hint.y), 1001),
    };
    let at = |i: usize| p0 + (p1 - p0) * (i as f64 / (samples - 1) as f64);
    let mut brackets = Vec::new();
    for i in 0..samples - 1 {
        let (u, v) = (at(i), at(i + 1));
        if h(u).signum() != h(v).signum() || h(u) == 0.0 {
            brackets.push((u, v));
        }
    }
    let target = hint.unwrap_or(Point2::ORIGIN);
    let (mut lo, mut hi) = brackets
        .into_iter()
        .min_by(|x, y| {
            let dx = (x.0 - target).norm_sq();
            let dy = (y.0 - target).norm_sq();
            dx.total_cmp(&dy)
        })
        .ok_or_else(|| Error::SeedNotFound("no sign change of H on the scan line".into()))?;
    let s_lo = h(lo).signum();
    for _ in 0..200 {
        let mid = (lo + hi) * 0.5;
        let hm = h(mid);
        if hm.abs() <= tol * 1e-3 {
            return Ok(mid);
        }
        if hm.signum() == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) * 0.5)
}

/// Newton projection along the gradient, with a bisection fallback on the
/// gradient line through `x`.
fn correct(k: f64, a: Point2, x: Point2, step: f64, tol: f64) -> Option<Point2> {
    let h = |p: Point2| level_function(k, a, p);
    let mut y = x;
    for _ in 0..20 {
        let hv = h(y);
        if hv.abs() <= tol * 1e-3 {
            return Some(y);
        }
        let g = level_gradient(k, a, y);
        let g2 = g.norm_sq();
        if !(g2 > 1e-300) {
            break;
        }
        y = y - g * (hv / g2);
        if (y - x).norm_sq().sqrt() > 4.0 * step {
            break;
        }
    }
    if h(y).abs() <= tol {
        return Some(y);
    }
    let g = level_gradient(k, a, x);
    let gn = g.norm_sq().sqrt();
    if !(gn > 0.0) {
        return None;
    }
    let dir = g * (1.0 / gn);
    let (mut lo, mut hi) = (x - dir * (2.0 * step), x + dir * (2.0 * step));
    if h(lo).signum() == h(hi).signum() {
        return None;
    }
    let s_lo = h(lo).signum();
    for _ in 0..200 {
        let mid = (lo + hi) * 0.5;
        let hm = h(mid);
        if hm.abs() <= tol * 1e-3 {
            return Some(mid);
        }
        if hm.signum() == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mid = (lo + hi) * 0.5;
    (h(mid).abs() <= tol).then_some(mid)
}

fn tangent(k: f64, a: Point2, x: Point2) -> Option<Point2> {
    let g = level_gradient(k, a, x);
    let n = g.norm_sq().sqrt();
    (n > 1e-14).then(|| Point2::new(-g.y / n, g.x / n))
}

fn march(
    k: f64,
    a: Point2,
    seed: Point2,
    orientation: f64,
    step: f64,
    window: Window,
    opts: TraceOptions,
) -> Result<(Vec<Point2>, bool)> {
    let mut out = Vec::new();
    let mut x = seed;
    let mut prev_t = tangent(k, a, seed).ok_or_else(|| Error::StepFailure {
        at: seed,
        reason: "vanishing gradient at the seed".into(),
    })? * orientation;
    let mut travelled = 0.0;
    while out.len() < opts.max_vertices {
        let mut h = step;
        let next = loop {
            let t = tangent(k, a, x).ok_or_else(|| Error::StepFailure {
                at: x,
                reason: "vanishing gradient".into(),
            })?;
            // Keep a consistent direction of travel.
            let t = if t.x * prev_t.x + t.y * prev_t.y < 0.0 { t * -1.0 } else { t };
            let pred = x + t * h;
            if let Some(y) = correct(k, a, pred, h, opts.tol) {
                let d = (y - x).norm_sq().sqrt();
                let t_new = tangent(k, a, y).unwrap_or(t);
                let turn = (t.x * t_new.x + t.y * t_new.y).abs();
                if d <= 2.0 * h && d >= 0.25 * h && turn > 0.98 {
                    break Some((y, t));
                }
            }
            h *= 0.5;
            if h < step * 1e-6 {
                break None;
            }
        };
        let Some((y, t)) = next else {
            return Err(Error::StepFailure { at: x, reason: "corrector did not converge".into() });
        };
        if y.norm_sq().sqrt() < SINGULAR_RADIUS || (y - a).norm_sq().sqrt() < SINGULAR_RADIUS {
            // Branch cut at a norm center.
            return Ok((out, false));
        }
        if !window.contains(y) {
            return Ok((out, false));
        }
        travelled += (y - x).norm_sq().sqrt();
        if travelled > 4.0 * step && (y - seed).norm_sq().sqrt() < 0.75 * step {
            return Ok((out, true));
        }
        out.push(y);
        x = y;
        prev_t = t;
    }
    Err(Error::StepFailure { at: x, reason: "vertex cap reached".into() })
}

/// Root of `H` restricted to an axis between parameters `lo`, `hi`.
fn axis_root(k: f64, a: Point2, axis: Axis, mut lo: f64, mut hi: f64) -> f64 {
    let f = |t: f64| level_function(k, a, axis.point(t));
    let s_lo = f(lo).signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = f(mid);
        if v == 0.0 || hi - lo <= f64::EPSILON * mid.abs().max(1.0) {
            return mid;
        }
        if v.signum() == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn insert_axis_crossings(k: f64, a: Point2, pts: Vec<Point2>, tol: f64) -> Vec<Point2> {
    let mut out = Vec::with_capacity(pts.len() + 4);
    for (i, &p) in pts.iter().enumerate() {
        out.push(p);
        let Some(&q) = pts.get(i + 1) else { break };
        let mut extra: Vec<(f64, Point2)> = Vec::new();
        for axis in [Axis::X, Axis::Y] {
            let (cp, cq) = (axis.cross(p), axis.cross(q));
            if cp != 0.0 && cq != 0.0 && cp.signum() != cq.signum() {
                let frac = cp / (cp - cq);
                let guess = axis.along(p) + frac * (axis.along(q) - axis.along(p));
                let (lo, hi) = (axis.along(p).min(axis.along(q)), axis.along(p).max(axis.along(q)));
                let f = |t: f64| level_function(k, a, axis.point(t));
                let t = if f(lo).signum() != f(hi).signum() { axis_root(k, a, axis, lo, hi) } else { guess };
                let c = axis.point(t);
                if level_function(k, a, c).abs() <= tol {
                    extra.push((frac, c));
                }
            }
        }
        extra.sort_by(|x, y| x.0.total_cmp(&y.0));
        out.extend(extra.into_iter().map(|e| e.1));
    }
    out
}

/// A coordinate axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// The horizontal axis `y = 0`.
    X,
    /// The vertical axis `x = 0`.
    Y,
}

impl Axis {
    /// Signed offset from the axis.
    fn cross(self, p: Point2) -> f64 {
        match self {
            Axis::X => p.y,
            Axis::Y => p.x,
        }
    }

    fn along(self, p: Point2) -> f64 {
        match self {
            Axis::X => p.x,
            Axis::Y => p.y,
        }
    }

    fn point(self, t: f64) -> Point2 {
        match self {
            Axis::X => Point2::new(t, 0.0),
            Axis::Y => Point2::new(0.0, t),
        }
    }
}

/// Where a polyline meets a coordinate axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisCrossing {
    pub axis: Axis,
    pub coordinate: f64,
    /// Distance from `coordinate` to the nearest multiple of `1/2`.
    pub half_integer_distance: f64,
    /// A fraction `p/q` with `q <= 64` within `1e-9` of the coordinate, if any.
    pub nearby_rational: Option<(i64, u64)>,
}

impl AxisCrossing {
    /// No low-denominator fraction is near the crossing.
    pub fn looks_irrational(&self) -> bool {
        self.nearby_rational.is_none()
    }
}

/// Axis crossings by linear interpolation between consecutive vertices,
/// counting vertices that lie exactly on an axis once.
pub fn axis_intersections(poly: &Polyline, tol: f64) -> Vec<AxisCrossing> {
    let mut out = Vec::new();
    for axis in [Axis::X, Axis::Y] {
        for (i, &p) in poly.points.iter().enumerate() {
            let cp = axis.cross(p);
            if cp.abs() <= tol {
                let exact_before = i > 0 && axis.cross(poly.points[i - 1]).abs() <= tol;
                if !exact_before {
                    out.push(make_crossing(axis, axis.along(p)));
                }
                continue;
            }
            if let Some(&q) = poly.points.get(i + 1) {
                let cq = axis.cross(q);
                if cq.abs() > tol && cp.signum() != cq.signum() {
                    let frac = cp / (cp - cq);
                    out.push(make_crossing(axis, axis.along(p) + frac * (axis.along(q) - axis.along(p))));
                }
            }
        }
    }
    out
}

fn make_crossing(axis: Axis, coordinate: f64) -> AxisCrossing {
    let half = (coordinate * 2.0).round() / 2.0;
    AxisCrossing {
        axis,
        coordinate,
        half_integer_distance: (coordinate - half).abs(),
        nearby_rational: low_denominator_fraction(coordinate, 64, 1e-9),
    }
}

/// Smallest-denominator fraction `p/q`, `q <= max_q`, within `eps` of `x`.
pub fn low_denominator_fraction(x: f64, max_q: u64, eps: f64) -> Option<(i64, u64)> {
    (1..=max_q).find_map(|q| {
        let p = (x * q as f64).round();
        ((x - p / q as f64).abs() <= eps).then_some((p as i64, q))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn side_examples() {
        let e = Metric::EUCLIDEAN;
        let (o, b) = (Point2::ORIGIN, Point2::new(2.0, 0.0));
        assert_eq!(side_of(&e, o, b, Point2::new(1.0, 5.0), 1e-12).unwrap(), Side::Equidistant);
        assert_eq!(side_of(&e, o, b, Point2::new(0.3, 0.0), 1e-12).unwrap(), Side::Closer0);
        assert_eq!(side_of(&e, o, b, Point2::new(1.7, 0.0), 1e-12).unwrap(), Side::CloserA);
        let side = side_of(&Metric::MANHATTAN, o, Point2::new(1.0, 1.0), Point2::new(3.0, 0.0), 1e-12).unwrap();
        assert_eq!(side, Side::Equidistant);
        assert!(side_of(&e, o, o, b, 1e-12).is_err());
    }

    #[test]
    fn bisector_examples() {
        let l = euclidean_bisector(Point2::ORIGIN, Point2::new(2.0, 0.0)).unwrap();
        assert_eq!(l.point, Point2::new(1.0, 0.0));
        assert_eq!(l.normal, Point2::new(1.0, 0.0));
        let l = euclidean_bisector(Point2::ORIGIN, Point2::new(1.0, 1.0)).unwrap();
        assert_eq!(l.point, Point2::new(0.5, 0.5));
        assert!((l.normal.x - 0.5f64.sqrt()).abs() < 1e-15 && (l.normal.y - 0.5f64.sqrt()).abs() < 1e-15);
        let l = euclidean_bisector(Point2::ORIGIN, Point2::new(0.0, -4.0)).unwrap();
        assert_eq!(l.point, Point2::new(0.0, -2.0));
        for t in [-10.0, -1.0, 0.0, 3.5] {
            let x = l.at(t);
            let s = side_of(&Metric::EUCLIDEAN, Point2::ORIGIN, Point2::new(0.0, -4.0), x, 1e-12).unwrap();
            assert_eq!(s, Side::Equidistant);
        }
    }

    #[test]
    fn hyperbolic_mediatrix_axis_crossing() {
        let u = 0.4f64;
        let arc = hyperbolic_mediatrix(Point2::new((2.0 * u).tanh(), 0.0)).unwrap();
        let apex = arc.apex();
        assert!((apex.x - u.tanh()).abs() < 1e-14 && apex.y.abs() < 1e-15);
    }

    #[test]
    fn hyperbolic_mediatrix_samples_are_equidistant() {
        let h = Metric::HyperbolicDisk;
        for w in [Point2::new(0.5, -0.5), Point2::new(0.1, 0.02), Point2::new(-0.9, 0.3)] {
            let arc = hyperbolic_mediatrix(w).unwrap();
            for z in arc.sample(100) {
                let diff = h.distance(z, Point2::ORIGIN).unwrap() - h.distance(z, w).unwrap();
                assert!(diff.abs() <= 1e-10, "w={w:?} z={z:?} diff={diff}");
                assert_eq!(side_of(&h, Point2::ORIGIN, w, z, 1e-9).unwrap(), Side::Equidistant);
            }
        }
        assert!(hyperbolic_mediatrix(Point2::ORIGIN).is_err());
    }

    #[test]
    fn manhattan_pieces() {
        let m = Metric::MANHATTAN;
        for a in [Point2::new(3.0, 1.0), Point2::new(-1.0, 2.5), Point2::new(2.0, 0.0), Point2::new(-1.0, -1.0)] {
            let pieces = manhattan_mediatrix(a).unwrap();
            for i in -40..=40 {
                for j in -40..=40 {
                    let x = Point2::new(i as f64 * 0.125 + 0.0625 * (j % 2) as f64, j as f64 * 0.125);
                    let eq = side_of(&m, Point2::ORIGIN, a, x, 1e-12).unwrap() == Side::Equidistant;
                    assert_eq!(eq, manhattan_contains(&pieces, x, 1e-12), "a={a:?} x={x:?}");
                }
            }
        }
        let quarter = manhattan_mediatrix(Point2::new(1.0, 1.0)).unwrap();
        assert_eq!(quarter.iter().filter(|p| matches!(p, ManhattanPiece::QuarterPlane { .. })).count(), 2);
    }

    #[test]
    fn euclidean_trace_is_the_bisector() {
        let w = Window::square(5.0);
        let p = trace_level_set(&Metric::EUCLIDEAN, Point2::new(2.0, 0.0), None, w, TraceOptions::default()).unwrap();
        assert!(p.points.len() > 100);
        for q in &p.points {
            assert!((q.x - 1.0).abs() < 1e-6);
        }
        assert!(p.max_residual() <= 1e-8);
        let c = axis_intersections(&p, 1e-12);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].axis, Axis::X);
        assert!((c[0].coordinate - 1.0).abs() < 1e-12 && c[0].half_integer_distance < 1e-12);
    }

    #[test]
    fn l4_crossing_at_half() {
        let w = Window::square(4.0);
        let p = trace_level_set(&Metric::lk(4.0).unwrap(), Point2::new(1.0, 0.0), None, w, TraceOptions::default())
            .unwrap();
        let c = axis_intersections(&p, 1e-12);
        assert!(c.iter().any(|c| c.axis == Axis::X && (c.coordinate - 0.5).abs() < 1e-9));
    }

    #[test]
    fn l4_swap_symmetry() {
        let w = Window::square(4.0);
        let p = trace_level_set(&Metric::lk(4.0).unwrap(), Point2::new(1.0, 1.0), None, w, TraceOptions::default())
            .unwrap();
        for q in &p.points {
            assert!(level_function(4.0, Point2::new(1.0, 1.0), Point2::new(q.y, q.x)).abs() < 1e-8);
        }
    }

    #[test]
    fn odd_exponent_rejected() {
        let w = Window::square(4.0);
        let r = trace_level_set(&Metric::lk(3.0).unwrap(), Point2::new(1.0, 0.0), None, w, TraceOptions::default());
        assert!(matches!(r, Err(Error::InvalidMetric(_))));
    }

    #[test]
    fn rational_probe() {
        assert_eq!(low_denominator_fraction(0.375, 64, 1e-9), Some((3, 8)));
        assert_eq!(low_denominator_fraction(2f64.sqrt(), 64, 1e-9), None);
    }
}
