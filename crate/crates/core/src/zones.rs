//! Brillouin zone classification, zone rasters, ray profiles and Monte Carlo
//! zone areas.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{translate_from_origin, Metric, Point2};
use crate::pointsets::PointSet;

/// Counts describing where `x` sits relative to the basepoint.
///
/// With `r = d(x, basepoint)`, `m` is the number of members strictly closer to
/// `x` than `r` and `ell` the number at distance `r` (within tolerance).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZoneClassification {
    pub m: usize,
    pub ell: usize,
    pub basepoint_on_circle: bool,
}

impl ZoneClassification {
    /// `x ∈ b_n`: the basepoint is the only member on the circle and `n - 1`
    /// members are inside.
    pub fn in_b(&self, n: usize) -> bool {
        n >= 1 && self.m == n - 1 && self.ell == 1 && self.basepoint_on_circle
    }

    /// `x ∈ B_n`: `m + 1 <= n <= m + ell`.
    pub fn in_big_b(&self, n: usize) -> bool {
        self.m < n && n <= self.m + self.ell
    }

    /// Smallest `n` with `x ∈ B_n`.
    pub fn zone_index(&self) -> usize {
        self.m + 1
    }

    pub fn is_boundary(&self) -> bool {
        self.ell >= 2
    }
}

/// Classifies `x` against the zones of `basepoint`.
pub fn classify(metric: &Metric, set: &PointSet, basepoint: Point2, x: Point2, tol: f64) -> Result<ZoneClassification> {
    metric.validate()?;
    if !set.contains(basepoint) {
        return Err(Error::Precondition(format!(
            "basepoint ({}, {}) is not a member of the set",
            basepoint.x, basepoint.y
        )));
    }
    metric.check_point(x)?;
    classify_unchecked(metric, set, basepoint, x, tol)
}

pub(crate) fn classify_unchecked(
    metric: &Metric,
    set: &PointSet,
    basepoint: Point2,
    x: Point2,
    tol: f64,
) -> Result<ZoneClassification> {
    let r = metric.dist(x, basepoint);
    let band = tol * (1.0 + r);
    // Every member that can count lies within r + band of x; by the triangle
    // inequality this ball sits inside the ball of radius 2r around the basepoint.
    let reach = r * (1.0 + 1e-12) + 2.0 * band;
    let (mut m, mut ell) = (0, 0);
    set.for_each_in_ball(metric, x, reach, |_, d| {
        if (d - r).abs() <= band {
            ell += 1;
        } else if d < r {
            m += 1;
        }
    })?;
    // The basepoint is at distance exactly r by construction.
    Ok(ZoneClassification { m, ell, basepoint_on_circle: true })
}

/// Axis-aligned window `[x_min, x_max] × [y_min, y_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Window {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let w = Self { x_min, x_max, y_min, y_max };
        w.validate()?;
        Ok(w)
    }

    pub fn square(half: f64) -> Self {
        Self { x_min: -half, x_max: half, y_min: -half, y_max: half }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = [self.x_min, self.x_max, self.y_min, self.y_max].iter().all(|v| v.is_finite())
            && self.x_min < self.x_max
            && self.y_min < self.y_max;
        if ok {
            Ok(())
        } else {
            Err(Error::Precondition(format!("invalid window {self:?}")))
        }
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    /// Center of pixel `(i, j)`, with row 0 at the top.
    pub fn pixel_center(&self, i: usize, j: usize, width: usize, height: usize) -> Point2 {
        Point2::new(
            self.x_min + (i as f64 + 0.5) * self.width() / width as f64,
            self.y_max - (j as f64 + 0.5) * self.height() / height as f64,
        )
    }
}

/// State of a raster cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellKind {
    Zone,
    /// Pixel center outside the metric's domain (outside the open unit disk).
    Outside,
    /// Beyond the radius up to which the point set is complete.
    Unresolved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub kind: CellKind,
    /// `m + 1`; zero for non-zone cells.
    pub zone_index: u32,
    pub ell: u32,
    pub boundary: bool,
}

impl Cell {
    const OUTSIDE: Cell = Cell { kind: CellKind::Outside, zone_index: 0, ell: 0, boundary: false };
    const UNRESOLVED: Cell = Cell { kind: CellKind::Unresolved, zone_index: 0, ell: 0, boundary: false };

    fn from_class(c: ZoneClassification) -> Self {
        Cell {
            kind: CellKind::Zone,
            zone_index: c.zone_index() as u32,
            ell: c.ell as u32,
            boundary: c.is_boundary(),
        }
    }

    pub fn is_zone(&self) -> bool {
        self.kind == CellKind::Zone
    }
}

/// Row-major grid of classified pixel centers, row 0 at the top.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoneRaster {
    pub window: Window,
    pub width: usize,
    pub height: usize,
    pub cells: Vec<Cell>,
}

impl ZoneRaster {
    pub fn cell(&self, i: usize, j: usize) -> &Cell {
        &self.cells[j * self.width + i]
    }

    pub fn count_kind(&self, kind: CellKind) -> usize {
        self.cells.iter().filter(|c| c.kind == kind).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RasterOptions {
    pub tol: f64,
    /// Mark cells beyond the set's horizon as unresolved instead of failing.
    pub clip_horizon: bool,
}

impl Default for RasterOptions {
    fn default() -> Self {
        Self { tol: crate::metrics::DEFAULT_TOL, clip_horizon: false }
    }
}

/// Classifies every pixel center of `window`.
pub fn raster(
    metric: &Metric,
    set: &PointSet,
    basepoint: Point2,
    window: Window,
    width: usize,
    height: usize,
    tol: f64,
) -> Result<ZoneRaster> {
    raster_with(metric, set, basepoint, window, width, height, RasterOptions { tol, clip_horizon: false })
}

pub fn raster_with(
    metric: &Metric,
    set: &PointSet,
    basepoint: Point2,
    window: Window,
    width: usize,
    height: usize,
    opts: RasterOptions,
) -> Result<ZoneRaster> {
    window.validate()?;
    if width == 0 || height == 0 {
        return Err(Error::Precondition("raster needs width, height >= 1".into()));
    }
    // Surface metric/basepoint errors once, before the parallel sweep.
    classify(metric, set, basepoint, basepoint, opts.tol)?;
    let rows: Vec<Result<Vec<Cell>>> = (0..height)
        .into_par_iter()
        .map(|j| {
            (0..width)
                .map(|i| {
                    let x = window.pixel_center(i, j, width, height);
                    if !metric.contains(x) {
                        return Ok(Cell::OUTSIDE);
                    }
                    match classify_unchecked(metric, set, basepoint, x, opts.tol) {
                        Ok(c) => Ok(Cell::from_class(c)),
                        Err(Error::Horizon { .. }) if opts.clip_horizon => Ok(Cell::UNRESOLVED),
                        Err(e) => Err(e),
                    }
                })
                .collect()
        })
        .collect();
    let mut cells = Vec::with_capacity(width * height);
    for row in rows {
        cells.extend(row?);
    }
    Ok(ZoneRaster { window, width, height, cells })
}

/// One classified point along a ray.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RaySample {
    pub t: f64,
    pub zone_index: usize,
    pub ell: usize,
    pub boundary: bool,
}

/// Point at parameter `t` along the ray from `basepoint` in `direction`.
///
/// For the disk metric `t` is geodesic arclength.
pub fn ray_point(metric: &Metric, basepoint: Point2, direction: Point2, t: f64) -> Point2 {
    match metric {
        Metric::Lk { .. } => basepoint + direction * t,
        Metric::HyperbolicDisk => {
            let u = Complex64::new(direction.x, direction.y) * t.tanh();
            Point2::from_complex(translate_from_origin(basepoint.to_complex(), u))
        }
    }
}

/// Classification along a ray, sampled at `steps` evenly spaced parameters in
/// `[0, t_max]`, with every change of classification between neighbouring
/// samples refined by bisection so that crossings (including the boundary
/// points themselves) appear in the output.
pub fn ray_profile(
    metric: &Metric,
    set: &PointSet,
    basepoint: Point2,
    direction: Point2,
    t_max: f64,
    steps: usize,
) -> Result<Vec<RaySample>> {
    if steps < 2 {
        return Err(Error::Precondition("ray profile needs steps >= 2".into()));
    }
    let norm = direction.norm_sq().sqrt();
    if !(norm > 0.0 && norm.is_finite()) || !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::Precondition("ray needs a nonzero direction and t_max > 0".into()));
    }
    let dir = direction * (1.0 / norm);
    let tol = crate::metrics::DEFAULT_TOL;
    let at = |t: f64| -> Result<RaySample> {
        let x = ray_point(metric, basepoint, dir, t);
        let c = classify(metric, set, basepoint, x, tol)?;
        Ok(RaySample { t, zone_index: c.zone_index(), ell: c.ell, boundary: c.is_boundary() })
    };
    let coarse: Vec<RaySample> = (0..steps)
        .map(|i| at(t_max * i as f64 / (steps - 1) as f64))
        .collect::<Result<_>>()?;
    let mut out = vec![coarse[0]];
    for w in coarse.windows(2) {
        refine(&at, w[0], w[1], 0, &mut out)?;
        out.push(w[1]);
    }
    Ok(out)
}

fn same_class(a: &RaySample, b: &RaySample) -> bool {
    a.zone_index == b.zone_index && a.ell == b.ell
}

fn refine(
    at: &impl Fn(f64) -> Result<RaySample>,
    lo: RaySample,
    hi: RaySample,
    depth: usize,
    out: &mut Vec<RaySample>,
) -> Result<()> {
    if same_class(&lo, &hi) || depth > 60 || hi.t - lo.t <= 1e-13 * (1.0 + hi.t) {
        return Ok(());
    }
    let mid = at(0.5 * (lo.t + hi.t))?;
    if same_class(&mid, &lo) {
        refine(at, mid, hi, depth + 1, out)
    } else if same_class(&mid, &hi) {
        refine(at, lo, mid, depth + 1, out)
    } else {
        refine(at, lo, mid, depth + 1, out)?;
        out.push(mid);
        refine(at, mid, hi, depth + 1, out)
    }
}

/// Region sampled by [`area_estimate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Rect(Window),
    /// Ball of the given metric radius around the origin. For the disk metric
    /// samples are uniform in hyperbolic area.
    Disk { radius: f64 },
}

impl Region {
    pub(crate) fn validate(&self, metric: &Metric) -> Result<()> {
        match self {
            Region::Rect(w) => {
                w.validate()?;
                if metric.is_hyperbolic() {
                    return Err(Error::Precondition("use a disk region with the disk metric".into()));
                }
                Ok(())
            }
            Region::Disk { radius } if radius.is_finite() && *radius > 0.0 => Ok(()),
            Region::Disk { radius } => Err(Error::Precondition(format!("disk radius {radius} must be positive"))),
        }
    }

    /// Total area under the metric's area element.
    pub fn area(&self, metric: &Metric) -> f64 {
        match (*self, metric) {
            (Region::Rect(w), _) => w.area(),
            (Region::Disk { radius }, Metric::HyperbolicDisk) => {
                let rho = radius.tanh();
                std::f64::consts::PI * rho * rho / (1.0 - rho * rho)
            }
            (Region::Disk { radius }, Metric::Lk { exponent }) => lk_ball_area(*exponent, radius),
        }
    }

    pub(crate) fn sample(&self, metric: &Metric, rng: &mut ChaCha8Rng) -> Point2 {
        match (*self, metric) {
            (Region::Rect(w), _) => {
                Point2::new(rng.random_range(w.x_min..w.x_max), rng.random_range(w.y_min..w.y_max))
            }
            (Region::Disk { radius }, Metric::HyperbolicDisk) => {
                let rho = radius.tanh();
                let c = rho * rho / (1.0 - rho * rho);
                let uc = rng.random::<f64>() * c;
                let s = (uc / (1.0 + uc)).sqrt();
                let th = rng.random_range(0.0..std::f64::consts::TAU);
                Point2::new(s * th.cos(), s * th.sin())
            }
            (Region::Disk { radius }, Metric::Lk { exponent }) => loop {
                let p = Point2::new(rng.random_range(-radius..radius), rng.random_range(-radius..radius));
                if crate::metrics::lk_norm(*exponent, p.x, p.y) < radius {
                    return p;
                }
            },
        }
    }

    /// Evenly spaced points on the region's edge.
    fn edge(&self, metric: &Metric, count: usize) -> Vec<Point2> {
        match (*self, metric) {
            (Region::Rect(w), _) => {
                let per = count.div_ceil(4).max(1);
                let mut out = Vec::with_capacity(4 * per);
                for i in 0..per {
                    let f = (i as f64 + 0.5) / per as f64;
                    let x = w.x_min + f * w.width();
                    let y = w.y_min + f * w.height();
                    out.extend([
                        Point2::new(x, w.y_min),
                        Point2::new(x, w.y_max),
                        Point2::new(w.x_min, y),
                        Point2::new(w.x_max, y),
                    ]);
                }
                out
            }
            (Region::Disk { radius }, _) => (0..count.max(4))
                .map(|i| {
                    let th = std::f64::consts::TAU * (i as f64 + 0.5) / count.max(4) as f64;
                    let d = Point2::new(th.cos(), th.sin());
                    match metric {
                        Metric::HyperbolicDisk => d * radius.tanh(),
                        Metric::Lk { exponent } => d * (radius / crate::metrics::lk_norm(*exponent, d.x, d.y)),
                    }
                })
                .collect(),
        }
    }
}

/// Lebesgue area of the `L^k` ball of radius `r`: `4 Γ(1+1/k)² / Γ(1+2/k) · r²`,
/// evaluated by quadrature of the quarter boundary.
fn lk_ball_area(k: f64, r: f64) -> f64 {
    // Integrate y(x) = (1 - x^k)^(1/k) on [0, 1] with x = 1 - u^2 to tame the
    // endpoint behaviour.
    let n = 20_000;
    let mut s = 0.0;
    for i in 0..n {
        let u = (i as f64 + 0.5) / n as f64;
        let x = 1.0 - u * u;
        s += (1.0 - x.powf(k)).max(0.0).powf(1.0 / k) * 2.0 * u;
    }
    4.0 * s / n as f64 * r * r
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaEstimate {
    pub area: f64,
    pub stderr: f64,
    pub hits: u64,
    pub samples: u64,
}

const BLOCK: u64 = 10_000;

/// Hit-or-miss Monte Carlo estimate of the area of `B_n(basepoint)` inside
/// `region`, minus the cusp neighbourhoods for orbit sets (see
/// [`PointSet::in_cusp`]).
///
/// Samples are drawn in blocks, each from its own stream of the seeded
/// generator, so the result does not depend on the number of worker threads.
pub fn area_estimate(
    metric: &Metric,
    set: &PointSet,
    basepoint: Point2,
    n: usize,
    region: Region,
    samples: u64,
    seed: u64,
) -> Result<AreaEstimate> {
    if n == 0 || samples == 0 {
        return Err(Error::Precondition("area estimate needs n >= 1 and samples >= 1".into()));
    }
    region.validate(metric)?;
    let tol = crate::metrics::DEFAULT_TOL;
    classify(metric, set, basepoint, basepoint, tol)?;
    let hit = |x: Point2| -> Result<bool> {
        if !metric.contains(x) || set.in_cusp(x) {
            return Ok(false);
        }
        Ok(classify_unchecked(metric, set, basepoint, x, tol)?.in_big_b(n))
    };
    for x in region.edge(metric, 4000) {
        if hit(x)? {
            return Err(Error::WindowTooSmall { zone: n });
        }
    }
    let blocks = samples.div_ceil(BLOCK);
    let hits: u64 = (0..blocks)
        .into_par_iter()
        .map(|b| -> Result<u64> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let len = BLOCK.min(samples - b * BLOCK);
            let mut h = 0;
            for _ in 0..len {
                if hit(region.sample(metric, &mut rng))? {
                    h += 1;
                }
            }
            Ok(h)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();
    let total = region.area(metric);
    let p = hits as f64 / samples as f64;
    Ok(AreaEstimate {
        area: total * p,
        stderr: total * (p * (1.0 - p) / samples as f64).sqrt(),
        hits,
        samples,
    })
}
