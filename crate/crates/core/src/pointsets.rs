//! Discrete point sets with complete enumeration inside metric balls.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuchsian::{disk_to_upper, solve_quadruples, Quadruple};
use crate::metrics::{Metric, Point2};

/// Serializable description of a point set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PointSetDescriptor {
    /// `Z²`.
    SquareLattice,
    /// `{(m, n·alpha) : m, n ∈ Z}`.
    IrrationalLattice { alpha: f64 },
    /// The two coordinate axes' integer points, `{(m, 0)} ∪ {(0, n)}`.
    CrossSet,
    /// Orbit of the origin under the level-`k` disk group, every element with
    /// `p² + q² <= n_max`.
    GammaOrbit { k: u64, n_max: u64 },
}

impl PointSetDescriptor {
    pub fn irrational_sqrt2() -> Self {
        PointSetDescriptor::IrrationalLattice { alpha: SQRT_2 }
    }
}

/// A group element carrying one member of a set onto another.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Isometry {
    Translation(Point2),
    Mobius(Quadruple),
}

impl Isometry {
    pub fn apply(&self, p: Point2) -> Point2 {
        match self {
            Isometry::Translation(v) => p + *v,
            Isometry::Mobius(g) => g.apply(p),
        }
    }
}

/// A realized point set, ready for ball queries.
#[derive(Debug, Clone)]
pub enum PointSet {
    SquareLattice,
    IrrationalLattice { alpha: f64 },
    CrossSet,
    GammaOrbit(GammaOrbitSet),
}

/// Precomputed orbit points, indexed by a uniform grid over the disk.
#[derive(Debug, Clone)]
pub struct GammaOrbitSet {
    k: u64,
    n_max: u64,
    horizon: f64,
    members: Vec<(Quadruple, Point2)>,
    grid: GridIndex,
}

impl GammaOrbitSet {
    pub fn new(k: u64, n_max: u64) -> Result<Self> {
        if k == 0 || n_max == 0 {
            return Err(Error::Precondition("GammaOrbit needs k >= 1 and n_max >= 1".into()));
        }
        if n_max > 1_000_000 {
            return Err(Error::Precondition(format!("n_max {n_max} too large")));
        }
        let mut members = Vec::new();
        for n in 0..=n_max {
            let mut seen: Vec<Quadruple> = Vec::new();
            for g in solve_quadruples(n, k) {
                let form = g.canonicalize();
                if !seen.contains(&form) {
                    seen.push(form);
                    let x = g.orbit_point();
                    members.push((g, Point2::new(x.x + 0.0, x.y + 0.0)));
                }
            }
        }
        members.sort_by(|a, b| a.1.lex_cmp(&b.1));
        let grid = GridIndex::new(members.iter().map(|m| m.1).collect(), 128);
        let horizon = crate::counting::gamma_length(n_max);
        Ok(Self { k, n_max, horizon, members, grid })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    /// Distance from the origin up to which the orbit is complete.
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn members(&self) -> &[(Quadruple, Point2)] {
        &self.members
    }

    fn find(&self, p: Point2) -> Option<usize> {
        let mut hit = None;
        self.grid.query(p, 1e-9, |i| {
            let q = self.members[i].1;
            if (q.x - p.x).abs() <= 1e-12 && (q.y - p.y).abs() <= 1e-12 {
                hit = Some(i);
            }
        });
        hit
    }
}

impl PointSet {
    pub fn new(desc: &PointSetDescriptor) -> Result<Self> {
        Ok(match *desc {
            PointSetDescriptor::SquareLattice => PointSet::SquareLattice,
            PointSetDescriptor::IrrationalLattice { alpha } => {
                if !(alpha.is_finite() && alpha > 0.0) {
                    return Err(Error::Precondition(format!("lattice spacing {alpha} must be positive")));
                }
                PointSet::IrrationalLattice { alpha }
            }
            PointSetDescriptor::CrossSet => PointSet::CrossSet,
            PointSetDescriptor::GammaOrbit { k, n_max } => {
                PointSet::GammaOrbit(GammaOrbitSet::new(k, n_max)?)
            }
        })
    }

    pub fn descriptor(&self) -> PointSetDescriptor {
        match self {
            PointSet::SquareLattice => PointSetDescriptor::SquareLattice,
            PointSet::IrrationalLattice { alpha } => PointSetDescriptor::IrrationalLattice { alpha: *alpha },
            PointSet::CrossSet => PointSetDescriptor::CrossSet,
            PointSet::GammaOrbit(g) => PointSetDescriptor::GammaOrbit { k: g.k, n_max: g.n_max },
        }
    }

    fn check_metric(&self, metric: &Metric) -> Result<()> {
        match (self, metric) {
            (PointSet::GammaOrbit(_), Metric::HyperbolicDisk) => Ok(()),
            (PointSet::GammaOrbit(_), _) => Err(Error::InvalidMetric(
                "orbit sets live in the disk; use the hyperbolic metric".into(),
            )),
            (_, Metric::HyperbolicDisk) => Err(Error::InvalidMetric(
                "lattice sets live in the plane; use an L^k metric".into(),
            )),
            _ => Ok(()),
        }
    }

    /// Fails if a ball of `radius` around `center` may hold members the set
    /// has not enumerated.
    pub fn check_horizon(&self, metric: &Metric, center: Point2, radius: f64) -> Result<()> {
        self.check_metric(metric)?;
        metric.check_point(center)?;
        if let PointSet::GammaOrbit(g) = self {
            let needed = metric.dist(Point2::ORIGIN, center) + radius;
            if needed > g.horizon * (1.0 + 1e-12) {
                return Err(Error::Horizon { needed, horizon: g.horizon });
            }
        }
        Ok(())
    }

    /// Calls `f` once for every member at distance `<= radius` from `center`,
    /// in no particular order.
    pub fn for_each_in_ball(
        &self,
        metric: &Metric,
        center: Point2,
        radius: f64,
        mut f: impl FnMut(Point2, f64),
    ) -> Result<()> {
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(Error::Precondition(format!("radius {radius} must be finite and >= 0")));
        }
        self.check_horizon(metric, center, radius)?;
        let mut visit = |p: Point2| {
            let d = metric.dist(center, p);
            if d <= radius {
                f(p, d);
            }
        };
        match self {
            PointSet::SquareLattice => {
                for i in int_range(center.x, radius, 1.0) {
                    for j in int_range(center.y, radius, 1.0) {
                        visit(Point2::new(i as f64, j as f64));
                    }
                }
            }
            PointSet::IrrationalLattice { alpha } => {
                for i in int_range(center.x, radius, 1.0) {
                    for j in int_range(center.y, radius, *alpha) {
                        visit(Point2::new(i as f64, j as f64 * alpha));
                    }
                }
            }
            PointSet::CrossSet => {
                if center.y.abs() <= radius {
                    for i in int_range(center.x, radius, 1.0) {
                        visit(Point2::new(i as f64, 0.0));
                    }
                }
                if center.x.abs() <= radius {
                    for j in int_range(center.y, radius, 1.0) {
                        if j != 0 {
                            visit(Point2::new(0.0, j as f64));
                        }
                    }
                }
            }
            PointSet::GammaOrbit(g) => {
                let (ec, er) = hyperbolic_ball_as_euclidean(center, radius);
                g.grid.query(ec, er * (1.0 + 1e-9) + 1e-12, |i| visit(g.members[i].1));
            }
        }
        Ok(())
    }

    /// Members at distance `<= radius` from `center`, sorted lexicographically.
    pub fn enumerate_in_ball(&self, metric: &Metric, center: Point2, radius: f64) -> Result<Vec<Point2>> {
        let mut out = Vec::new();
        self.for_each_in_ball(metric, center, radius, |p, _| out.push(p))?;
        out.sort_by(|a, b| a.lex_cmp(b));
        Ok(out)
    }

    /// The `count` members closest to `query`, ties broken lexicographically.
    pub fn nearest_sorted(&self, metric: &Metric, query: Point2, count: usize) -> Result<Vec<(Point2, f64)>> {
        if count == 0 {
            return Err(Error::Precondition("count must be >= 1".into()));
        }
        let mut radius = match self {
            PointSet::GammaOrbit(_) => 0.5,
            _ => 1.0 + (count as f64).sqrt(),
        };
        loop {
            let mut found = Vec::new();
            let res = self.for_each_in_ball(metric, query, radius, |p, d| found.push((p, d)));
            if let Err(e) = res {
                // Shrink back to the largest complete ball before giving up.
                if let (Error::Horizon { horizon, .. }, PointSet::GammaOrbit(_)) = (&e, self) {
                    let room = horizon - metric.dist(Point2::ORIGIN, query);
                    if room > 0.0 && room < radius {
                        let mut found = Vec::new();
                        self.for_each_in_ball(metric, query, room, |p, d| found.push((p, d)))?;
                        if found.len() >= count {
                            return Ok(finish_nearest(found, count));
                        }
                    }
                }
                return Err(e);
            }
            if found.len() >= count {
                return Ok(finish_nearest(found, count));
            }
            radius *= 2.0;
        }
    }

    /// For each of the `count` members nearest `x`, the group element taking
    /// that member to `basepoint`.
    pub fn isometries_to(&self, metric: &Metric, basepoint: Point2, x: Point2, count: usize) -> Result<Vec<Isometry>> {
        let near = self.nearest_sorted(metric, x, count)?;
        match self {
            PointSet::SquareLattice | PointSet::IrrationalLattice { .. } => {
                Ok(near.into_iter().map(|(s, _)| Isometry::Translation(basepoint - s)).collect())
            }
            PointSet::CrossSet => Err(Error::NoIsometries(
                "the axis cross is not the orbit of a group".into(),
            )),
            PointSet::GammaOrbit(g) => {
                let base = g.find(basepoint).ok_or_else(|| {
                    Error::Precondition("basepoint is not a member of the orbit".into())
                })?;
                let to_base = g.members[base].0;
                near.into_iter()
                    .map(|(s, _)| {
                        let i = g.find(s).expect("nearest members come from the index");
                        Ok(Isometry::Mobius(to_base.compose(&g.members[i].0.inverse())?))
                    })
                    .collect()
            }
        }
    }

    /// Whether `p` is (within 1e-9) a member.
    pub fn contains(&self, p: Point2) -> bool {
        let near_int = |v: f64| (v - v.round()).abs() <= 1e-9;
        match self {
            PointSet::SquareLattice => near_int(p.x) && near_int(p.y),
            PointSet::IrrationalLattice { alpha } => near_int(p.x) && near_int(p.y / alpha),
            PointSet::CrossSet => (near_int(p.x) && p.y.abs() <= 1e-9) || (near_int(p.y) && p.x.abs() <= 1e-9),
            PointSet::GammaOrbit(g) => g.find(p).is_some(),
        }
    }

    pub fn is_group_orbit(&self) -> bool {
        !matches!(self, PointSet::CrossSet)
    }

    /// Whether `x` lies in the group-invariant family of cusp horoballs used
    /// to give orbit-set zones finite extent. Always false for lattices.
    pub fn in_cusp(&self, x: Point2) -> bool {
        match self {
            PointSet::GammaOrbit(_) => cusp_height(x) > CUSP_HEIGHT,
            _ => false,
        }
    }
}

/// Horoballs of height above this (upper half-plane units, with the basepoint
/// at height 1) are cut from orbit-set zones before measuring area.
pub const CUSP_HEIGHT: f64 = 1.5;

/// `max over γ ∈ PSL(2, Z)` of `Im γ(z)` for the upper half-plane image of `x`.
///
/// This is invariant under every integer quadruple group, so removing the
/// points above a fixed height removes the same area from each fundamental
/// domain.
pub fn cusp_height(x: Point2) -> f64 {
    let z = disk_to_upper(x);
    let y = z.im;
    if !(y > 0.0) {
        return f64::INFINITY;
    }
    let mut best = y;
    // Im γz = y / |qz - p|² can only beat height 1 when q² <= 1 / y.
    let q_max = (1.0 / y).sqrt().floor() as i64 + 1;
    for q in 1..=q_max.min(1 << 20) {
        let qf = q as f64;
        let p0 = (qf * z.re).round() as i64;
        for p in [p0 - 1, p0, p0 + 1] {
            let w = Complex64::new(qf * z.re - p as f64, qf * y);
            let h = y / w.norm_sqr();
            if h > best {
                best = h;
            }
        }
    }
    best
}

fn finish_nearest(mut found: Vec<(Point2, f64)>, count: usize) -> Vec<(Point2, f64)> {
    found.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.lex_cmp(&b.0)));
    found.truncate(count);
    found
}

fn int_range(c: f64, r: f64, spacing: f64) -> std::ops::RangeInclusive<i64> {
    ((c - r) / spacing).ceil() as i64..=((c + r) / spacing).floor() as i64
}

/// Euclidean center and radius of the disk-metric ball `{z : d(c, z) <= radius}`.
pub(crate) fn hyperbolic_ball_as_euclidean(c: Point2, radius: f64) -> (Point2, f64) {
    let t = radius.tanh();
    let c2 = c.norm_sq();
    let den = 1.0 - t * t * c2;
    (c * ((1.0 - t * t) / den), t * (1.0 - c2) / den)
}

/// Uniform bucket grid over `[-1, 1]²`.
#[derive(Debug, Clone)]
struct GridIndex {
    size: usize,
    cells: Vec<Vec<usize>>,
    points: Vec<Point2>,
}

impl GridIndex {
    fn new(points: Vec<Point2>, size: usize) -> Self {
        let mut cells = vec![Vec::new(); size * size];
        for (i, p) in points.iter().enumerate() {
            let (cx, cy) = (Self::cell(p.x, size), Self::cell(p.y, size));
            cells[cy * size + cx].push(i);
        }
        Self { size, cells, points }
    }

    fn cell(v: f64, size: usize) -> usize {
        (((v + 1.0) * 0.5 * size as f64).floor().max(0.0) as usize).min(size - 1)
    }

    /// Indices of points within Euclidean distance `r` of `c`.
    fn query(&self, c: Point2, r: f64, mut f: impl FnMut(usize)) {
        let (x0, x1) = (Self::cell(c.x - r, self.size), Self::cell(c.x + r, self.size));
        let (y0, y1) = (Self::cell(c.y - r, self.size), Self::cell(c.y + r, self.size));
        let r2 = r * r;
        for cy in y0..=y1 {
            for cx in x0..=x1 {
                for &i in &self.cells[cy * self.size + cx] {
                    let p = self.points[i];
                    if (p.x - c.x).powi(2) + (p.y - c.y).powi(2) <= r2 {
                        f(i);
                    }
                }
            }
        }
    }
}
