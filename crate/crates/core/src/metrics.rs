//! Plane metrics: the `L^k` norms on `R^2` and the Poincaré disk.
//!
//! The disk metric is normalized so that the distance from the origin to `z`
//! is `artanh |z|`. This is half of the curvature `-1` distance; geodesics and
//! zone structure are unchanged, and areas differ by a constant factor of 4.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative tolerance for "lies on the circle" decisions.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A point of the plane (or of the open unit disk).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn norm_sq(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    pub fn from_complex(z: Complex64) -> Self {
        Self { x: z.re, y: z.im }
    }

    /// Lexicographic order on `(x, y)`; used for every deterministic tie-break.
    pub fn lex_cmp(&self, other: &Point2) -> std::cmp::Ordering {
        self.x.total_cmp(&other.x).then(self.y.total_cmp(&other.y))
    }
}

impl From<[f64; 2]> for Point2 {
    fn from(v: [f64; 2]) -> Self {
        Self::new(v[0], v[1])
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

impl std::ops::Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

/// A choice of plane metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Metric {
    /// `(|dx|^k + |dy|^k)^(1/k)` for real `k >= 1`.
    Lk { exponent: f64 },
    /// Poincaré disk with `d(0, z) = artanh |z|`.
    HyperbolicDisk,
}

impl Metric {
    pub const MANHATTAN: Metric = Metric::Lk { exponent: 1.0 };
    pub const EUCLIDEAN: Metric = Metric::Lk { exponent: 2.0 };

    pub fn lk(exponent: f64) -> Result<Self> {
        let m = Metric::Lk { exponent };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Metric::Lk { exponent } if !(exponent.is_finite() && exponent >= 1.0) => Err(
                Error::InvalidMetric(format!("exponent {exponent} must be a finite real >= 1")),
            ),
            _ => Ok(()),
        }
    }

    pub fn is_hyperbolic(&self) -> bool {
        matches!(self, Metric::HyperbolicDisk)
    }

    pub fn check_point(&self, p: Point2) -> Result<()> {
        if !p.is_finite() {
            return Err(Error::Domain(p));
        }
        if self.is_hyperbolic() && p.norm_sq() >= 1.0 {
            return Err(Error::Domain(p));
        }
        Ok(())
    }

    pub fn contains(&self, p: Point2) -> bool {
        self.check_point(p).is_ok()
    }

    pub fn distance(&self, a: Point2, b: Point2) -> Result<f64> {
        self.check_point(a)?;
        self.check_point(b)?;
        Ok(self.dist(a, b))
    }

    /// Distance without domain checks. Symmetric bit-for-bit.
    #[inline]
    pub(crate) fn dist(&self, a: Point2, b: Point2) -> f64 {
        match *self {
            Metric::Lk { exponent } => lk_norm(exponent, a.x - b.x, a.y - b.y),
            Metric::HyperbolicDisk => {
                let delta = (a.x - b.x).hypot(a.y - b.y);
                let conf = (1.0 - a.norm_sq()) * (1.0 - b.norm_sq());
                (delta / conf.sqrt()).asinh()
            }
        }
    }

    /// Area density with respect to Lebesgue measure at `p`.
    pub fn area_density(&self, p: Point2) -> f64 {
        match self {
            Metric::Lk { .. } => 1.0,
            Metric::HyperbolicDisk => {
                let c = 1.0 - p.norm_sq();
                1.0 / (c * c)
            }
        }
    }

    /// Point at distance `r` from `x` on the minimizing segment toward `a`.
    pub fn segment_point(&self, x: Point2, a: Point2, r: f64) -> Result<Point2> {
        let d = self.distance(x, a)?;
        if !(r >= 0.0 && r <= d * (1.0 + 1e-12)) {
            return Err(Error::Precondition(format!(
                "segment parameter {r} outside [0, {d}]"
            )));
        }
        if d == 0.0 {
            return Ok(x);
        }
        let r = r.min(d);
        match self {
            // Norms are homogeneous, so the chord fraction is exactly r / d.
            Metric::Lk { .. } => Ok(x + (a - x) * (r / d)),
            Metric::HyperbolicDisk => {
                let (xc, ac) = (x.to_complex(), a.to_complex());
                let u = (ac - xc) / (Complex64::new(1.0, 0.0) - xc.conj() * ac);
                let z0 = u / u.norm() * r.tanh();
                Ok(Point2::from_complex(translate_from_origin(xc, z0)))
            }
        }
    }

    /// Sampled probe of metric consistency: with `z` at distance `r` from `x`
    /// toward `a` (where `d(x, a) = R`), every probe `w` with `d(z, w) < d(z, a)`
    /// must satisfy `d(x, w) < R`.
    pub fn check_metric_consistency(
        &self,
        x: Point2,
        big_r: f64,
        r: f64,
        a: Point2,
        n_samples: usize,
    ) -> Result<bool> {
        if !(r > 0.0 && r < big_r) {
            return Err(Error::Precondition(format!("need 0 < r < R, got r={r}, R={big_r}")));
        }
        let dxa = self.distance(x, a)?;
        if (dxa - big_r).abs() > 1e-9 * (1.0 + big_r) {
            return Err(Error::Precondition(format!("d(x, a) = {dxa} but R = {big_r}")));
        }
        let z = self.segment_point(x, a, r)?;
        let rho = self.dist(z, a);
        let slack = 1e-12 * (1.0 + big_r);
        let mut rng = ChaCha8Rng::seed_from_u64(0x6d65_7472_6963);
        for i in 0..n_samples {
            // Half the probes are spread over the ball, half concentrate near `a`
            // where a violation would first appear.
            let spread = if i % 2 == 0 { 1.0 } else { 0.02 };
            let center = if i % 2 == 0 { z } else { a };
            let w = match self {
                Metric::Lk { .. } => Point2::new(
                    center.x + rho * spread * rng.random_range(-1.0..1.0),
                    center.y + rho * spread * rng.random_range(-1.0..1.0),
                ),
                Metric::HyperbolicDisk => {
                    let t = (rho * spread * 1.05).tanh() * rng.random::<f64>().sqrt();
                    let u = Complex64::from_polar(t, rng.random_range(0.0..std::f64::consts::TAU));
                    Point2::from_complex(translate_from_origin(center.to_complex(), u))
                }
            };
            if !self.contains(w) {
                continue;
            }
            if self.dist(z, w) < rho && self.dist(x, w) >= big_r + slack {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `(|dx|^k + |dy|^k)^(1/k)`, evaluated with scaling to avoid overflow.
#[inline]
pub(crate) fn lk_norm(k: f64, dx: f64, dy: f64) -> f64 {
    let (ax, ay) = (dx.abs(), dy.abs());
    if k == 1.0 {
        return ax + ay;
    }
    if k == 2.0 {
        return ax.hypot(ay);
    }
    let (hi, lo) = if ax >= ay { (ax, ay) } else { (ay, ax) };
    if hi == 0.0 {
        return 0.0;
    }
    let t = lo / hi;
    let s = if k == 4.0 {
        let t2 = t * t;
        (1.0 + t2 * t2).sqrt().sqrt()
    } else if k.fract() == 0.0 && k <= 64.0 {
        (1.0 + t.powi(k as i32)).powf(1.0 / k)
    } else {
        (1.0 + t.powf(k)).powf(1.0 / k)
    };
    hi * s
}

/// Gradient of `v -> ||v||_k` at `v != 0`: `sign(v_i) |v_i|^(k-1) / ||v||^(k-1)`.
pub(crate) fn lk_norm_gradient(k: f64, v: Point2) -> Point2 {
    let n = lk_norm(k, v.x, v.y);
    let comp = |c: f64| {
        if c == 0.0 {
            0.0
        } else {
            c.signum() * (c.abs() / n).powf(k - 1.0)
        }
    };
    Point2::new(comp(v.x), comp(v.y))
}

/// Disk isometry sending 0 to `c`, applied to `u`: `(u + c) / (1 + conj(c) u)`.
pub(crate) fn translate_from_origin(c: Complex64, u: Complex64) -> Complex64 {
    (u + c) / (Complex64::new(1.0, 0.0) + c.conj() * u)
}

/// Counts `(inside, on_circle)` for a ball of `radius` around `center`.
///
/// A point is on the circle when `|d - radius| <= tol * (1 + radius)` and
/// inside when `d < radius - tol * (1 + radius)`.
pub fn ball_counts(
    metric: &Metric,
    center: Point2,
    radius: f64,
    points: &[Point2],
    tol: f64,
) -> (usize, usize) {
    let band = tol * (1.0 + radius);
    let mut inside = 0;
    let mut on = 0;
    for &p in points {
        let d = metric.dist(center, p);
        if (d - radius).abs() <= band {
            on += 1;
        } else if d < radius {
            inside += 1;
        }
    }
    (inside, on)
}
