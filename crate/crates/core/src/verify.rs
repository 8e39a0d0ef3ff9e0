//! Sampled checks of the zone theorems: tiling, equal area, fundamental
//! domains, closure and concentricity, boundary measure, metric consistency.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{Metric, Point2, DEFAULT_TOL};
use crate::pointsets::PointSet;
use crate::zones::{
    area_estimate, classify, classify_unchecked, ray_profile, raster, AreaEstimate, CellKind, RaySample, Region,
    Window, ZoneRaster,
};

const MAX_DETAILS: usize = 10;
const BLOCK: u64 = 4096;

/// Outcome of one check. `passed` holds exactly when `statistic` is within
/// `threshold` in the sense documented by the check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_name: String,
    pub passed: bool,
    pub statistic: f64,
    pub threshold: f64,
    pub samples: u64,
    pub seed: u64,
    pub details: Vec<String>,
}

impl VerificationReport {
    fn new(name: &str, passed: bool, statistic: f64, threshold: f64, samples: u64, seed: u64, mut details: Vec<String>) -> Self {
        details.truncate(MAX_DETAILS);
        if !passed && details.is_empty() {
            details.push(format!("statistic {statistic} outside threshold {threshold}"));
        }
        if passed {
            details.clear();
        }
        Self { check_name: name.to_string(), passed, statistic, threshold, samples, seed, details }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn fmt_point(p: Point2) -> String {
    format!("({:.17e}, {:.17e})", p.x, p.y)
}

/// Runs `f` on `samples` points drawn from `region`, block-parallel with one
/// generator stream per block, and returns the per-sample outputs in order.
fn sample_map<T: Send>(
    metric: &Metric,
    region: Region,
    samples: u64,
    seed: u64,
    f: impl Fn(Point2) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    let blocks = samples.div_ceil(BLOCK);
    let parts: Vec<Result<Vec<T>>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let len = BLOCK.min(samples - b * BLOCK);
            (0..len).map(|_| f(region.sample(metric, &mut rng))).collect()
        })
        .collect();
    let mut out = Vec::with_capacity(samples as usize);
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// For sampled `x`: some member `s` has `x ∈ B_n(s)`, and at most one has
/// `x ∈ b_n(s)`. Candidates are the `4n` members nearest `x`.
pub fn check_tiling(
    metric: &Metric,
    set: &PointSet,
    n: usize,
    region: Region,
    samples: u64,
    seed: u64,
) -> Result<VerificationReport> {
    if n == 0 {
        return Err(Error::Precondition("zone index must be >= 1".into()));
    }
    region.validate(metric)?;
    let results = sample_map(metric, region, samples, seed, |x| {
        if !metric.contains(x) {
            return Ok(None);
        }
        let mut covered = 0usize;
        let mut small = 0usize;
        for (s, _) in set.nearest_sorted(metric, x, 4 * n)? {
            let c = classify_unchecked(metric, set, s, x, DEFAULT_TOL)?;
            covered += usize::from(c.in_big_b(n));
            small += usize::from(c.in_b(n));
        }
        Ok((covered == 0 || small > 1).then(|| format!("x={} covered_by={covered} in_b_of={small}", fmt_point(x))))
    })?;
    let bad: Vec<String> = results.into_iter().flatten().collect();
    let count = bad.len() as f64;
    Ok(VerificationReport::new("tiling", bad.is_empty(), count, 0.0, samples, seed, bad))
}

/// Region that contains `B_n` for the shipped sets.
pub fn default_area_region(metric: &Metric, set: &PointSet, n: usize) -> Region {
    match set {
        PointSet::GammaOrbit(_) => Region::Disk { radius: 1.3 },
        _ if metric.is_hyperbolic() => Region::Disk { radius: 1.0 },
        _ => {
            let half = (1.0 + (n as f64).sqrt()).clamp(1.0, 3.0);
            Region::Rect(Window::square(half))
        }
    }
}

/// Area estimates for several zones plus the pairwise z-score check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EqualAreaOutcome {
    pub report: VerificationReport,
    pub estimates: Vec<(usize, AreaEstimate)>,
}

/// Seed used for zone `n` when estimating several areas from one seed.
pub fn zone_seed(seed: u64, n: usize) -> u64 {
    seed ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// Pairwise z-scores `|A_i - A_j| / sqrt(se_i² + se_j²)` must all be below 3.
///
/// Each zone is sampled in the smallest of a few growing regions that
/// contains it (no zone hits on the region's edge, at least one inside).
pub fn check_equal_area(
    metric: &Metric,
    set: &PointSet,
    basepoint: Point2,
    n_list: &[usize],
    samples: u64,
    seed: u64,
) -> Result<EqualAreaOutcome> {
    if n_list.len() < 2 {
        return Err(Error::Precondition("equal-area check needs at least two zones".into()));
    }
    let mut estimates = Vec::new();
    for &n in n_list {
        let est = fitted_area(metric, set, basepoint, n, samples, zone_seed(seed, n))?;
        estimates.push((n, est));
    }
    let mut worst = 0.0f64;
    let mut details = Vec::new();
    for i in 0..estimates.len() {
        for j in i + 1..estimates.len() {
            let (ni, a) = estimates[i];
            let (nj, b) = estimates[j];
            let se = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
            let z = if se > 0.0 { (a.area - b.area).abs() / se } else if a.area == b.area { 0.0 } else { f64::INFINITY };
            if z >= 3.0 {
                details.push(format!("B_{ni}={:.6} B_{nj}={:.6} z={z:.3}", a.area, b.area));
            }
            worst = worst.max(z);
        }
    }
    let report = VerificationReport::new("equal_area", worst < 3.0, worst, 3.0, samples, seed, details);
    Ok(EqualAreaOutcome { report, estimates })
}

fn fitted_area(metric: &Metric, set: &PointSet, basepoint: Point2, n: usize, samples: u64, seed: u64) -> Result<AreaEstimate> {
    let candidates: Vec<Region> = match default_area_region(metric, set, n) {
        Region::Rect(_) => [0.75, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 6.0].iter().map(|&h| Region::Rect(Window::square(h))).collect(),
        r => vec![r],
    };
    let mut last = None;
    for region in candidates {
        match area_estimate(metric, set, basepoint, n, region, samples, seed) {
            Err(e @ Error::WindowTooSmall { .. }) => last = Some(e),
            // A region inside the zone's inner hole also has a clean edge.
            Ok(est) if est.hits == 0 => last = Some(Error::WindowTooSmall { zone: n }),
            other => return other,
        }
    }
    Err(last.unwrap_or(Error::WindowTooSmall { zone: n }))
}

/// For sampled `x`, exactly one candidate isometry `g` has `g·x ∈ b_n(basepoint)`.
///
/// Samples whose images come within `1e-6` of the region diagonal of a zone
/// boundary are discarded. Passes when at least 99.5% of the kept samples
/// have exactly one hit and at most 20% were discarded.
pub fn check_fundamental_domain(
    metric: &Metric,
    set: &PointSet,
    basepoint: Point2,
    n: usize,
    region: Region,
    samples: u64,
    seed: u64,
) -> Result<VerificationReport> {
    if n == 0 {
        return Err(Error::Precondition("zone index must be >= 1".into()));
    }
    region.validate(metric)?;
    if !set.is_group_orbit() {
        return Err(Error::NoIsometries("fundamental domains need a group orbit".into()));
    }
    classify(metric, set, basepoint, basepoint, DEFAULT_TOL)?;
    let diag = match region {
        Region::Rect(w) => w.diagonal(),
        Region::Disk { radius } => match metric {
            Metric::HyperbolicDisk => 2.0 * std::f64::consts::SQRT_2 * radius.tanh(),
            Metric::Lk { .. } => 2.0 * std::f64::consts::SQRT_2 * radius,
        },
    };
    let band = 1e-6 * diag;
    // None: discarded.
    let results = sample_map(metric, region, samples, seed, |x| -> Result<Option<(usize, Point2)>> {
        if !metric.contains(x) {
            return Ok(None);
        }
        let mut hits = 0;
        for g in set.isometries_to(metric, basepoint, x, 4 * n + 8)? {
            let y = g.apply(x);
            if !metric.contains(y) {
                continue;
            }
            let wide = classify_unchecked(metric, set, basepoint, y, band)?;
            if wide.is_boundary() {
                return Ok(None);
            }
            hits += usize::from(classify_unchecked(metric, set, basepoint, y, DEFAULT_TOL)?.in_b(n));
        }
        Ok(Some((hits, x)))
    })?;
    let kept: Vec<(usize, Point2)> = results.iter().flatten().copied().collect();
    let discarded = results.len() - kept.len();
    let good = kept.iter().filter(|k| k.0 == 1).count();
    let frac = if kept.is_empty() { 0.0 } else { good as f64 / kept.len() as f64 };
    let inconclusive = discarded as f64 > 0.2 * samples as f64;
    let mut details: Vec<String> = kept
        .iter()
        .filter(|k| k.0 != 1)
        .map(|(h, x)| format!("x={} hits={h}", fmt_point(*x)))
        .collect();
    if inconclusive {
        details.insert(0, format!("inconclusive: {discarded} of {samples} samples discarded near boundaries"));
    }
    let passed = !inconclusive && frac >= 0.995;
    Ok(VerificationReport::new("fundamental_domain", passed, frac, 0.995, samples, seed, details))
}

/// Cells that are flagged, or that have a 4-neighbour with another zone index.
pub fn boundary_fraction(r: &ZoneRaster) -> f64 {
    let (w, h) = (r.width, r.height);
    let mut count = 0usize;
    let mut zone_cells = 0usize;
    for j in 0..h {
        for i in 0..w {
            let c = r.cell(i, j);
            if !c.is_zone() {
                continue;
            }
            zone_cells += 1;
            let differs = |ii: usize, jj: usize| {
                let d = r.cell(ii, jj);
                d.is_zone() && d.zone_index != c.zone_index
            };
            let edge = c.boundary
                || (i > 0 && differs(i - 1, j))
                || (i + 1 < w && differs(i + 1, j))
                || (j > 0 && differs(i, j - 1))
                || (j + 1 < h && differs(i, j + 1));
            count += usize::from(edge);
        }
    }
    if zone_cells == 0 {
        0.0
    } else {
        count as f64 / zone_cells as f64
    }
}

/// Least-squares slope of `log(fraction)` against `log(resolution)`; passes
/// when the decay exponent is at least 0.8, as for boundaries of measure zero.
pub fn check_boundary_measure(
    metric: &Metric,
    set: &PointSet,
    basepoint: Point2,
    resolutions: &[usize],
    window: Window,
) -> Result<VerificationReport> {
    if resolutions.len() < 2 {
        return Err(Error::Precondition("boundary probe needs at least two resolutions".into()));
    }
    let mut pts = Vec::new();
    for &res in resolutions {
        let r = raster(metric, set, basepoint, window, res, res, DEFAULT_TOL)?;
        let f = boundary_fraction(&r).max(1.0 / (res * res) as f64);
        pts.push(((res as f64).ln(), f.ln(), f, res));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let exponent = if sxx > 0.0 { -sxy / sxx } else { 0.0 };
    let details = pts.iter().map(|p| format!("resolution {} boundary fraction {:.6}", p.3, p.2)).collect();
    let samples = resolutions.iter().map(|&r| (r * r) as u64).sum();
    Ok(VerificationReport::new("boundary_measure", exponent >= 0.8, exponent, 0.8, samples, 0, details))
}

/// Every flagged cell (with `m`, `ell`) sees non-flagged cells of index
/// `m + 1` and `m + ell` within 3 cells; passes at 99% of flagged cells.
pub fn check_closure(r: &ZoneRaster) -> VerificationReport {
    let (w, h) = (r.width as isize, r.height as isize);
    let mut flagged = 0usize;
    let mut good = 0usize;
    let mut details = Vec::new();
    for j in 0..h {
        for i in 0..w {
            let c = r.cell(i as usize, j as usize);
            if !(c.is_zone() && c.boundary) {
                continue;
            }
            flagged += 1;
            let (lo, hi) = (c.zone_index, c.zone_index + c.ell - 1);
            let (mut seen_lo, mut seen_hi) = (false, false);
            for dj in -3..=3 {
                for di in -3..=3 {
                    let (ii, jj) = (i + di, j + dj);
                    if ii < 0 || jj < 0 || ii >= w || jj >= h {
                        continue;
                    }
                    let d = r.cell(ii as usize, jj as usize);
                    if d.is_zone() && !d.boundary {
                        seen_lo |= d.zone_index == lo;
                        seen_hi |= d.zone_index == hi;
                    }
                }
            }
            if seen_lo && seen_hi {
                good += 1;
            } else {
                let p = r.window.pixel_center(i as usize, j as usize, r.width, r.height);
                details.push(format!("cell at {} with indices {lo}..={hi}", fmt_point(p)));
            }
        }
    }
    let frac = if flagged == 0 { 1.0 } else { good as f64 / flagged as f64 };
    VerificationReport::new("closure", frac >= 0.99, frac, 0.99, flagged as u64, 0, details)
}

/// Problems in a ray profile: a drop in zone index, a gap in the
/// `B`-ranges of consecutive samples, or an isolated simple crossing whose
/// index does not go up by exactly one.
pub fn ray_profile_defects(profile: &[RaySample]) -> Vec<String> {
    let mut out = Vec::new();
    for w in profile.windows(2) {
        let (p, q) = (w[0], w[1]);
        if q.zone_index < p.zone_index {
            out.push(format!("index drops from {} to {} at t={}", p.zone_index, q.zone_index, q.t));
        }
        if q.zone_index > p.zone_index + p.ell {
            out.push(format!("index jumps from {} (ell {}) to {} at t={}", p.zone_index, p.ell, q.zone_index, q.t));
        }
    }
    for w in profile.windows(3) {
        let (p, b, q) = (w[0], w[1], w[2]);
        if b.boundary && b.ell == 2 && !p.boundary && !q.boundary && q.zone_index != p.zone_index + 1 {
            out.push(format!("simple crossing at t={} goes from {} to {}", b.t, p.zone_index, q.zone_index));
        }
    }
    out
}

/// Ray profiles in `directions` evenly spaced directions, checked with
/// [`ray_profile_defects`].
pub fn check_ray_concentricity(
    metric: &Metric,
    set: &PointSet,
    basepoint: Point2,
    directions: usize,
    t_max: f64,
    steps: usize,
) -> Result<VerificationReport> {
    let profiles: Vec<Result<Vec<String>>> = (0..directions)
        .into_par_iter()
        .map(|i| {
            let th = std::f64::consts::TAU * i as f64 / directions as f64;
            let prof = ray_profile(metric, set, basepoint, Point2::new(th.cos(), th.sin()), t_max, steps)?;
            Ok(ray_profile_defects(&prof).into_iter().map(|d| format!("direction {i}: {d}")).collect())
        })
        .collect();
    let mut details = Vec::new();
    for p in profiles {
        details.extend(p?);
    }
    let count = details.len() as f64;
    Ok(VerificationReport::new("concentricity", details.is_empty(), count, 0.0, directions as u64, 0, details))
}

/// Random probes of metric consistency: sampled `x`, `a` and `0 < r < R`.
pub fn check_consistency(metric: &Metric, samples: u64, probes: usize, seed: u64) -> Result<VerificationReport> {
    metric.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut details = Vec::new();
    for _ in 0..samples {
        let (x, a) = match metric {
            Metric::HyperbolicDisk => (disk_point(&mut rng, 0.9), disk_point(&mut rng, 0.9)),
            Metric::Lk { .. } => (
                Point2::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)),
                Point2::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)),
            ),
        };
        let big_r = metric.distance(x, a)?;
        if big_r < 1e-6 {
            continue;
        }
        let r = big_r * rng.random_range(0.05..0.95);
        if !metric.check_metric_consistency(x, big_r, r, a, probes)? {
            details.push(format!("x={} a={} r={r}", fmt_point(x), fmt_point(a)));
        }
    }
    let count = details.len() as f64;
    Ok(VerificationReport::new("consistency", details.is_empty(), count, 0.0, samples, seed, details))
}

fn disk_point(rng: &mut ChaCha8Rng, rmax: f64) -> Point2 {
    let s = rmax * rng.random::<f64>().sqrt();
    let th = rng.random_range(0.0..std::f64::consts::TAU);
    Point2::new(s * th.cos(), s * th.sin())
}

/// Fraction of zone cells whose index or flag differs between two rasters of
/// the same window.
pub fn raster_disagreement(a: &ZoneRaster, b: &ZoneRaster) -> Result<f64> {
    if a.width != b.width || a.height != b.height {
        return Err(Error::Precondition("rasters differ in size".into()));
    }
    let diff = a
        .cells
        .iter()
        .zip(&b.cells)
        .filter(|(x, y)| x.kind == CellKind::Zone && (x.zone_index != y.zone_index || x.boundary != y.boundary))
        .count();
    Ok(diff as f64 / a.cells.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointsets::PointSetDescriptor;

    #[test]
    fn tiling_small() {
        let rep = check_tiling(&Metric::EUCLIDEAN, &PointSet::SquareLattice, 2, Region::Rect(Window::square(3.0)), 2000, 1)
            .unwrap();
        assert!(rep.passed, "{rep:?}");
        assert!(rep.details.is_empty());
    }

    #[test]
    fn equal_area_negative_control() {
        let out = check_equal_area(&Metric::EUCLIDEAN, &PointSet::CrossSet, Point2::ORIGIN, &[1, 2], 100_000, 3).unwrap();
        assert!(!out.report.passed, "{:?}", out);
        assert!(!out.report.details.is_empty());
    }

    #[test]
    fn fundamental_domain_lattice() {
        let rep = check_fundamental_domain(
            &Metric::EUCLIDEAN,
            &PointSet::SquareLattice,
            Point2::ORIGIN,
            2,
            Region::Rect(Window::square(3.0)),
            2000,
            5,
        )
        .unwrap();
        assert!(rep.passed, "{rep:?}");
        assert!(check_fundamental_domain(
            &Metric::EUCLIDEAN,
            &PointSet::CrossSet,
            Point2::ORIGIN,
            1,
            Region::Rect(Window::square(1.0)),
            10,
            5
        )
        .is_err());
    }

    #[test]
    fn ray_defects_detect_skips() {
        let s = |t, z, ell| RaySample { t, zone_index: z, ell, boundary: ell >= 2 };
        assert!(ray_profile_defects(&[s(0.0, 1, 1), s(0.5, 1, 2), s(0.6, 2, 1)]).is_empty());
        assert!(!ray_profile_defects(&[s(0.0, 1, 1), s(0.6, 3, 1)]).is_empty());
        assert!(!ray_profile_defects(&[s(0.0, 2, 1), s(0.6, 1, 1)]).is_empty());
    }

    #[test]
    fn consistency_sweep_l2_and_disk() {
        for m in [Metric::EUCLIDEAN, Metric::HyperbolicDisk, Metric::lk(4.0).unwrap()] {
            let rep = check_consistency(&m, 50, 200, 9).unwrap();
            assert!(rep.passed, "{m:?} {rep:?}");
        }
    }

    #[test]
    fn report_json_keys() {
        let rep = check_tiling(&Metric::EUCLIDEAN, &PointSet::SquareLattice, 1, Region::Rect(Window::square(1.0)), 10, 1)
            .unwrap();
        let v: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
        for key in ["check_name", "passed", "statistic", "threshold", "samples", "seed", "details"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn gamma_tiling_small() {
        let set = PointSet::new(&PointSetDescriptor::GammaOrbit { k: 2, n_max: 200 }).unwrap();
        let rep = check_tiling(&Metric::HyperbolicDisk, &set, 2, Region::Disk { radius: 1.0 }, 500, 2).unwrap();
        assert!(rep.passed, "{rep:?}");
    }
}
