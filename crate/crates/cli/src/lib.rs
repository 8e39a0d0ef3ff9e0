//! Command-line front end: argument parsing, scene configs and emitters.

pub mod config;
pub mod format;
pub mod render;

use std::io::Write;
use std::path::PathBuf;

use brillouin::counting::{
    gamma_focusing_bruteforce, gamma_focusing_formula, gamma_focusing_upper_bound, gamma_length,
    lk_circle_coincidences, rg_bruteforce, rg_formula, torus_focusing,
};
use brillouin::mediatrix::{trace_level_set, TraceOptions};
use brillouin::pointsets::{PointSet, PointSetDescriptor};
use brillouin::verify::{
    check_boundary_measure, check_consistency, check_equal_area, check_fundamental_domain, check_tiling,
    VerificationReport,
};
use brillouin::zones::{raster_with, RasterOptions, Region, Window};
use brillouin::{Error, Metric, Point2};
use clap::{Parser, Subcommand, ValueEnum};
use num_rational::Ratio;

use crate::config::SceneConfig;
use crate::format::f17;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_HORIZON: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "brillouin", version, about = "Generalized Brillouin zones and focusing counts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sums-of-two-squares counts: formula against brute force.
    Rg {
        /// `n`, an inclusive range `a..b`, or a list `a,b,c`.
        list: String,
    },
    /// Focusing counts on the flat torus or the level-k modular surface.
    Count {
        #[arg(value_enum)]
        target: CountTarget,
        #[arg(long, default_value_t = 2)]
        k: u64,
        #[arg(long, default_value_t = 25)]
        nmax: u64,
        /// A single squared length `p/q` (torus only).
        #[arg(long)]
        t2: Option<String>,
    },
    /// Render a zone map.
    Zones {
        #[arg(long, conflicts_with = "preset")]
        config: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        ppm: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        width: Option<usize>,
        #[arg(long)]
        height: Option<usize>,
        /// Draw cells beyond the orbit horizon as unresolved.
        #[arg(long)]
        clip_horizon: bool,
        /// Print the effective config as JSON and exit.
        #[arg(long)]
        print_config: bool,
    },
    /// Trace the mediatrix of 0 and a for an even L^k norm.
    Trace {
        #[arg(long, default_value = "l4")]
        metric: String,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        /// `h` for `[-h, h]²`, or `x_min,x_max,y_min,y_max`.
        #[arg(long, default_value = "5", allow_hyphen_values = true)]
        window: String,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Seed the trace on the horizontal line through this point.
        #[arg(long, allow_hyphen_values = true)]
        hint: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a theorem check and print its JSON report.
    Verify {
        #[arg(long, value_enum)]
        check: CheckKind,
        /// `z2`, `irrational[:alpha]`, `cross`, `gamma[:k[:nmax]]`.
        #[arg(long, default_value = "z2")]
        set: String,
        /// Defaults to `l2` for planar sets and `hyperbolic` for orbit sets.
        #[arg(long)]
        metric: Option<String>,
        /// Zone indices: `n`, `a..b` or `a,b`.
        #[arg(long, default_value = "1")]
        n: String,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Sampling window half-width (planar) or disk radius (hyperbolic).
        #[arg(long)]
        window: Option<f64>,
        /// Raster resolutions for the boundary probe.
        #[arg(long, default_value = "300,600,1200")]
        resolutions: String,
    },
    /// Integers with two essentially different representations as p^k + q^k.
    Coincidences {
        #[arg(long, default_value_t = 4)]
        k: u32,
        #[arg(long, default_value_t = 200)]
        bound: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CountTarget {
    Torus,
    Gamma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    Tiling,
    Area,
    Fundamental,
    Boundary,
    Consistency,
}

/// An error with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: msg.into() }
    }

    fn io(e: std::io::Error) -> Self {
        Self { code: EXIT_IO, message: e.to_string() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Horizon { .. } => EXIT_HORIZON,
            _ => EXIT_USAGE,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::io(e)
    }
}

type CliResult = Result<i32, CliError>;

/// Runs a parsed command, writing its primary output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> CliResult {
    match cli.command {
        Command::Rg { list } => cmd_rg(&list, out),
        Command::Count { target, k, nmax, t2 } => cmd_count(target, k, nmax, t2.as_deref(), out),
        Command::Zones { config, preset, ppm, svg, width, height, clip_horizon, print_config } => {
            let mut cfg = match (config, preset) {
                (Some(path), _) => {
                    let text = std::fs::read_to_string(&path).map_err(CliError::io)?;
                    SceneConfig::from_json(&text)?
                }
                (None, Some(name)) => SceneConfig::preset(&name).ok_or_else(|| {
                    CliError::usage(format!("unknown preset {name}; known: {}", SceneConfig::PRESETS.join(", ")))
                })?,
                (None, None) => return Err(CliError::usage("zones needs --config or --preset")),
            };
            if let Some(w) = width {
                cfg.width = w;
            }
            if let Some(h) = height {
                cfg.height = h;
            }
            cfg.clip_horizon |= clip_horizon;
            cfg.validate()?;
            if print_config {
                writeln!(out, "{}", cfg.to_json())?;
                return Ok(EXIT_OK);
            }
            cmd_zones(&cfg, ppm, svg, out)
        }
        Command::Trace { metric, a, window, step, tol, hint, out: path } => {
            let metric = parse_metric(&metric)?;
            let a = parse_point(&a)?;
            let window = parse_window(&window)?;
            let hint = hint.as_deref().map(parse_point).transpose()?;
            cmd_trace(&metric, a, hint, window, step, tol, path, out)
        }
        Command::Verify { check, set, metric, n, samples, seed, window, resolutions } => {
            let desc = parse_set(&set)?;
            let metric = match metric {
                Some(m) => parse_metric(&m)?,
                None if matches!(desc, PointSetDescriptor::GammaOrbit { .. }) => Metric::HyperbolicDisk,
                None => Metric::EUCLIDEAN,
            };
            let ns = parse_list(&n)?;
            let res = parse_list(&resolutions)?;
            cmd_verify(check, &desc, &metric, &ns, samples, seed, window, &res, out)
        }
        Command::Coincidences { k, bound } => {
            for c in lk_circle_coincidences(k, bound)? {
                let reps: Vec<String> = c.representations.iter().map(|(p, q)| format!("{p}^{k}+{q}^{k}")).collect();
                writeln!(out, "{},{}", c.n, reps.join(","))?;
            }
            Ok(EXIT_OK)
        }
    }
}

/// Parses `n`, `a..b` (inclusive) or `a,b,c`.
pub fn parse_list(s: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::usage(format!("cannot parse index list {s:?}"));
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
}

pub fn parse_metric(s: &str) -> Result<Metric, CliError> {
    let t = s.trim().to_ascii_lowercase();
    let m = match t.as_str() {
        "l1" | "manhattan" => Metric::MANHATTAN,
        "l2" | "euclidean" => Metric::EUCLIDEAN,
        "hyperbolic" | "disk" => Metric::HyperbolicDisk,
        _ => {
            let num = t.strip_prefix("lk:").or_else(|| t.strip_prefix('l'));
            let k: f64 = num
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| CliError::usage(format!("unknown metric {s:?}")))?;
            Metric::lk(k)?
        }
    };
    Ok(m)
}

pub fn parse_set(s: &str) -> Result<PointSetDescriptor, CliError> {
    let bad = || CliError::usage(format!("unknown point set {s:?}"));
    let parts: Vec<&str> = s.trim().split(':').collect();
    let num = |i: usize, default: u64| -> Result<u64, CliError> {
        parts.get(i).map_or(Ok(default), |v| v.parse().map_err(|_| bad()))
    };
    Ok(match parts[0] {
        "z2" | "square" => PointSetDescriptor::SquareLattice,
        "cross" => PointSetDescriptor::CrossSet,
        "irrational" => match parts.get(1) {
            Some(a) => PointSetDescriptor::IrrationalLattice { alpha: a.parse().map_err(|_| bad())? },
            None => PointSetDescriptor::irrational_sqrt2(),
        },
        "gamma" => PointSetDescriptor::GammaOrbit { k: num(1, 2)?, n_max: num(2, 200)? },
        _ => return Err(bad()),
    })
}

pub fn parse_point(s: &str) -> Result<Point2, CliError> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::usage(format!("cannot parse point {s:?}")))?;
    match v[..] {
        [x, y] => Ok(Point2::new(x, y)),
        _ => Err(CliError::usage(format!("a point needs two coordinates, got {s:?}"))),
    }
}

pub fn parse_window(s: &str) -> Result<Window, CliError> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::usage(format!("cannot parse window {s:?}")))?;
    let w = match v[..] {
        [h] => Window::square(h),
        [a, b, c, d] => Window { x_min: a, x_max: b, y_min: c, y_max: d },
        _ => return Err(CliError::usage("window needs 1 or 4 numbers")),
    };
    w.validate()?;
    Ok(w)
}

fn cmd_rg(list: &str, out: &mut dyn Write) -> CliResult {
    let ns: Vec<u64> = parse_list(list)?.into_iter().map(|n| n as u64).collect();
    let mut code = EXIT_OK;
    for n in ns {
        let (f, b) = (rg_formula(n), rg_bruteforce(n));
        let flag = if f == b { "ok" } else { "mismatch" };
        if f != b {
            code = EXIT_FAILURE;
        }
        writeln!(out, "{n},{f},{b},{flag}")?;
    }
    Ok(code)
}

/// Integer points `(a, b)` with `a² + b² = t²`; none unless `t²` is an integer.
fn torus_bruteforce(t2: Ratio<u64>) -> u64 {
    if !t2.is_integer() {
        return 0;
    }
    rg_bruteforce(t2.to_integer())
}

fn cmd_count(target: CountTarget, k: u64, nmax: u64, t2: Option<&str>, out: &mut dyn Write) -> CliResult {
    let mut code = EXIT_OK;
    match target {
        CountTarget::Torus => {
            writeln!(out, "n,t,count_formula,count_bruteforce")?;
            let rows: Vec<Ratio<u64>> = match t2 {
                Some(s) => vec![parse_ratio(s)?],
                None => (1..=nmax).map(Ratio::from_integer).collect(),
            };
            for r in rows {
                let (f, b) = (torus_focusing(r), torus_bruteforce(r));
                if f != b {
                    code = EXIT_FAILURE;
                }
                let t = (*r.numer() as f64 / *r.denom() as f64).sqrt();
                writeln!(out, "{r},{},{f},{b}", f17(t))?;
            }
        }
        CountTarget::Gamma => {
            if t2.is_some() {
                return Err(CliError::usage("--t2 applies to the torus only"));
            }
            if k < 2 {
                return Err(CliError::usage("level k must be >= 2"));
            }
            let exact = matches!(k, 2 | 3 | 5);
            if exact {
                writeln!(out, "n,t,count_formula,count_bruteforce")?;
            } else {
                writeln!(out, "n,t,count_formula,count_bruteforce,bound")?;
            }
            for n in 1..=nmax {
                let b = gamma_focusing_bruteforce(k, n);
                let t = f17(gamma_length(n));
                if exact {
                    let f = gamma_focusing_formula(k, n)?;
                    if f != b {
                        code = EXIT_FAILURE;
                    }
                    writeln!(out, "{n},{t},{f},{b}")?;
                } else {
                    let f = gamma_focusing_upper_bound(k, n);
                    if b > f {
                        code = EXIT_FAILURE;
                    }
                    writeln!(out, "{n},{t},{f},{b},bound")?;
                }
            }
        }
    }
    Ok(code)
}

fn parse_ratio(s: &str) -> Result<Ratio<u64>, CliError> {
    let bad = || CliError::usage(format!("cannot parse rational {s:?}"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?),
        None => (s.trim().parse().map_err(|_| bad())?, 1u64),
    };
    if q == 0 {
        return Err(bad());
    }
    Ok(Ratio::new(p, q))
}

fn cmd_zones(cfg: &SceneConfig, ppm: Option<PathBuf>, svg: Option<PathBuf>, out: &mut dyn Write) -> CliResult {
    let set = PointSet::new(&cfg.set)?;
    let opts = RasterOptions { tol: cfg.tol, clip_horizon: cfg.clip_horizon };
    let r = raster_with(&cfg.metric, &set, cfg.basepoint, cfg.window, cfg.width, cfg.height, opts)?;
    let ppm_bytes = render::to_ppm(&r, cfg.palette_seed, cfg.max_zone);
    match ppm {
        Some(p) => std::fs::write(p, &ppm_bytes)?,
        None if svg.is_none() => out.write_all(&ppm_bytes)?,
        None => {}
    }
    if let Some(p) = svg {
        std::fs::write(p, render::to_svg(&r, cfg.palette_seed, cfg.max_zone))?;
    }
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn cmd_trace(
    metric: &Metric,
    a: Point2,
    hint: Option<Point2>,
    window: Window,
    step: Option<f64>,
    tol: f64,
    path: Option<PathBuf>,
    out: &mut dyn Write,
) -> CliResult {
    let opts = TraceOptions { step_size: step, tol, ..TraceOptions::default() };
    let poly = trace_level_set(metric, a, hint, window, opts)?;
    let mut csv = String::from("x,y,residual\n");
    for (p, r) in poly.points.iter().zip(&poly.residuals) {
        csv.push_str(&format!("{},{},{}\n", f17(p.x), f17(p.y), f17(*r)));
    }
    match path {
        Some(p) => std::fs::write(p, csv)?,
        None => out.write_all(csv.as_bytes())?,
    }
    Ok(if poly.max_residual() <= tol { EXIT_OK } else { EXIT_FAILURE })
}

fn sampling_region(desc: &PointSetDescriptor, metric: &Metric, window: Option<f64>, fallback: f64) -> Region {
    match (desc, metric) {
        (_, Metric::HyperbolicDisk) => Region::Disk { radius: window.unwrap_or(1.0) },
        _ => Region::Rect(Window::square(window.unwrap_or(fallback))),
    }
}

/// Folds several per-zone reports into one.
fn merge(name: &str, reports: Vec<(usize, VerificationReport)>, min_statistic: bool) -> VerificationReport {
    let first = &reports[0].1;
    let mut merged = VerificationReport {
        check_name: name.to_string(),
        passed: reports.iter().all(|r| r.1.passed),
        statistic: first.statistic,
        threshold: first.threshold,
        samples: reports.iter().map(|r| r.1.samples).sum(),
        seed: first.seed,
        details: Vec::new(),
    };
    for (n, r) in &reports {
        merged.statistic = if min_statistic { merged.statistic.min(r.statistic) } else { merged.statistic.max(r.statistic) };
        merged.details.extend(r.details.iter().map(|d| format!("n={n}: {d}")));
    }
    merged.details.truncate(10);
    merged
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    check: CheckKind,
    desc: &PointSetDescriptor,
    metric: &Metric,
    ns: &[usize],
    samples: u64,
    seed: u64,
    window: Option<f64>,
    resolutions: &[usize],
    out: &mut dyn Write,
) -> CliResult {
    let set = PointSet::new(desc)?;
    let base = Point2::ORIGIN;
    let report = match check {
        CheckKind::Tiling => {
            let region = sampling_region(desc, metric, window, 3.0);
            let mut rs = Vec::new();
            for &n in ns {
                rs.push((n, check_tiling(metric, &set, n, region, samples, seed)?));
            }
            merge("tiling", rs, false)
        }
        CheckKind::Area => check_equal_area(metric, &set, base, ns, samples, seed)?.report,
        CheckKind::Fundamental => {
            let region = sampling_region(desc, metric, window, 3.0);
            let mut rs = Vec::new();
            for &n in ns {
                rs.push((n, check_fundamental_domain(metric, &set, base, n, region, samples, seed)?));
            }
            merge("fundamental_domain", rs, true)
        }
        CheckKind::Boundary => {
            let w = Window::square(window.unwrap_or(3.0));
            check_boundary_measure(metric, &set, base, resolutions, w)?
        }
        CheckKind::Consistency => check_consistency(metric, samples, 400, seed)?,
    };
    writeln!(out, "{}", report.to_json())?;
    Ok(if report.passed { EXIT_OK } else { EXIT_FAILURE })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_parsing() {
        assert_eq!(parse_list("1..6").unwrap(), vec![1, 2, 3, 4, 5, 6]);
        assert_eq!(parse_list("1,2").unwrap(), vec![1, 2]);
        assert_eq!(parse_list("25").unwrap(), vec![25]);
        assert!(parse_list("6..1").is_err());
        assert!(parse_list("x").is_err());
    }

    #[test]
    fn metric_and_set_parsing() {
        assert_eq!(parse_metric("l4").unwrap(), Metric::Lk { exponent: 4.0 });
        assert_eq!(parse_metric("lk:2.5").unwrap(), Metric::Lk { exponent: 2.5 });
        assert_eq!(parse_metric("hyperbolic").unwrap(), Metric::HyperbolicDisk);
        assert!(parse_metric("l0.5").is_err());
        assert_eq!(parse_set("gamma:3:40").unwrap(), PointSetDescriptor::GammaOrbit { k: 3, n_max: 40 });
        assert_eq!(parse_set("gamma").unwrap(), PointSetDescriptor::GammaOrbit { k: 2, n_max: 200 });
        assert!(parse_set("hexagonal").is_err());
    }

    #[test]
    fn ratio_parsing() {
        assert_eq!(parse_ratio("9/4").unwrap(), Ratio::new(9, 4));
        assert!(parse_ratio("1/0").is_err());
    }
}
