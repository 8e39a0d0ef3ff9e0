//! Scene configuration for zone renders.

use brillouin::pointsets::PointSetDescriptor;
use brillouin::zones::Window;
use brillouin::{Error, Metric, Point2};
use serde::{Deserialize, Serialize};

pub const MAX_SIDE: usize = 16_384;

fn default_tol() -> f64 {
    brillouin::metrics::DEFAULT_TOL
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub metric: Metric,
    pub set: PointSetDescriptor,
    pub basepoint: Point2,
    pub window: Window,
    pub width: usize,
    pub height: usize,
    #[serde(default)]
    pub palette_seed: u64,
    /// Zones above this index are drawn in a neutral colour.
    pub max_zone: u32,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Draw cells beyond an orbit set's horizon as unresolved instead of failing.
    #[serde(default)]
    pub clip_horizon: bool,
}

impl SceneConfig {
    pub fn validate(&self) -> Result<(), Error> {
        self.metric.validate()?;
        self.window.validate()?;
        let side_ok = |v: usize| (1..=MAX_SIDE).contains(&v);
        if !side_ok(self.width) || !side_ok(self.height) {
            return Err(Error::Config(format!("width and height must be in 1..={MAX_SIDE}")));
        }
        if self.max_zone == 0 {
            return Err(Error::Config("max_zone must be >= 1".into()));
        }
        if !(self.tol > 0.0 && self.tol <= 1e-3) {
            return Err(Error::Config(format!("tol {} must be in (0, 1e-3]", self.tol)));
        }
        if !self.basepoint.is_finite() {
            return Err(Error::Config("basepoint must be finite".into()));
        }
        match self.set {
            PointSetDescriptor::IrrationalLattice { alpha } if !(alpha > 0.0 && alpha.is_finite()) => {
                Err(Error::Config("lattice spacing must be positive".into()))
            }
            PointSetDescriptor::GammaOrbit { k, n_max } if k == 0 || n_max == 0 || n_max > 1_000_000 => {
                Err(Error::Config("orbit set needs k >= 1 and 1 <= n_max <= 1e6".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn from_json(s: &str) -> Result<Self, Error> {
        let c: SceneConfig = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Built-in scenes.
    pub fn preset(name: &str) -> Option<Self> {
        let lattice = |metric: Metric, set: PointSetDescriptor| SceneConfig {
            metric,
            set,
            basepoint: Point2::ORIGIN,
            window: Window::square(3.0),
            width: 600,
            height: 600,
            palette_seed: 0,
            max_zone: 40,
            tol: default_tol(),
            clip_horizon: false,
        };
        Some(match name {
            "z2-l2" => lattice(Metric::EUCLIDEAN, PointSetDescriptor::SquareLattice),
            "z2-l1" => lattice(Metric::MANHATTAN, PointSetDescriptor::SquareLattice),
            "z2-l4" => lattice(Metric::Lk { exponent: 4.0 }, PointSetDescriptor::SquareLattice),
            "cross-l2" => lattice(Metric::EUCLIDEAN, PointSetDescriptor::CrossSet),
            "irrational-l1" => lattice(Metric::MANHATTAN, PointSetDescriptor::irrational_sqrt2()),
            "gamma2" => SceneConfig {
                metric: Metric::HyperbolicDisk,
                set: PointSetDescriptor::GammaOrbit { k: 2, n_max: 50 },
                window: Window::square(0.95),
                clip_horizon: true,
                max_zone: 12,
                ..lattice(Metric::HyperbolicDisk, PointSetDescriptor::SquareLattice)
            },
            _ => return None,
        })
    }

    pub const PRESETS: [&'static str; 6] = ["z2-l2", "z2-l1", "z2-l4", "cross-l2", "irrational-l1", "gamma2"];
}
