use thiserror::Error;

use crate::metrics::Point2;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A point lies outside the domain of the metric (on or outside the unit circle for the disk).
    #[error("point ({}, {}) is outside the metric domain", .0.x, .0.y)]
    Domain(Point2),

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The query needs members of an orbit set beyond the radius up to which it was enumerated.
    #[error("query needs radius {needed:.6} around the origin but the set is complete only up to {horizon:.6}")]
    Horizon { needed: f64, horizon: f64 },

    #[error("PSL matrix does not map to an integer quadruple: {0}")]
    NonIntegral(String),

    #[error("level {0} is not supported here (expected one of 2, 3, 5)")]
    UnsupportedLevel(u64),

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("window too small: zone {zone} reaches the sampling boundary")]
    WindowTooSmall { zone: usize },

    #[error("point set has no isometries permuting it: {0}")]
    NoIsometries(String),

    #[error("level-set seed not found: {0}")]
    SeedNotFound(String),

    #[error("continuation step failed near ({}, {}): {reason}", .at.x, .at.y)]
    StepFailure { at: Point2, reason: String },

    #[error("configuration error: {0}")]
    Config(String),
}
