//! Brillouin zones of discrete point sets under ℓᵏ metrics on the plane and the
//! hyperbolic metric on the Poincaré disk.
//!
//! ```
//! use brillouin::pointsets::PointSet;
//! use brillouin::zones::classify;
//! use brillouin::{Metric, Point2};
//!
//! let c = classify(&Metric::EUCLIDEAN, &PointSet::SquareLattice, Point2::ORIGIN, Point2::new(0.9, 0.4), 1e-9)?;
//! assert_eq!(c.zone_index(), 3);
//! # Ok::<(), brillouin::Error>(())
//! ```

pub mod counting;
pub mod error;
pub mod fuchsian;
pub mod mediatrix;
pub mod metrics;
pub mod pointsets;
pub mod verify;
pub mod zones;

pub use error::{Error, Result};
pub use metrics::{Metric, Point2};

// Runs the guide's code blocks as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/pointsets.md")]
    mod pointsets {}
    #[doc = include_str!("../../../book/src/zones.md")]
    mod zones {}
    #[doc = include_str!("../../../book/src/counting.md")]
    mod counting {}
    #[doc = include_str!("../../../book/src/fuchsian.md")]
    mod fuchsian {}
    #[doc = include_str!("../../../book/src/mediatrix.md")]
    mod mediatrix {}
    #[doc = include_str!("../../../book/src/verify.md")]
    mod verify {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
