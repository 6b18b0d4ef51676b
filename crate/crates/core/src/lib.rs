//! Workbench for dot-product recommenders.
//!
//! Two halves live here. The empirical half trains implicit-feedback ALS
//! models, scores them with accuracy, popularity, coverage and fairness
//! metrics, and replays a train-and-observe feedback loop. The exact half
//! counts which rankings a fixed set of item vectors can express, relates the
//! count to hyperplane-arrangement and convex-hull bounds, and decides
//! membership in the popularity cones that force items above a long tail.
//!
//! Geometry runs on exact rationals ([`exact`]); the learning side uses `f64`.

pub mod dataset;
pub mod error;
pub mod exact;
pub mod feedback;
pub mod ials;
pub mod metrics;
pub mod popcone;
pub mod rankgeom;
pub mod synthetic;

pub use error::{Error, Result};
