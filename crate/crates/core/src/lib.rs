//! Topological robustness analysis for Internet-like graphs.
//!
//! The crate is organised by metric family: [`adjacency`], [`clustering`],
//! [`connectivity`], [`distance`], [`throughput`], [`spectral`] and [`geo`],
//! all operating on the immutable [`graph::Topology`]. The [`challenge`]
//! engine removes entities and records degradation traces, and [`report`]
//! ties everything to file formats and the metric catalog used by the CLI.

pub mod adjacency;
pub mod challenge;
pub mod clustering;
pub mod connectivity;
pub mod distance;
pub mod error;
pub mod geo;
pub mod graph;
pub mod metric;
pub mod report;
pub mod spectral;
pub mod throughput;

pub use error::{Error, Result};
pub use graph::Topology;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seeded generator used throughout the crate.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
