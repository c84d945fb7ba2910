//! Multi-scale community detection.
//!
//! The crate covers the algorithmic side only and needs nothing beyond
//! `alloc`: graph storage, the six scale-parameterised quality criteria,
//! the greedy detectors for global (crisp) and local (overlapping)
//! criteria, random-walk networks for stability, scale sweeps with NMI
//! relevance series, and a planted two-level benchmark generator.
//! File formats and the command line live in the `mscd` crate.
#![no_std]

extern crate alloc;

pub mod benchgen;
pub mod cover;
pub mod criteria;
mod error;
pub mod global;
pub mod graph;
pub mod local;
pub mod metrics;
pub mod overlap;
pub mod partition;
pub mod scales;
pub mod walk;

mod math;

pub use cover::Cover;
pub use criteria::{GlobalCriterion, GlobalKind, Objective};
pub use error::{Error, Result};
pub use graph::{Graph, WeightView};
pub use local::{LocalKind, SimilarityGraph};
pub use partition::{CommunityStats, Partition};
pub use scales::{CriterionKind, ScalePlan, SweepOptions, SweepReport};
