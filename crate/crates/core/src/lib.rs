//! Density-based partitioning of a mixed-type tabular feature space into
//! interpretable hyper-rectangular slices.
//!
//! The pipeline computes a per-row sparsity proxy (k-NN core distance under
//! Gower distance, or an isolation-forest score), fits a regression tree on
//! that proxy over the original feature domains, and carves empty regions out
//! of the resulting slices. Slices carry exact fractional lengths and volumes,
//! so the partition can be summarized with a uniformity statistic or used to
//! screen treatment arms for positivity violations.

pub mod carve;
pub mod error;
pub mod feature;
pub mod geometry;
pub mod io;
pub mod positivity;
pub mod proxy;
pub mod render;
pub mod tree;
pub mod uniformity;

pub use error::{Error, Result};
pub use feature::{Dataset, Domain, FeatureKind, FeatureSchema};
pub use geometry::{Constraint, FeatureSpace, Interval, Slice, Subset};
pub use proxy::{DensityTarget, ProxyMethod};
pub use tree::{PartitionConfig, PartitionModel};
