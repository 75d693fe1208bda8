//! Geometry and statistics in the space of phylogenetic trees.
//!
//! Trees on leaves `0..=r` are points with one coordinate per split plus
//! pendant lengths. The crate computes geodesics, weighted Frechet means
//! with derivative information, stickiness diagnostics for three-leaf
//! samples, and kernel smoothing of tree-valued responses.

pub mod cli;
pub mod error;
pub mod frechet;
pub mod geodesic;
pub mod newick;
pub mod random;
pub mod smooth;
pub mod split;
pub mod sticky;
pub mod tracker;
pub mod tree;

pub use error::{Error, Result};
pub use geodesic::{distance, gtp_geodesic, GeodesicPath, SupportPair, SupportSequence};
pub use newick::{parse_tree, serialize_tree};
pub use split::{compatible, enumerate_maximal_topologies, enumerate_splits, LabelSet, Split, Topology};
pub use tree::{Direction, TreePoint};
