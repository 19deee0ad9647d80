//! Large c-clustered vertex sets in graphs of bounded treewidth.
//!
//! The crate bundles constructive lower-bound algorithms over k-tree models,
//! exact oracles for the c-clustered independence and chromatic numbers, the
//! extremal graph families that show the bounds are tight, and an engine that
//! certifies (or refutes) ratio lower bounds for treewidth-2 graphs through a
//! closure computation over surplus/threat types.

pub mod constructions;
pub mod engine;
pub mod error;
pub mod graph;
pub mod greedy;
pub mod model;
pub mod oracle;

pub use error::{Error, Result};
pub use graph::{disjoint_union, ClusteredSet, Graph};
pub use model::{KTreeModel, RootedTwoTree};
