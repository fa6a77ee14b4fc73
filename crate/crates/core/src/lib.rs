//! Structural information primitives and the value-conditional exploration
//! machinery built on them.
//!
//! - [`graph`]: weighted undirected graphs and the three constructions used
//!   downstream (bipartite joint graph, value graph, degree realization).
//! - [`tree`]: height-2 encoding trees, structural entropy, the stretch
//!   operator and greedy two-layer optimization.
//! - [`smi`]: single-variable and joint structural entropy of a joint
//!   distribution, structural mutual information and its bounds.
//! - [`bounds`]: exact tabular evaluation of the representation losses.
//! - [`explore`]: k-NN entropy estimation, state-action hierarchies and
//!   intrinsic rewards.
//! - [`sample`]: random fixtures for property sweeps.
//!
//! All entropies are reported in bits.

pub mod bounds;
pub mod error;
pub mod explore;
pub mod graph;
pub mod info;
pub mod joint;
pub mod sample;
pub mod smi;
pub mod tree;

pub use error::{Error, Result};
pub use graph::{Edge, ValueKernel, WeightedGraph};
pub use joint::{Axis, JointDistribution};
pub use tree::{EncodingTree, NodeId, OptimizeMode};
