//! Regular graphs, simple random walks on them, and exact numerical checks of
//! mixing, hitting-time and spectral inequalities.

pub mod chain;
pub mod error;
pub mod graph;
pub mod harness;
pub mod hitting;
pub mod spectral;
pub mod tree;
pub mod walk;

pub use error::{Error, Result};
pub use graph::Graph;
