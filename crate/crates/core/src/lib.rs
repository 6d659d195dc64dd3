//! Integer-programming models for path-based robot planning problems.
//!
//! Problems are reduced in two steps: a path encoding (base graph or
//! time-expanded graph) followed by problem-specific constraints and
//! objectives. Models are solved with an embedded branch-and-bound engine
//! and checked against brute-force oracles.

pub mod bench;
pub mod encoding;
pub mod error;
pub mod generate;
pub mod graph;
pub mod instance;
pub mod io;
pub mod mmcr;
pub mod model;
pub mod mpp;
pub mod oracle;
pub mod rcp;
pub mod solution;
pub mod solver;
pub mod validate;

pub use error::{Error, Result};
pub use graph::{Graph, Path, Vertex};
pub use instance::{MmcrInstance, MppInstance, ProblemInstance, RcpInstance, RcpVariant};
pub use model::IpModel;
