//! Desk-scale Gaussian boson sampling (GBS) toolkit.
//!
//! The crate simulates small GBS devices exactly, encodes graphs into them,
//! and uses the resulting click patterns to seed stochastic searches for the
//! Max-Haf and dense k-subgraph problems.
//!
//! - [`numerics`]: complex LU, inverses, Takagi factorization
//! - [`matfn`]: exact hafnian and torontonian
//! - [`gaussian`]: Husimi covariance states, loss and thermal noise, pattern
//!   probabilities
//! - [`encoding`]: graph to device mapping and the scale choice
//! - [`sampler`]: exact chain-rule sampling, pools, sample files
//! - [`solvers`]: objectives, random search, simulated annealing, greedy peeling
//! - [`bench`]: correlation studies, advantage ratios, geometric fits, noise sweeps
//! - [`cli`]: the command implementations behind the `gbs` binary
//!
//! Runnable walkthroughs live in this crate's `examples/` directory.

pub mod bench;
pub mod cli;
pub mod encoding;
pub mod error;
pub mod gaussian;
pub mod graph;
pub mod instances;
pub mod io;
pub mod matfn;
pub mod numerics;
pub mod pattern;
pub mod sampler;
pub mod solvers;
pub mod stats;

pub use encoding::{choose_scale, encode_graph, DeviceParams};
pub use error::{Error, Result};
pub use gaussian::{GaussianState, NoiseConfig, SamplingMatrix};
pub use graph::Graph;
pub use numerics::{ComplexMatrix, C64};
pub use pattern::ClickPattern;
pub use sampler::SamplePool;
