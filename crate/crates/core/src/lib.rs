//! Hitting times of random walks on finite weighted graphs.
//!
//! A [`WeightedGraph`] with an origin `o` and a target set `z` defines the
//! walk that steps to a neighbor with probability proportional to the edge
//! weight. The crate computes the law of the hitting time `T` of `z` exactly
//! ([`exact`]), evaluates lower bounds on `E T` and on `P(T <= a n + 1)` in
//! terms of `dist(o, z)` and `w_z / w_o` ([`bounds`]), builds the lossy flows
//! and path decompositions those bounds rest on ([`flows`]), and compares
//! everything with the biased walk on the integers ([`reference`]).
//! [`generators`] builds the extremal families, [`montecarlo`] simulates
//! them, and [`cli`] drives it all from the command line.
//!
//! ```
//! use walkbound::{bounds, exact, generators};
//!
//! let g = generators::unit_path(5)?;
//! assert!((exact::expected_hitting_time(&g)? - 25.0).abs() < 1e-9);
//! let report = bounds::check_theorem1(&g, &Default::default())?;
//! assert!(report.passed());
//! # Ok::<(), walkbound::Error>(())
//! ```

pub mod bounds;
pub mod cli;
pub mod error;
pub mod exact;
pub mod flows;
pub mod generators;
pub mod graph;
mod linalg;
pub mod montecarlo;
pub mod reference;
pub mod report;

pub use bounds::{check_theorem1, BoundReport, TheoremConfig};
pub use error::{Error, Result};
pub use exact::WalkParameters;
pub use flows::{FlowDecomposition, LossFlow};
pub use generators::GeneratorSpec;
pub use graph::{GraphBuilder, GraphFile, GraphMetadata, WeightedGraph};
pub use montecarlo::SimConfig;
