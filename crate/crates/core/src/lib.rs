//! Generalized probabilistic bisection for stochastic root finding when the
//! oracle's accuracy is unknown and varies with location.
//!
//! The crate is organised bottom-up:
//!
//! - [`density`] holds the knowledge state, a piecewise-constant density over
//!   the search interval.
//! - [`updating`] turns oracle evidence into a new knowledge state.
//! - [`estimators`] estimate the oracle accuracy from a batch of responses.
//! - [`oracles`] generate responses: synthetic benchmarks and a Bermudan put.
//! - [`policies`] choose where to query next.
//! - [`driver`] runs one search end to end under a call budget.
//! - [`harness`] replicates runs, aggregates metrics and writes result files.

pub mod density;
pub mod driver;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod numeric;
pub mod oracles;
pub mod policies;
pub mod seed;
pub mod updating;

pub use density::PiecewiseDensity;
pub use driver::{run, EstimatorKind, MetricsRecord, RunConfig, RunOutput, TraceRecord};
pub use error::{GpbaError, Result};
pub use estimators::BatchStats;
pub use oracles::{BermudanPut, Oracle, SyntheticOracle, TestFunction};
pub use policies::{PolicyKind, PolicySpec};
pub use updating::{Direction, UpdateSignal};
