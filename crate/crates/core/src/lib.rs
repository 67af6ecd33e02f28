//! Curve fitting and model selection for short scientific time series.
//!
//! The crate bundles closed-form generators for three classic ODE case
//! studies (population growth, building temperature, market price), a
//! catalog of thirteen nonlinear model families, a Levenberg–Marquardt
//! solver with seeded multi-start, goodness-of-fit statistics with ranking,
//! and CSV/JSON plumbing for the `fitkit` command-line tool.

pub mod cli;
#[cfg(test)]
mod corpus_tests;
pub mod data;
pub mod io;
pub mod metrics;
pub mod models;
pub mod scenarios;
pub mod solver;

pub use data::{build_series, SeriesError, TimeSeries};
pub use metrics::{rank_models, FitStatistics, MetricsError, Scored};
pub use models::{catalog, evaluate, initial_guess, ModelError, ModelId, ParamVector};
pub use scenarios::{generate, NoiseConfig, Scenario, ScenarioError};
pub use solver::{fit, multi_start_fit, FitError, FitOptions, FitResult, Termination};

/// Version string written into every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
