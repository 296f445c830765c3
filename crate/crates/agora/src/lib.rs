//! Deterministic simulator of multi-provider data marketplaces for
//! benchmarking budget-constrained data acquisition strategies.
//!
//! A market holds `K` providers, each selling a private labeled dataset
//! under a published pricing function. Before buying anything the acquirer
//! sees only each provider's public listing — a handful of shared samples,
//! summary statistics (per-feature marginal quantiles and feature-label
//! correlations) and the pricing function — plus its own small evaluation
//! set and a budget. A purchase strategy turns that pre-acquisition
//! information into per-provider purchase counts under the budget; the
//! purchased samples train a logistic-regression model, and the strategy is
//! scored by a weighted blend of evaluation accuracy and budget savings,
//! averaged over a bundle of market instances.
//!
//! The crate is organized around that pipeline:
//!
//! - [`datapool`] — seeded synthetic data pool and dataset sampling.
//! - [`market`] — pricing, summary statistics, listings, the public/private
//!   boundary, market construction and the market file format.
//! - [`model`] — from-scratch logistic regression and recursive feature
//!   elimination.
//! - [`strategies`] — the built-in acquisition strategies, all pure
//!   functions of the public view.
//! - [`eval`] — purchase execution against the sealed private data,
//!   scoring, and multi-market benchmarks.
//! - [`manifest`], [`report`], [`cli`] — reproducible runs: sealed
//!   manifests, score tables, and the `gen` / `run` / `report` commands.
//!
//! Everything is deterministic: all randomness flows from explicit seeds
//! through one named generator, training uses zero initialization with a
//! deterministic line search, and money arithmetic is exact, so identical
//! inputs reproduce identical artifacts byte for byte.
//!
//! ```
//! use agora::datapool::PoolConfig;
//! use agora::eval::{run_benchmark, ScoreConfig};
//! use agora::market::{build_benchmark, MarketParams};
//! use agora::model::TrainConfig;
//! use agora::strategies::{StrategyConfig, StrategyKind};
//!
//! let pool = PoolConfig { dim: 8, num_categories: 5, seed: 7, ..PoolConfig::default() };
//! let params = MarketParams {
//!     num_providers: 4,
//!     size_range: (60, 120),
//!     acquirer_size: 50,
//!     ..MarketParams::default()
//! };
//! let markets = build_benchmark(&pool, &params, 42, 2).unwrap();
//! let report = run_benchmark(
//!     &markets,
//!     StrategyKind::All,
//!     &StrategyConfig::default(),
//!     &TrainConfig::default(),
//!     &ScoreConfig::default(),
//! )
//! .unwrap();
//! assert!(report.average_score >= 0.0 && report.average_score <= 100.0);
//! ```

pub mod cli;
pub mod datapool;
pub mod error;
pub mod eval;
pub mod manifest;
pub mod market;
pub mod model;
pub mod money;
pub mod report;
mod rng;
pub mod strategies;

pub use error::{Error, Result};
pub use money::Money;
pub use rng::GENERATOR_ID;

/// Version tag embedded in every serialized artifact.
pub const FORMAT_VERSION: &str = "1";
