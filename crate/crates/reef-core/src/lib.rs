//! Tabular regression toolkit for reef tank chemistry data.
//!
//! The library ingests tank-chemistry CSV files, trains a roster of seven
//! regression models (OLS, three SVR kernels, a decision tree, a random
//! forest, ridge) plus a bagging ensemble, and scores them on a held-out
//! split with R², MSE, and MAE.
//!
//! Everything numeric is implemented here on top of a minimal dense
//! [`linalg`] layer; the only external dependencies are serialization and
//! CSV plumbing. All randomness flows from a single root seed through
//! labeled stage seeds ([`rng::derive_seed`]), so every run is exactly
//! reproducible.

pub mod dataset;
pub mod ensemble;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod models;
pub mod pipeline;
pub mod rng;

pub use error::{Error, Result};
