//! Random forest regression with an optional LASSO targeting stage.
//!
//! The crate is organised by concern:
//!
//! - [`datacore`]: CSV ingestion, stationarity transforms, forecast targets
//!   and expanding-window bookkeeping.
//! - [`cart`]: regression trees grown by the CART impurity-decrease rule.
//! - [`forest`]: bagged ensembles of [`cart`] trees.
//! - [`targeting`]: LASSO by coordinate descent and selection of the
//!   targeted predictor set.
//! - [`theory`]: closed-form calculators for split probabilities, maximal
//!   signal and targeted-tree mean squared error.
//! - [`simlab`]: synthetic designs and Monte Carlo split-probability
//!   experiments.
//! - [`evallab`]: forecast experiments, Diebold-Mariano tests and the tree
//!   strength/correlation diagnostics.
//! - [`quadrature`]: adaptive Gauss-Kronrod integration and golden-section
//!   search used by [`theory`].

pub mod cart;
pub mod datacore;
pub mod error;
pub mod evallab;
pub mod forest;
pub mod quadrature;
pub mod rng;
pub mod simlab;
pub mod targeting;
pub mod theory;

pub use error::{Error, Result};
