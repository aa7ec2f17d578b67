//! Polya-urn Bayesian density estimation: the EW and SB normal mixture
//! estimators, Gibbs samplers for their posteriors, a log-space calculator
//! for the MISE order terms, and an experiment harness.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod harness;
pub mod math;
pub mod model;
pub mod rates;
pub mod sampler;

pub use error::{Error, Result};
