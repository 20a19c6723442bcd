//! Coverage analysis of mmWave cellular downlink assisted by reconfigurable
//! intelligent surfaces (RIS) under stochastic geometry.
//!
//! Base stations and surfaces are independent homogeneous Poisson point
//! processes. A UE at the origin is served by its nearest BS, either directly
//! (with a split beam towards its nearest RIS) or through that RIS. The crate
//! provides the distance laws of this triangle, the channel model, closed-form
//! coverage expressions and a Monte Carlo estimator that checks them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod channel;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod montecarlo;
pub mod quadrature;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
