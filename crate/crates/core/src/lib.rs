//! Purification of a continuously monitored qubit, with and without feedback.
//!
//! - [`bloch`]: Itô dynamics of the Bloch vector under σz measurement.
//! - [`density`]: the same dynamics as a density-matrix stochastic master equation.
//! - [`protocols`]: no feedback, or rotation onto the x axis after every step.
//! - [`ensemble`]: reproducible parallel Monte Carlo and first-passage statistics.
//! - [`analytics`]: closed forms, quadrature, root finding and a Fokker–Planck solver.
//! - [`cli`]: the `purify` command-line tool.

// `!(x > 0.0)` style guards are used on purpose so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod bloch;
pub mod cli;
pub mod density;
pub mod ensemble;
pub mod error;
pub mod output;
pub mod protocols;

pub use bloch::{BlochState, StepSize, WienerIncrement};
pub use density::DensityMatrix;
pub use error::{Error, Result};
pub use protocols::{FeedbackModel, ProtocolKind};
