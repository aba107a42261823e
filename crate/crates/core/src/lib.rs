//! Dual-quaternion formation control of rigid bodies over directed graphs.
//!
//! The crate builds unit-dual-quaternion weighted graph Laplacians, runs the
//! projected iteration control law, checks the convergence rate against the
//! spectrum of the underlying real Laplacian, and repairs noisy relative
//! configuration schemes by quaternion least squares.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod control;
pub mod dq;
pub mod error;
pub mod feasibility;
pub mod graph;
pub mod matrix;
pub mod spectral;
pub mod udqdg;

pub use error::{Error, Result};

/// Formats a float with 17 significant digits, enough for an exact round trip.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}
