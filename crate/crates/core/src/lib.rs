//! Ricci flow of warped-product metrics `g = φ(x)² dx² + ψ(x)² ĝ` on `ℝ₊ × S^n`.
//!
//! [`geometry`] evaluates curvature of a sampled metric, [`flow`] evolves it,
//! [`diagnostics`] monitors the invariants along a run, [`residuals`]
//! certifies the derived evolution equations, [`io`] handles
//! configuration and output.

// NaN must fail validation, hence `!(x > 0.0)`; stencils index several arrays at once.
#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::needless_range_loop,
    clippy::result_large_err
)]

pub mod diagnostics;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod io;
pub mod par;
pub mod residuals;

pub use error::{Error, Result};
