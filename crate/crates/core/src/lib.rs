//! Recursive (autoregressive) filters `y[k] = Σ αᵢ y[k−i] + x[k]` on
//! doubly-infinite index sets, their associated LTI systems `ỹ = h ∗ x`,
//! and the family of impulse responses indexed by region of convergence.

// `!(x <= tol)` is deliberate throughout: NaN must fail the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod associated_lti;
pub mod cli;
pub mod error;
mod poly;
pub mod random;
pub mod records;
pub mod recursive_filter;
pub mod sequences;
pub mod spectral;
pub mod ztransform;

pub use error::{Error, Result};
