//! fixlab-core: a desk-scale laboratory for set-valued fixed-point
//! analysis on the real line.
//!
//! The crate provides, in dependency order:
//!
//! - [`set`]: closed bounded subsets of ℝ and the Hausdorff-Pompeiu
//!   metric, exact on interval unions;
//! - [`expr`] / [`piecewise`]: a tiny expression language and
//!   piecewise-defined single- and set-valued maps parsed from text;
//! - [`contraction`]: the F- and φ-function families and sampled
//!   certification of several multi-valued contraction inequalities;
//! - [`pairs`]: hybrid-pair taxonomy (coincidence and common fixed
//!   points, idempotency, commuting variants, limit-range properties);
//! - [`solver`]: Picard iteration for multi-valued maps and a
//!   grid-based coincidence-point search for hybrid pairs;
//! - [`dp`]: successive approximation for a two-operator system of
//!   functional equations on a state grid;
//! - [`volterra`]: a trapezoid-rule solver for a Volterra integral
//!   inclusion with pointwise selections.

// negated comparisons like `!(p >= 1.0)` reject NaN along with the
// out-of-range values; the un-negated forms would let NaN through
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod contraction;
pub mod dp;
mod error;
pub mod expr;
pub mod pairs;
pub mod piecewise;
pub mod set;
pub mod solver;
pub mod volterra;

pub use error::{Error, Result};
pub use set::{hausdorff, hausdorff_pow, point_set_distance, ClosedSet, Interval};
