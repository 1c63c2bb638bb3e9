//! Zeros of the plus-sharp q-zeta function, located by argument-principle
//! contour search seeded from the nontrivial zeros of the Riemann zeta
//! function.
//!
//! * [`special`]: zeta, the alternating zeta and its derivative, classical
//!   zero ordinates;
//! * [`sharp`]: the truncated q-zeta series and the first-order prediction
//!   of its zeros;
//! * [`winding`]: winding number, resolution metric and moment estimate of a
//!   zero on a rectangle, for any [`winding::AnalyticFunction`];
//! * [`locator`]: the per-seed search protocol;
//! * [`run`], [`report`], [`cli`]: whole runs, their reports and the
//!   command line.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
mod cmath;
pub mod error;
pub mod locator;
pub mod poly;
pub mod report;
pub mod run;
pub mod sharp;
pub mod special;
pub mod winding;

pub use error::{Error, Result};
pub use special::ComplexPoint;

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/overview.md")]
    mod overview {}
    #[doc = include_str!("../../../book/src/special-functions.md")]
    mod special_functions {}
    #[doc = include_str!("../../../book/src/sharp-zeta.md")]
    mod sharp_zeta {}
    #[doc = include_str!("../../../book/src/winding.md")]
    mod winding {}
    #[doc = include_str!("../../../book/src/search.md")]
    mod search {}
    #[doc = include_str!("../../../book/src/reports.md")]
    mod reports {}
    #[doc = include_str!("../../../book/src/precision.md")]
    mod precision {}
}
