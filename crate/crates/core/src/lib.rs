// NaN-rejecting guards read `!(x > 0.0)` on purpose; index loops mirror the
// stencils they implement.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::too_many_arguments)]
// Field and engine enums are few and long-lived; boxing buys nothing.
#![allow(clippy::large_enum_variant)]

pub mod analytic;
pub mod cases;
pub mod characteristics;
pub mod config;
pub mod deposition;
pub mod diagnostics;
pub mod error;
pub mod field1d;
pub mod field2d;
pub mod run;
pub mod solver;
pub mod spline;
pub mod tridiag;

pub use error::{Error, Result};
