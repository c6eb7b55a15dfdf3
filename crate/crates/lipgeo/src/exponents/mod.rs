//! Exact arithmetic for exponents, Puiseux expansions, arcs, and admissible
//! function expressions.
//!
//! Everything in this module is a pure function over immutable values; all
//! orders and tangency orders are computed symbolically, with truncation
//! bounds reported rather than silently collapsed to infinity.

pub mod arc;
pub mod exponent;
pub mod expr;
pub mod poly;
pub mod series;

pub use arc::{Arc, ArcFamily, Parameterization, TangentVector};
pub use exponent::{min_max_cmp, ExtendedExponent};
pub use expr::{ord_on_arc, substitute, FunctionExpr, RationalSigns, Sign, SignResolver};
pub use series::{series_order, OrderBound, PuiseuxSeries};

use num_rational::BigRational;

/// Default resolution bound for series substitution, overridable through the
/// `LIPGEO_MAX_EXP` environment variable in the CLI.
pub const DEFAULT_MAX_EXP: i64 = 64;

pub fn default_bound() -> BigRational {
    BigRational::from_integer(DEFAULT_MAX_EXP.into())
}
