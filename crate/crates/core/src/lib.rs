//! Multi-method evaluation of the Lévy integral
//! F_α(z) = ∫₀^∞ e^{-t^α} cos(zt) dt and its relatives.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod numkernel;
pub mod quadrature;
pub mod hyper;
pub mod asympt;
pub mod policy;
pub mod eulerjacobi;
pub mod apps;
pub mod selfcheck;

pub use error::{Error, Result};
pub use numkernel::{AlphaParam, PrecisionCtx, XComplex, XReal};
pub use quadrature::{ComplexResult, EvalResult, Method};
