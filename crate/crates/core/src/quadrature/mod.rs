//! Direct numerical evaluation of the defining integrals: the ground truth
//! every series and asymptotic evaluator is checked against.

mod density;
pub(crate) mod gauss;
mod levy;
mod moment;
mod pearcey;

use std::fmt;

use crate::error::{Error, Result};
use crate::numkernel::{PrecisionCtx, XComplex, XReal};

pub use density::levy_density_d;
pub use levy::{levy_deriv_quad, levy_quad};
pub(crate) use levy::{integrate_levy_type, tail_point, LevyIntegrand};
pub use moment::{moment_quad, predicted_moment, PredictedMoment};
pub(crate) use moment::{algebraic_coeff, log_exp_envelope};
pub use pearcey::{pearcey_canonical, pearcey_direct, PEARCEY_MAX_ARG};

/// The algorithm that produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Quad,
    Taylor,
    Hyper,
    Asym,
    Inversion,
    Direct,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Quad => "quad",
            Method::Taylor => "taylor",
            Method::Hyper => "hyper",
            Method::Asym => "asym",
            Method::Inversion => "inversion",
            Method::Direct => "direct",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A value with an absolute error estimate and its provenance.
#[derive(Debug, Clone)]
pub struct EvalResult {
    pub value: XReal,
    /// Absolute error estimate, never negative.
    pub err: f64,
    pub method: Method,
    /// Series terms or quadrature panels consumed.
    pub terms: usize,
}

impl EvalResult {
    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }
}

/// Complex counterpart of [`EvalResult`].
#[derive(Debug, Clone)]
pub struct ComplexResult {
    pub value: XComplex,
    pub err: f64,
    pub method: Method,
    pub terms: usize,
}

/// Wraps a value, failing with `ToleranceNotMet` when `err` exceeds
/// eps·max(1, |value|).
pub(crate) fn accept(value: XReal, err: f64, ctx: &PrecisionCtx, method: Method, terms: usize) -> Result<EvalResult> {
    let target = ctx.eps * value.to_f64().abs().max(1.0);
    if !(err <= target) {
        return Err(Error::ToleranceNotMet { best: value, achieved: err, target });
    }
    Ok(EvalResult { value, err, method, terms })
}
