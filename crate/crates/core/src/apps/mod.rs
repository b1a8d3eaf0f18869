//! Applications: the Pearcey relation, the closing-gap random-matrix
//! kernel built from F_4, and the census of real zeros of F_α.

mod kernel;
mod zeros;

use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};
use crate::numkernel::{PrecisionCtx, XComplex, XReal};
use crate::quadrature::{levy_quad, pearcey_direct, PEARCEY_MAX_ARG};
use crate::AlphaParam;

pub use kernel::{bh_kernel, phi_hat, psi_series, KernelPoint, PSI_MAX_ARG};
pub use zeros::{real_zeros, ZEROS_MAX_ARG};

/// |P(0, y) - 2 e^{iπ/8} F_4(y)| from two independent quadratures.
pub fn pearcey_relation_check(y: &XReal, ctx: &PrecisionCtx) -> Result<f64> {
    if y.to_f64().abs() > PEARCEY_MAX_ARG {
        return Err(Error::InvalidParameter(format!("Pearcey check needs |y| <= {PEARCEY_MAX_ARG}")));
    }
    let bits = ctx.bits();
    let p = pearcey_direct(y, ctx)?;
    let f = levy_quad(AlphaParam::integer(4)?, y, ctx)?;
    let eighth = Float::with_val(bits, Constant::Pi) / 8u32;
    let rhs = XComplex::cis(&eighth).scale(&Float::with_val(bits, &f.value * 2u32));
    Ok((&p.value - &rhs).abs().to_f64())
}
