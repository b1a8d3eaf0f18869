use std::f64::consts::PI;

use rug::float::Constant;
use rug::Float;

use super::gauss::Integrator;
use super::{ComplexResult, Method};
use crate::error::{Error, Result};
use crate::numkernel::{PrecisionCtx, XComplex, XReal};

/// Largest |y| accepted by the Pearcey evaluators.
pub const PEARCEY_MAX_ARG: f64 = 8.0;

/// P(0, Y) = ∫_{-∞}^{∞} exp(i(u⁴ + Yu)) du for complex Y.
///
/// The right half-line is rotated onto u = s·e^{iπ/8} and the left onto
/// u = s·e^{i9π/8}; on both rays i·u⁴ = -s⁴, so the integrand decays like
/// e^{-s⁴}. The literal integrand is evaluated in complex arithmetic.
pub fn pearcey_canonical(y: &XComplex, ctx: &PrecisionCtx) -> Result<ComplexResult> {
    if y.abs().to_f64() > PEARCEY_MAX_ARG {
        return Err(Error::InvalidParameter(format!("Pearcey argument |y| must be <= {PEARCEY_MAX_ARG}")));
    }
    let bits = ctx.bits();
    let eighth = Float::with_val(bits, Constant::Pi) / 8u32;
    let omega = XComplex::cis(&eighth);
    let i = XComplex::i_pow(1, bits);

    // |exp(i(±Yωs))| ≤ exp(b s) with b = |Im(Yω)|.
    let y_omega = y * &omega;
    let b = y_omega.im.to_f64().abs();
    let a = y_omega.re.to_f64().abs();
    let tol = 0.1 * ctx.eps;
    let mut s_max = 1.0f64;
    // 2 e^{-s⁴ + b s} / (4s³ - b) bounds the tail of both rays.
    while {
        let d = 4.0 * s_max.powi(3) - b;
        d <= 0.0 || (2.0f64.ln() - s_max.powi(4) + b * s_max - d.ln()) > (0.01 * tol).ln()
    } {
        s_max += 0.05;
    }
    let tail = {
        let d = 4.0 * s_max.powi(3) - b;
        2.0 * (-s_max.powi(4) + b * s_max).exp() / d
    };

    let integrand = |s: &Float| -> XComplex {
        let u = omega.scale(s);
        let u2 = &u * &u;
        let u4 = &u2 * &u2;
        let yu = y * &u;
        let plus = &(&u4 + &yu) * &i;
        let minus = &(&u4 - &yu) * &i;
        &plus.exp() + &minus.exp()
    };
    let mut integ = Integrator::new(integrand, bits, ctx.max_terms);
    let width = (PI / (a + 1.0)).min(0.5);
    let panels = (s_max / width).ceil() as usize;
    let per_panel = 0.89 * tol / panels as f64;
    let mut acc = XComplex::zero(bits);
    let mut err = 0.0;
    for k in 0..panels {
        let lo = Float::with_val(bits, s_max * k as f64 / panels as f64);
        let hi = Float::with_val(bits, s_max * (k + 1) as f64 / panels as f64);
        let (v, e) = integ.adaptive(&lo, &hi, per_panel);
        acc += &v;
        err += e;
    }
    let value = &acc * &omega;
    let err = err + tail;
    let scale = value.abs().to_f64().max(1.0);
    if integ.exhausted || err > ctx.eps * scale {
        return Err(Error::ToleranceNotMet { best: value.re, achieved: err, target: ctx.eps * scale });
    }
    Ok(ComplexResult { value, err, method: Method::Quad, terms: integ.panels })
}

/// P(0, y) in the continued parametrisation where P(0, y) = 2e^{iπ/8} F_4(y)
/// for real y: the canonical integral at Y = y·e^{-iπ/8}.
pub fn pearcey_direct(y: &XReal, ctx: &PrecisionCtx) -> Result<ComplexResult> {
    let bits = ctx.bits();
    let eighth = -Float::with_val(bits, Constant::Pi) / 8u32;
    let arg = XComplex::cis(&eighth).scale(y);
    pearcey_canonical(&arg, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::gamma;

    #[test]
    fn origin_value() {
        let c = PrecisionCtx::new(30);
        let got = pearcey_direct(&c.real(0), &c).unwrap();
        let eighth = c.pi() / 8u32;
        let want = XComplex::cis(&eighth).scale(&(gamma(&c.real(1.25), &c).unwrap() * 2u32));
        assert!((&got.value - &want).abs() < 1e-25);
    }

    #[test]
    fn even_in_y() {
        let c = PrecisionCtx::new(30);
        let a = pearcey_direct(&c.real(1.7), &c).unwrap();
        let b = pearcey_direct(&c.real(-1.7), &c).unwrap();
        assert!((&a.value - &b.value).abs() < 1e-25);
    }

    #[test]
    fn rejects_large_arguments() {
        let c = PrecisionCtx::new(20);
        assert!(pearcey_direct(&c.real(9), &c).is_err());
    }
}
