use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use super::{accept, integrate_levy_type, tail_point, EvalResult, LevyIntegrand, Method};
use crate::error::{Error, Result};
use crate::numkernel::{gamma, AlphaParam, BesselJ, PrecisionCtx, XReal};

/// Largest supported dimension.
pub const MAX_DIMENSION: u32 = 10;

/// Radial density p_α^d(r) of the isotropic stable law in d dimensions:
///
/// p(r) = (2π)^{-d/2} r^{-ν} ∫_0^∞ k^{d/2} J_ν(kr) e^{-k^α} dk, ν = d/2 - 1,
///
/// and at r = 0 the radial moment (2π)^{-d/2} / (2^ν Γ(ν+1)) ∫ k^{d-1} e^{-k^α} dk.
/// Panels break at the large-argument estimates (j + ν/2 - 1/4)π of the
/// Bessel zeros.
pub fn levy_density_d(alpha: AlphaParam, d: u32, r: &XReal, ctx: &PrecisionCtx) -> Result<EvalResult> {
    if d == 0 || d > MAX_DIMENSION {
        return Err(Error::InvalidParameter(format!("dimension d = {d} not in 1..={MAX_DIMENSION}")));
    }
    if *r < 0 || !r.is_finite() {
        return Err(Error::Domain(format!("density radius must be finite and >= 0, got {}", r.to_f64())));
    }
    let bits = ctx.bits();
    let p = alpha.p();
    let nu = f64::from(d) / 2.0 - 1.0;
    let two_pi = Float::with_val(bits, Constant::Pi) * 2u32;
    let norm = Float::with_val(bits, (&two_pi).pow(-f64::from(d) / 2.0));

    if r.is_zero() {
        let nu_x = Float::with_val(bits, nu);
        let g1 = gamma(&Float::with_val(bits, &nu_x + 1u32), ctx)?;
        let two_nu = Float::with_val(bits, 2u32).pow(&nu_x);
        let pref = norm / (two_nu * g1);
        let tol = 0.1 * ctx.eps / pref.to_f64();
        let (t_max, tail) = tail_point(alpha.to_f64(), f64::from(d - 1), 0.0, 0.01 * tol);
        let g = |u: &Float, t: &Float| {
            let e = (-Float::with_val(bits, u.pow(p))).exp();
            e * Float::with_val(bits, t.pow(d - 1))
        };
        let integrand = LevyIntegrand {
            alpha,
            freq: Float::new(bits),
            shift: 0.0,
            t_max,
            tol: 0.89 * tol,
            eps: ctx.eps,
            bits,
            budget: ctx.max_terms,
            accelerate: false,
        };
        let quad = integrate_levy_type(&integrand, g);
        let scale = pref.to_f64();
        let value = quad.value * pref;
        return accept(value, (quad.err + tail) * scale, ctx, Method::Quad, quad.panels);
    }

    let r = Float::with_val(bits, r);
    let rf = r.to_f64();
    let pref = norm * Float::with_val(bits, (&r).pow(-nu));
    let scale = pref.to_f64();
    let tol = 0.1 * ctx.eps / scale;
    // |J_ν| ≤ 1 for ν ≥ 0; J_{-1/2}(x) = √(2/(πx)) cos x.
    let (j, log_amp) = if nu < 0.0 {
        (f64::from(d) / 2.0 - 0.5, 0.5 * (2.0 / (std::f64::consts::PI * rf)).ln())
    } else {
        (f64::from(d) / 2.0, 0.0)
    };
    let (t_max, tail) = tail_point(alpha.to_f64(), j, log_amp, 0.01 * tol);
    let bessel = BesselJ::new(nu, bits)?;
    let mut failure = None;
    let half_d = f64::from(d) / 2.0;
    let g = |u: &Float, t: &Float| {
        let e = (-Float::with_val(bits, u.pow(p))).exp();
        let x = Float::with_val(bits, t * &r);
        let jv = match bessel.eval(&x) {
            Ok(v) => v,
            Err(err) => {
                failure.get_or_insert(err);
                Float::new(bits)
            }
        };
        e * jv * Float::with_val(bits, t.pow(half_d))
    };
    let integrand = LevyIntegrand {
        alpha,
        freq: r.clone(),
        shift: 0.75 + nu / 2.0,
        t_max,
        tol: 0.89 * tol,
        eps: ctx.eps,
        bits,
        budget: ctx.max_terms,
        accelerate: alpha.to_f64() < 1.0,
    };
    let quad = integrate_levy_type(&integrand, g);
    if let Some(err) = failure {
        return Err(err);
    }
    let value = quad.value * pref;
    accept(value, (quad.err + tail) * scale, ctx, Method::Quad, quad.panels)
}
