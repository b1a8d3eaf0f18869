use std::f64::consts::PI;

use rug::ops::Pow;
use rug::Float;

use super::gauss::{cvz_sum, Integrator};
use super::{accept, EvalResult, Method};
use crate::error::{Error, Result};
use crate::numkernel::{ln_gamma_f64, AlphaParam, PrecisionCtx, XReal};

// Half-periods on [0, T] beyond which the alternating acceleration takes over.
const ACCEL_THRESHOLD: f64 = 1e4;
// Panels summed directly before the accelerated tail.
const ACCEL_HEAD: u64 = 10;

/// Raw output of a partitioned integral.
pub(crate) struct Quad {
    pub value: Float,
    /// Quadrature error only; the caller adds its truncation bound.
    pub err: f64,
    pub panels: usize,
}

/// Settings for [`integrate_levy_type`].
pub(crate) struct LevyIntegrand {
    pub alpha: AlphaParam,
    /// Oscillation frequency in t; break points sit at (k + shift)π/freq.
    /// Kept at working precision: the accelerated path needs break points
    /// that are a smooth function of k to the last digit.
    pub freq: Float,
    pub shift: f64,
    /// Truncation point in t (ignored by the accelerated path).
    pub t_max: f64,
    /// Absolute quadrature tolerance.
    pub tol: f64,
    pub eps: f64,
    pub bits: u32,
    pub budget: usize,
    /// Permit alternating acceleration when the oscillation count is large.
    pub accelerate: bool,
}

/// Largest number of half-periods per panel for which a 32-point rule
/// resolves the cosine to `eps`: (Φ/2)^64 / 64! < eps·10^-3 with Φ = sπ.
fn stride_for(eps: f64) -> u64 {
    let ln_fact = ln_gamma_f64(65.0);
    let target = (eps * 1e-3).ln();
    let mut s = 1u64;
    while 64.0 * ((s + 1) as f64 * PI / 2.0).ln() - ln_fact < target && s < 64 {
        s += 1;
    }
    s
}

/// Truncation point T with ∫_T^∞ t^j e^{-t^α} dt · e^{log_amp} below `tol`,
/// and the bound achieved there.
///
/// Uses Γ(s, x) ≤ x^{s-1} e^{-x} for s ≤ 1 and ≤ 2 x^{s-1} e^{-x} for
/// x > 2(s - 1), where s = (j + 1)/α and x = T^α.
pub(crate) fn tail_point(alpha: f64, j: f64, log_amp: f64, tol: f64) -> (f64, f64) {
    let s = (j + 1.0) / alpha;
    let c = if s <= 1.0 { 0.0 } else { 2f64.ln() };
    let log_bound = |x: f64| log_amp + c + (s - 1.0) * x.ln() - x - alpha.ln();
    let mut x = if s > 1.0 { 2.0 * (s - 1.0) + 1.0 } else { 1.0 };
    let target = tol.ln();
    while log_bound(x) > target {
        x += (0.02 * x).max(0.25);
    }
    (x.powf(1.0 / alpha), log_bound(x).exp())
}

/// ∫_0^∞ g(t) dt for an integrand carrying the factor e^{-t^α}, evaluated
/// in u with t = u^q so that the integrand is smooth at the origin. The
/// closure receives (u, t).
pub(crate) fn integrate_levy_type<G>(integrand: &LevyIntegrand, mut g: G) -> Quad
where
    G: FnMut(&Float, &Float) -> Float,
{
    let bits = integrand.bits;
    let q = integrand.alpha.q();
    let h = move |u: &Float| -> Float {
        let t = Float::with_val(bits, u.pow(q));
        let mut v = g(u, &t);
        if q > 1 {
            let jac = Float::with_val(bits, u.pow(q - 1)) * q;
            v *= jac;
        }
        v
    };
    let mut integ = Integrator::new(h, bits, integrand.budget);
    let freq = integrand.freq.to_f64();
    let pi = Float::with_val(bits, rug::float::Constant::Pi);
    let u_at = |t: &Float| Float::with_val(bits, t).root(q);
    let zero_at = |k: u64| {
        let c = Float::with_val(bits, k as f64 + integrand.shift);
        c * &pi / &integrand.freq
    };
    let t_max = Float::with_val(bits, integrand.t_max);

    let smooth = freq < 1e-8 || (integrand.shift * PI / freq) >= integrand.t_max;
    if smooth {
        let (v, e) = integ.adaptive(&Float::new(bits), &u_at(&t_max), integrand.tol);
        let err = if integ.exhausted { f64::INFINITY } else { e };
        return Quad { value: v, err, panels: integ.panels };
    }

    let half_periods = freq * integrand.t_max / PI;
    if integrand.accelerate && half_periods > ACCEL_THRESHOLD {
        return accelerated(&mut integ, integrand, &u_at, &zero_at);
    }

    let stride = stride_for(integrand.eps);
    let count = (half_periods / stride as f64).ceil() as usize + 1;
    if count > integrand.budget {
        return Quad { value: Float::new(bits), err: f64::INFINITY, panels: 0 };
    }
    let per_panel = integrand.tol / count as f64;
    let mut acc = Float::new(bits);
    let mut err = 0.0;
    let mut lo = Float::new(bits);
    let mut k = stride - 1;
    loop {
        let t = zero_at(k);
        let last = t >= t_max;
        let hi = u_at(if last { &t_max } else { &t });
        let (v, e) = integ.adaptive(&lo, &hi, per_panel);
        acc += v;
        err += e;
        if last || integ.exhausted {
            break;
        }
        lo = hi;
        k += stride;
    }
    if integ.exhausted {
        err = f64::INFINITY;
    }
    Quad { value: acc, err, panels: integ.panels }
}

// Direct sum over the first panels, then the alternating sequence of
// single half-period panels summed by the CVZ transform. The error is the
// change between n and n - 8 transformed terms.
fn accelerated<F>(
    integ: &mut Integrator<F>,
    integrand: &LevyIntegrand,
    u_at: &dyn Fn(&Float) -> Float,
    zero_at: &dyn Fn(u64) -> Float,
) -> Quad
where
    F: FnMut(&Float) -> Float,
{
    let bits = integrand.bits;
    let n = ((1.0 / integrand.tol).ln() + 3.0) / (3.0 + 8f64.sqrt()).ln();
    let n = n.ceil() as usize + 8;
    let per_panel = integrand.tol / (4 * (ACCEL_HEAD as usize + n)) as f64;

    let mut head = Float::new(bits);
    let mut err = 0.0;
    let mut lo = Float::new(bits);
    for k in 0..ACCEL_HEAD {
        let hi = u_at(&zero_at(k));
        let (v, e) = integ.adaptive(&lo, &hi, per_panel);
        head += v;
        err += e;
        lo = hi;
    }
    let mut terms = Vec::with_capacity(n);
    for k in ACCEL_HEAD..ACCEL_HEAD + n as u64 {
        let hi = u_at(&zero_at(k));
        let (v, e) = integ.adaptive(&lo, &hi, per_panel);
        terms.push(v);
        err += e;
        lo = hi;
    }
    let full = cvz_sum(&terms, n, bits);
    let coarse = cvz_sum(&terms, n - 8, bits);
    err += Float::with_val(bits, &full - &coarse).abs().to_f64();
    if integ.exhausted {
        err = f64::INFINITY;
    }
    Quad { value: head + full, err, panels: integ.panels }
}

/// F_α(z) = ∫_0^∞ e^{-t^α} cos(zt) dt by partitioned Gauss–Legendre.
pub fn levy_quad(alpha: AlphaParam, z: &XReal, ctx: &PrecisionCtx) -> Result<EvalResult> {
    levy_deriv_quad(alpha, z, 0, ctx)
}

/// d^order/dz^order F_α(z) for order 0, 1, 2, by differentiating under the
/// integral sign.
pub fn levy_deriv_quad(alpha: AlphaParam, z: &XReal, order: u32, ctx: &PrecisionCtx) -> Result<EvalResult> {
    if order > 2 {
        return Err(Error::InvalidParameter(format!("derivative order {order} not in 0..=2")));
    }
    if !z.is_finite() {
        return Err(Error::InvalidParameter("z must be finite".into()));
    }
    let bits = ctx.bits();
    let negative = *z < 0;
    let za = Float::with_val(bits, z.abs_ref());
    let tol = 0.1 * ctx.eps;
    let (t_max, tail) = tail_point(alpha.to_f64(), f64::from(order), 0.0, 0.01 * tol);
    let p = alpha.p();
    let g = |u: &Float, t: &Float| -> Float {
        let mut e = Float::with_val(bits, u.pow(p));
        e = (-e).exp();
        let zt = Float::with_val(bits, &za * t);
        let mut v = match order {
            1 => -(e * zt.sin()),
            2 => -(e * zt.cos()),
            _ => e * zt.cos(),
        };
        if order > 0 {
            v *= Float::with_val(bits, t.pow(order));
        }
        v
    };
    let integrand = LevyIntegrand {
        alpha,
        freq: za.clone(),
        shift: if order == 1 { 1.0 } else { 0.5 },
        t_max,
        tol: 0.89 * tol,
        eps: ctx.eps,
        bits,
        budget: ctx.max_terms,
        accelerate: alpha.to_f64() < 1.0,
    };
    let quad = integrate_levy_type(&integrand, g);
    let mut value = quad.value;
    if negative && order == 1 {
        value = -value;
    }
    let rounding = quad.panels as f64 * 64.0 * 2f64.powi(-(bits as i32));
    value.set_prec(bits);
    accept(value, quad.err + tail + rounding, ctx, Method::Quad, quad.panels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::gamma;

    fn ctx() -> PrecisionCtx {
        PrecisionCtx::new(50)
    }

    fn a(p: u32, q: u32) -> AlphaParam {
        AlphaParam::new(p, q).unwrap()
    }

    fn close(x: &Float, y: &Float, tol: f64) -> bool {
        Float::with_val(x.prec(), x - y).abs().to_f64() <= tol
    }

    #[test]
    fn strides() {
        assert_eq!(stride_for(1e-45), 2);
        assert!(stride_for(1e-10) >= 8);
    }

    #[test]
    fn cauchy_and_gauss_closed_forms() {
        let c = ctx();
        let r = levy_quad(a(1, 1), &c.real(1), &c).unwrap();
        assert!(close(&r.value, &c.real(0.5), 1e-44));
        assert!(r.err <= c.eps);
        let r = levy_quad(a(2, 1), &c.real(2), &c).unwrap();
        let want = c.pi().sqrt() / 2u32 * Float::with_val(c.bits(), -1).exp();
        assert!(close(&r.value, &want, 1e-44));
        assert_eq!(r.method, Method::Quad);
    }

    #[test]
    fn value_at_origin_is_gamma() {
        let c = ctx();
        let r = levy_quad(a(4, 1), &c.real(0), &c).unwrap();
        let want = gamma(&c.real(1.25), &c).unwrap();
        assert!(close(&r.value, &want, 1e-44));
    }

    #[test]
    fn evenness_is_exact() {
        let c = ctx();
        let x = levy_quad(a(3, 2), &c.real(2.5), &c).unwrap();
        let y = levy_quad(a(3, 2), &c.real(-2.5), &c).unwrap();
        assert_eq!(x.value, y.value);
    }

    #[test]
    fn derivatives() {
        let c = ctx();
        let d = levy_deriv_quad(a(2, 1), &c.real(0), 1, &c).unwrap();
        assert!(d.value.to_f64().abs() < 1e-44);
        let d = levy_deriv_quad(a(1, 1), &c.real(1), 1, &c).unwrap();
        assert!(close(&d.value, &c.real(-0.5), 1e-44));
        // d²/dz² (1+z²)^-1 = (6z² - 2)/(1+z²)^3 → 0.5 at z = 1
        let d = levy_deriv_quad(a(1, 1), &c.real(1), 2, &c).unwrap();
        assert!(close(&d.value, &c.real(0.5), 1e-44));
        assert!(levy_deriv_quad(a(1, 1), &c.real(1), 3, &c).is_err());
        let odd = levy_deriv_quad(a(4, 1), &c.real(-3), 1, &c).unwrap();
        let even = levy_deriv_quad(a(4, 1), &c.real(3), 1, &c).unwrap();
        assert_eq!(odd.value, -even.value);
    }

    #[test]
    fn slow_decay_uses_acceleration() {
        // α = 1/2 at z = 20: tens of thousands of half-periods.
        let c = PrecisionCtx::new(30);
        let r = levy_quad(a(1, 2), &c.real(20), &c).unwrap();
        let fine = PrecisionCtx::new(40);
        let s = levy_quad(a(1, 2), &fine.real(20), &fine).unwrap();
        assert!(close(&r.value, &s.value, 1e-25));
        assert!(r.err <= c.eps);
    }

    #[test]
    fn budget_exhaustion_reports_best_value() {
        let c = ctx().with_max_terms(5);
        match levy_quad(a(1, 1), &c.real(10), &c) {
            Err(Error::ToleranceNotMet { achieved, target, .. }) => assert!(achieved > target),
            other => panic!("expected ToleranceNotMet, got {other:?}"),
        }
    }
}
