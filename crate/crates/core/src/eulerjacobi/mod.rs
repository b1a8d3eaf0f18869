//! The series S_α(a) = Σ_{n≥0} e^{-a n^α}, directly and through the
//! inversion formula in terms of F_α, and the Waring counts whose
//! generating function it gives.

mod waring;

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};
use crate::numkernel::{gamma_bits, hurwitz_zeta, ln_gamma_f64, AlphaParam, PrecisionCtx, XReal};
use crate::policy::{levy_eval, MethodPolicy};
use crate::quadrature::{accept, algebraic_coeff, log_exp_envelope, EvalResult, Method};

pub use waring::{waring_count, waring_counts, waring_genfun_check, WaringCheck, WARING_BUDGET};

/// Exponent and (real, positive) parameter of the series.
#[derive(Debug, Clone)]
pub struct EJParams {
    pub alpha: AlphaParam,
    pub a: XReal,
}

impl EJParams {
    pub fn new(alpha: AlphaParam, a: XReal) -> Result<Self> {
        if !(a > 0 && a.is_finite()) {
            return Err(Error::Domain(format!("Euler-Jacobi parameter a must be > 0, got {}", a.to_f64())));
        }
        Ok(Self { alpha, a })
    }
}

/// Bound on Σ_{n>N} e^{-a n^α} ≤ ∫_N^∞ e^{-a x^α} dx as a natural log:
/// e^{-aN^α} max(1, N^{1-α}/(aα)), doubled for α < 1 where the
/// integral-comparison estimate is only asymptotic.
fn ln_tail(alpha: f64, a: f64, n: f64) -> f64 {
    let base = -a * n.powf(alpha) + (n.powf(1.0 - alpha) / (a * alpha)).max(1.0).ln();
    if alpha < 1.0 {
        base + 2f64.ln()
    } else {
        base
    }
}

/// S_α(a) summed up to the first N whose tail bound is below the target.
pub fn ej_direct(params: &EJParams, ctx: &PrecisionCtx) -> Result<EvalResult> {
    let bits = ctx.bits();
    let (af, al) = (params.a.to_f64(), params.alpha.to_f64());
    let target = (0.01 * ctx.eps).ln();
    let mut n = ((-target / af).powf(1.0 / al)).ceil().max(1.0);
    while ln_tail(al, af, n) > target && n <= ctx.max_terms as f64 {
        n += (n * 0.05).ceil();
    }
    let count = n.min(ctx.max_terms as f64) as usize;
    let alpha = params.alpha.value(bits);
    let mut sum = Float::new(bits);
    for k in 0..=count {
        let power = Float::with_val(bits, k as u32).pow(&alpha);
        sum += (-power * &params.a).exp();
    }
    let tail = ln_tail(al, af, count as f64).exp();
    let rounding = sum.to_f64() * count as f64 * (-f64::from(bits)).exp2();
    accept(sum, tail + rounding, ctx, Method::Direct, count + 1)
}

/// Tail of Σ_{n>N} F(n·step) and its error bound.
struct Tail {
    value: Float,
    err: f64,
}

/// f64 estimate of the error left after summing F at n·step for n ≤ N and
/// using the algebraic tail: None when the tail model is not yet usable.
fn tail_error(alpha: AlphaParam, step: f64, n: u64) -> Option<(f64, u32)> {
    let al = alpha.to_f64();
    let z = (n + 1) as f64 * step;
    let mut err = 0.0;
    let mut m_opt = 0;
    if !alpha.is_even_integer() {
        // first omitted term of the optimally truncated algebraic series;
        // magnitudes without the sine so that vanishing terms do not stop it
        let mag = |m: u32| {
            let mf = f64::from(m);
            (ln_gamma_f64(mf * al + 1.0) - ln_gamma_f64(mf + 1.0) - (1.0 + mf * al) * z.ln()).exp()
        };
        let mut best = 1;
        for m in 2..=50 {
            if mag(m) < mag(best) {
                best = m;
            } else if mag(m) > mag(best) {
                break;
            }
        }
        if best == 1 && mag(2) >= mag(1) {
            return None;
        }
        // Σ_{j>N} (j step)^{-s} ≤ z^{-s} (1 + (N+1)/(s-1))
        let s = 1.0 + f64::from(best) * al;
        err += mag(best) * (1.0 + (n + 1) as f64 / (s - 1.0));
        m_opt = best;
    }
    if al >= 2.0 {
        // exponentially small remainder, summed geometrically over n > N
        if z < 2.0 * al {
            return None;
        }
        let first = log_exp_envelope(al, z);
        let ratio = log_exp_envelope(al, z + step) - first;
        if ratio >= 0.0 {
            return None;
        }
        err += (first - (1.0 - ratio.exp()).ln()).exp();
    }
    Some((err, m_opt))
}

fn algebraic_tail(alpha: AlphaParam, step: &Float, n: u64, m_opt: u32, bits: u32) -> Result<Float> {
    let mut total = Float::new(bits);
    let start = Float::with_val(bits, n + 1);
    for m in 1..m_opt {
        let c = algebraic_coeff(alpha, m, bits)?;
        if c.is_zero() {
            continue;
        }
        let s = Float::with_val(bits, alpha.value(bits) * m) + 1u32;
        let zeta = hurwitz_zeta(&s, &start, bits)?;
        let scale = Float::with_val(bits, step.pow(&s)).recip();
        total += c * zeta * scale;
    }
    Ok(total)
}

/// S_α(a) from Γ(1/α + 1)/a^{1/α} + 1/2 + (2/a^{1/α}) Σ_{n≥1} F_α(2nπ/a^{1/α}),
/// for α > 1. F is evaluated by the automatic policy for n ≤ N and the
/// rest of the sum by the algebraic expansion summed with Hurwitz zeta
/// values (zero for even α, whose F decays exponentially).
pub fn ej_inversion(params: &EJParams, ctx: &PrecisionCtx) -> Result<EvalResult> {
    let alpha = params.alpha;
    if alpha.p() <= alpha.q() {
        return Err(Error::Divergence(format!("inversion sum needs alpha > 1, got {alpha}")));
    }
    let bits = ctx.bits();
    let inv_alpha = Float::with_val(bits, alpha.q()) / alpha.p();
    let b = Float::with_val(bits, (&params.a).pow(&inv_alpha));
    let pi = Float::with_val(bits, Constant::Pi);
    let step = Float::with_val(bits, &pi * 2u32) / &b;
    let half_b = b.to_f64() / 2.0;
    let target = 0.01 * ctx.eps * half_b;

    let mut n = 0u64;
    let (tail_err, m_opt) = loop {
        if let Some((e, m)) = tail_error(alpha, step.to_f64(), n) {
            if e <= target {
                break (e, m);
            }
        }
        n += 1;
        if n as usize > ctx.max_terms {
            return Err(Error::MaxTermsExceeded { terms: ctx.max_terms });
        }
    };
    let tail = Tail { value: algebraic_tail(alpha, &step, n, m_opt, bits)?, err: tail_err };

    let policy = MethodPolicy::default();
    let mut sum = tail.value;
    let mut err = tail.err;
    for k in 1..=n {
        let z = Float::with_val(bits, &step * k);
        let f = levy_eval(alpha, &z, &policy, ctx)?;
        sum += &f.value;
        err += f.err;
    }
    let lead = gamma_bits(&Float::with_val(bits, &inv_alpha + 1u32), bits)? / &b + 0.5f64;
    let value = lead + sum * 2u32 / &b;
    accept(value, err / half_b, ctx, Method::Inversion, n as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(alpha: AlphaParam, a: f64, c: &PrecisionCtx) -> EJParams {
        EJParams::new(alpha, c.real(a)).unwrap()
    }

    fn int(a: u32) -> AlphaParam {
        AlphaParam::integer(a).unwrap()
    }

    #[test]
    fn geometric_and_gaussian_cases() {
        let c = PrecisionCtx::new(40);
        let g = ej_direct(&p(int(1), 1.0, &c), &c).unwrap();
        let want = Float::with_val(c.bits(), 1u32) / (1u32 - c.real(-1).exp());
        assert!(Float::with_val(c.bits(), &g.value - &want).abs() < 1e-36);
        let s = ej_direct(&p(int(2), 10.0, &c), &c).unwrap();
        let want = 1u32 + c.real(-10).exp() + c.real(-40).exp() + c.real(-90).exp();
        assert!(Float::with_val(c.bits(), &s.value - &want).abs() < 1e-36);
    }

    #[test]
    fn rejects_nonpositive_parameter() {
        let c = PrecisionCtx::new(20);
        assert!(EJParams::new(int(2), c.real(0)).is_err());
        assert!(EJParams::new(int(2), c.real(-1)).is_err());
    }

    #[test]
    fn too_small_a_exhausts_the_budget() {
        let c = PrecisionCtx::new(20).with_max_terms(1000);
        assert!(matches!(ej_direct(&p(int(1), 1e-3, &c), &c), Err(Error::ToleranceNotMet { .. })));
    }

    #[test]
    fn theta_transformation() {
        let c = PrecisionCtx::new(40);
        for a in [0.1, 1.0] {
            let d = ej_direct(&p(int(2), a, &c), &c).unwrap();
            let i = ej_inversion(&p(int(2), a, &c), &c).unwrap();
            let diff = Float::with_val(c.bits(), &d.value - &i.value).abs().to_f64();
            assert!(diff < 1e-34, "a = {a}: {diff:e}");
        }
    }

    #[test]
    fn inversion_with_algebraic_tail() {
        let c = PrecisionCtx::new(30);
        for (alpha, a) in [(AlphaParam::new(3, 2).unwrap(), 1.0), (int(3), 0.5), (int(4), 0.5)] {
            let d = ej_direct(&p(alpha, a, &c), &c).unwrap();
            let i = ej_inversion(&p(alpha, a, &c), &c).unwrap();
            let diff = Float::with_val(c.bits(), &d.value - &i.value).abs().to_f64();
            assert!(diff <= 3.0 * (d.err + i.err), "{alpha} a = {a}: {diff:e} vs {:e}", d.err + i.err);
        }
    }

    #[test]
    fn leading_small_a_term() {
        // a^{1/α} S → Γ(1/α + 1); the 1/2 term leaves a^{1/α}/2 behind
        let c = PrecisionCtx::new(20);
        let alpha = AlphaParam::new(3, 2).unwrap();
        let g = gamma_bits(&c.real(5.0 / 3.0), c.bits()).unwrap().to_f64();
        let mut last = f64::INFINITY;
        for a in [1e-1, 1e-2, 1e-3] {
            let s = ej_direct(&p(alpha, a, &c), &c).unwrap().to_f64();
            let dev = (a.powf(2.0 / 3.0) * s / g - 1.0).abs();
            assert!(dev < last);
            last = dev;
        }
        assert!(last < 0.01);
    }

    #[test]
    fn decreasing_in_a() {
        let c = PrecisionCtx::new(20);
        let mut prev = f64::INFINITY;
        for a in [0.05, 0.1, 0.3, 1.0, 2.0, 5.0] {
            let s = ej_direct(&p(AlphaParam::new(5, 2).unwrap(), a, &c), &c).unwrap().to_f64();
            assert!(s < prev);
            prev = s;
        }
    }
}
