use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};
use crate::numkernel::{ln_gamma_f64, PrecisionCtx, XReal};
use crate::policy::{levy_eval, MethodPolicy};
use crate::quadrature::{levy_deriv_quad, EvalResult, Method};
use crate::AlphaParam;

/// Largest |x| accepted by [`psi_series`].
pub const PSI_MAX_ARG: f64 = 30.0;

/// Half-width of the symmetric offsets used on the diagonal.
const DIAGONAL_H: f64 = 1e-4;
/// Below this |x - y| the kernel is taken by the symmetric limit.
const DIAGONAL_GAP: f64 = 1e-6;

fn sqrt2(bits: u32) -> Float {
    Float::with_val(bits, 2u32).sqrt()
}

/// φ̂^{(order)}(x) for φ̂(x) = (√2/π) F_4(√2 x), order 0, 1 or 2. The value
/// uses the automatic evaluator, the derivatives quadrature.
pub fn phi_hat(x: &XReal, order: u32, ctx: &PrecisionCtx) -> Result<EvalResult> {
    if order > 2 {
        return Err(Error::InvalidParameter(format!("phi_hat derivative order {order} not in 0..=2")));
    }
    let bits = ctx.bits();
    let r2 = sqrt2(bits);
    let arg = Float::with_val(bits, x * &r2);
    let four = AlphaParam::integer(4)?;
    let f = if order == 0 {
        levy_eval(four, &arg, &MethodPolicy::default(), ctx)?
    } else {
        levy_deriv_quad(four, &arg, order, ctx)?
    };
    // (√2/π)(√2)^order
    let mut scale = Float::with_val(bits, &r2 / Float::with_val(bits, Constant::Pi));
    for _ in 0..order {
        scale *= &r2;
    }
    let s = scale.to_f64();
    Ok(EvalResult { value: f.value * scale, err: f.err * s, method: f.method, terms: f.terms })
}

/// log10 of the largest term of the ψ series at |x|.
fn psi_peak_log10(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let lx = x.abs().ln();
    let mut best = f64::NEG_INFINITY;
    for n in 0..10_000 {
        let nf = n as f64;
        let l = ln_gamma_f64(2.0 * nf + 1.0) - ln_gamma_f64(nf + 1.0) - ln_gamma_f64(4.0 * nf + 2.0)
            + (4.0 * nf + 1.0) * lx;
        best = best.max(l);
        if n > 4 && l < best - 50.0 {
            break;
        }
    }
    best / std::f64::consts::LN_10
}

/// ψ^{(order)}(x) for ψ(x) = -(1/√π) Σ (-1)^n x^{4n+1} (2n)! / (n! (4n+1)!),
/// differentiated term by term. The series is odd in x, exactly.
pub fn psi_series(x: &XReal, order: u32, ctx: &PrecisionCtx) -> Result<EvalResult> {
    if order > 2 {
        return Err(Error::InvalidParameter(format!("psi derivative order {order} not in 0..=2")));
    }
    let xf = x.to_f64();
    let peak = psi_peak_log10(xf);
    if xf.abs() > PSI_MAX_ARG {
        return Err(Error::Cancellation {
            max_term_log10: peak,
            value_log10: f64::NAN,
            allowed_log10: psi_peak_log10(PSI_MAX_ARG),
        });
    }
    let bits = ctx.bits();
    let work = bits + (peak.max(0.0) * std::f64::consts::LOG2_10).ceil() as u32 + 32;
    let x = Float::with_val(work, x);
    let x4 = Float::with_val(work, x.square_ref()).square();
    // c_n x^{4n+1}; c_0 = 1
    let mut base = x.clone();
    let mut sum = Float::new(work);
    let mut prev_size = f64::INFINITY;
    let mut omitted = 0.0;
    let mut terms = 0;
    for n in 0u32..ctx.max_terms as u32 {
        if n > 0 {
            // c_n / c_{n-1} = -(2n)(2n-1) / (n (4n+1)(4n)(4n-1)(4n-2))
            base *= &x4;
            base *= (2 * n) * (2 * n - 1);
            base /= n;
            base /= (4 * n + 1) * (4 * n);
            base /= (4 * n - 1) * (4 * n - 2);
            base = -base;
        }
        let e = 4 * n + 1;
        // derivative of x^e is e x^{e-1}; divide through by x
        let term = match order {
            0 => base.clone(),
            1 if x.is_zero() => Float::with_val(work, u32::from(n == 0)),
            1 => Float::with_val(work, &base * e) / &x,
            _ if x.is_zero() => Float::new(work),
            _ => Float::with_val(work, &base * (e * (e - 1))) / Float::with_val(work, x.square_ref()),
        };
        let size = term.to_f64().abs();
        terms = n as usize + 1;
        if n > 0 && size < prev_size && size < 0.01 * ctx.eps * sum.to_f64().abs().max(1.0) {
            omitted = size;
            break;
        }
        sum += &term;
        prev_size = size;
        if x.is_zero() {
            break;
        }
    }
    let pi = Float::with_val(work, Constant::Pi);
    let value = Float::with_val(bits, -sum / pi.sqrt());
    let rounding = 10f64.powf(peak) * terms as f64 * (-f64::from(work)).exp2();
    Ok(EvalResult { value, err: omitted + rounding, method: Method::Taylor, terms })
}

/// One value of the kernel.
#[derive(Debug, Clone)]
pub struct KernelPoint {
    pub x: f64,
    pub y: f64,
    pub value: XReal,
    pub err: f64,
}

// φ̂'(x)ψ'(y) - φ̂''(x)ψ(y) - φ̂(x)ψ''(y) and its error.
pub(crate) fn numerator(x: &XReal, y: &XReal, ctx: &PrecisionCtx) -> Result<(XReal, f64)> {
    let bits = ctx.bits();
    let p: Vec<EvalResult> = (0..3).map(|k| phi_hat(x, k, ctx)).collect::<Result<_>>()?;
    let s: Vec<EvalResult> = (0..3).map(|k| psi_series(y, k, ctx)).collect::<Result<_>>()?;
    let mut v = Float::with_val(bits, &p[1].value * &s[1].value);
    v -= Float::with_val(bits, &p[2].value * &s[0].value);
    v -= Float::with_val(bits, &p[0].value * &s[2].value);
    let pair = |a: &EvalResult, b: &EvalResult| a.to_f64().abs() * b.err + b.to_f64().abs() * a.err;
    let err = pair(&p[1], &s[1]) + pair(&p[2], &s[0]) + pair(&p[0], &s[2]);
    Ok((v, err))
}

fn off_diagonal(x: &XReal, y: &XReal, ctx: &PrecisionCtx) -> Result<(XReal, f64)> {
    let (n, e) = numerator(x, y, ctx)?;
    let d = Float::with_val(ctx.bits(), x - y);
    let df = d.to_f64().abs();
    Ok((n / d, e / df))
}

/// K̂(x, y) = [φ̂'(x)ψ'(y) - φ̂''(x)ψ(y) - φ̂(x)ψ''(y)] / (x - y).
///
/// For |x - y| < 1e-6 the removable singularity is taken as the mean of
/// K̂(x+h, y-h) and K̂(x-h, y+h) at h = 1e-4, with one Richardson step
/// against h/2.
pub fn bh_kernel(x: &XReal, y: &XReal, ctx: &PrecisionCtx) -> Result<KernelPoint> {
    let bits = ctx.bits();
    let gap = Float::with_val(bits, x - y).abs().to_f64();
    let (value, err) = if gap >= DIAGONAL_GAP {
        off_diagonal(x, y, ctx)?
    } else {
        let sym = |h: f64| -> Result<(XReal, f64)> {
            let h = Float::with_val(bits, h);
            let (a, ea) = off_diagonal(&Float::with_val(bits, x + &h), &Float::with_val(bits, y - &h), ctx)?;
            let (b, eb) = off_diagonal(&Float::with_val(bits, x - &h), &Float::with_val(bits, y + &h), ctx)?;
            Ok(((a + b) / 2u32, (ea + eb) / 2.0))
        };
        let (k1, e1) = sym(DIAGONAL_H)?;
        let (k2, e2) = sym(DIAGONAL_H / 2.0)?;
        let diff = Float::with_val(bits, &k2 - &k1);
        let value = k2 + Float::with_val(bits, &diff / 3u32);
        (value, diff.to_f64().abs() / 3.0 + e1 + e2)
    };
    Ok(KernelPoint { x: x.to_f64(), y: y.to_f64(), value, err })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::gamma;
    use crate::quadrature::levy_quad;

    fn ctx() -> PrecisionCtx {
        PrecisionCtx::new(30)
    }

    #[test]
    fn phi_hat_at_origin_and_one() {
        let c = ctx();
        let got = phi_hat(&c.real(0), 0, &c).unwrap();
        let want = sqrt2(c.bits()) / c.pi() * gamma(&c.real(1.25), &c).unwrap();
        assert!(Float::with_val(c.bits(), &got.value - &want).abs() < 1e-27);
        assert!((got.to_f64() - 0.408_024_469_549_131_5).abs() < 1e-15);
        let one = phi_hat(&c.real(1), 0, &c).unwrap();
        let quad = levy_quad(AlphaParam::integer(4).unwrap(), &sqrt2(c.bits()), &c).unwrap();
        let want = quad.value * sqrt2(c.bits()) / c.pi();
        assert!(Float::with_val(c.bits(), &one.value - &want).abs() < 1e-26);
        let m = phi_hat(&c.real(-1), 0, &c).unwrap();
        assert!(Float::with_val(c.bits(), &one.value - &m.value).abs() < 1e-26);
    }

    #[test]
    fn phi_hat_derivatives_by_differences() {
        let c = ctx();
        let h = 1e-6;
        let f = |x: f64, k| phi_hat(&c.real(x), k, &c).unwrap().to_f64();
        let fd1 = (f(0.7 + h, 0) - f(0.7 - h, 0)) / (2.0 * h);
        assert!((fd1 - f(0.7, 1)).abs() < 1e-8);
        let fd2 = (f(0.7 + h, 1) - f(0.7 - h, 1)) / (2.0 * h);
        assert!((fd2 - f(0.7, 2)).abs() < 1e-8);
    }

    #[test]
    fn psi_basics() {
        let c = ctx();
        assert!(psi_series(&c.real(0), 0, &c).unwrap().value.is_zero());
        let d = psi_series(&c.real(0), 1, &c).unwrap();
        let want = -Float::with_val(c.bits(), c.pi().sqrt()).recip();
        assert!(Float::with_val(c.bits(), &d.value - &want).abs() < 1e-28);
        assert!(psi_series(&c.real(0), 2, &c).unwrap().value.is_zero());
        for x in [0.3, 1.0, 7.5, 29.0] {
            for k in 0..3 {
                let a = psi_series(&c.real(x), k, &c).unwrap();
                let b = psi_series(&c.real(-x), k, &c).unwrap();
                // odd, even, odd
                if k == 1 {
                    assert_eq!(a.value, b.value);
                } else {
                    assert_eq!(a.value, -b.value);
                }
            }
        }
        assert!(matches!(psi_series(&c.real(31), 0, &c), Err(Error::Cancellation { .. })));
    }

    #[test]
    fn psi_value_at_one() {
        let c = ctx();
        let v = psi_series(&c.real(1), 0, &c).unwrap();
        let want = c.parse("-0.554805070015158524796356140247").unwrap();
        assert!(Float::with_val(c.bits(), &v.value - &want).abs() < 1e-28);
        // x = 0.5, second derivative
        let v = psi_series(&c.real(0.5), 2, &c).unwrap();
        let want = c.parse("0.0234974055447316545948030642078").unwrap();
        assert!(Float::with_val(c.bits(), &v.value - &want).abs() < 1e-28);
    }

    #[test]
    fn kernel_is_continuous_across_the_diagonal() {
        let c = ctx();
        let near = bh_kernel(&c.real(0.3), &c.real(0.3 - 1e-7), &c).unwrap();
        let off = bh_kernel(&c.real(0.3), &c.real(0.3 - 1e-3), &c).unwrap();
        assert!((near.value.to_f64() - off.value.to_f64()).abs() < 1e-4);
        let on = bh_kernel(&c.real(0.8), &c.real(0.8), &c).unwrap();
        let want = 0.221_573_566_446;
        assert!((on.value.to_f64() - want).abs() < 1e-6, "{}", on.value);
        assert!(on.err < 1e-6);
        assert!(bh_kernel(&c.real(1), &c.real(-1), &c).unwrap().value.is_finite());
    }

    #[test]
    fn numerator_vanishes_on_the_diagonal() {
        let c = ctx();
        for x in [0.0, 0.5, -1.3, 2.0] {
            let (n, e) = numerator(&c.real(x), &c.real(x), &c).unwrap();
            assert!(n.to_f64().abs() <= e + 1e-26, "x = {x}");
        }
    }
}
