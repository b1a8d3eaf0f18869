use rug::float::{Constant, Round};
use rug::Float;

use super::bernoulli::bernoulli_b2k;
use super::{PrecisionCtx, XReal};
use crate::error::{Error, Result};

/// Γ(x) to the context precision.
///
/// Stirling's series for ln Γ after shifting the argument above a
/// precision-dependent threshold, then the downward recurrence; the
/// reflection formula handles x < 1/2.
pub fn gamma(x: &XReal, ctx: &PrecisionCtx) -> Result<XReal> {
    let mut v = gamma_bits(x, ctx.bits())?;
    v.set_prec_round(ctx.bits(), Round::Nearest);
    Ok(v)
}

/// Γ(x) with a relative error of a few units in 2^-bits.
pub fn gamma_bits(x: &Float, bits: u32) -> Result<Float> {
    if x.is_integer() && *x <= 0 {
        return Err(Error::Pole { x: x.to_f64() });
    }
    let work = bits + 32;
    let half = Float::with_val(work, 0.5);
    if *x < half {
        // Γ(x) Γ(1-x) = π / sin(πx)
        let one_minus = Float::with_val(work, 1 - x);
        let g = gamma_bits(&one_minus, work)?;
        let s = sin_pi(&Float::with_val(work, x));
        let pi = Float::with_val(work, Constant::Pi);
        let mut out = pi / (s * g);
        out.set_prec(bits);
        return Ok(out);
    }

    // Shift so that Stirling's smallest term e^{-2πy} sits below 2^-work.
    let digits = f64::from(bits) / std::f64::consts::LOG2_10;
    let y_min = (0.8 * digits).max(0.12 * f64::from(work) + 2.0);
    let xf = x.to_f64();
    let shift = if xf < y_min { (y_min - xf).ceil() as u32 } else { 0 };

    let mut prod = Float::with_val(work, 1);
    let mut y = Float::with_val(work, x);
    for _ in 0..shift {
        prod *= &y;
        y += 1;
    }
    let lg = ln_gamma_stirling(&y, work);
    let extra = (lg.to_f64().abs() + 2.0).log2().ceil() as u32;
    let mut lg = Float::with_val(work + extra, lg);
    lg.exp_mut();
    let mut out = lg / prod;
    out.set_prec(bits);
    Ok(out)
}

// (y - 1/2) ln y - y + ln(2π)/2 + Σ B_{2k} / (2k(2k-1) y^{2k-1}), y large.
fn ln_gamma_stirling(y: &Float, bits: u32) -> Float {
    let ln_y = Float::with_val(bits, y.ln_ref());
    let mut acc = Float::with_val(bits, y - 0.5) * &ln_y;
    acc -= y;
    let mut two_pi = Float::with_val(bits, Constant::Pi);
    two_pi *= 2;
    acc += two_pi.ln() / 2;

    let tiny = Float::with_val(bits, Float::i_exp(1, -(bits as i32)));
    let inv_y2 = Float::with_val(bits, y.square_ref()).recip();
    let mut y_pow = Float::with_val(bits, y.recip_ref()); // y^{-(2k-1)}
    let mut prev = Float::with_val(bits, f64::INFINITY);
    for k in 1usize.. {
        let b = bernoulli_b2k(k);
        let denom = (2 * k * (2 * k - 1)) as u64;
        let mut term = Float::with_val(bits, &b) / denom;
        term *= &y_pow;
        let mag = Float::with_val(bits, term.abs_ref());
        if mag >= prev {
            break;
        }
        acc += &term;
        if mag < tiny {
            break;
        }
        prev = mag;
        y_pow *= &inv_y2;
    }
    acc
}

/// sin(πx), reducing x modulo 2 before multiplying by π.
pub fn sin_pi(x: &Float) -> Float {
    let bits = x.prec();
    let n = Float::with_val(bits, x.round_ref());
    let r = Float::with_val(bits, x - &n);
    let mut s = Float::with_val(bits, Constant::Pi) * r;
    s.sin_mut();
    let odd = n
        .to_integer()
        .map(|i| i.is_odd())
        .unwrap_or(false);
    if odd {
        -s
    } else {
        s
    }
}

/// sin(π·num/den), exact (0 or ±1) whenever the angle is a multiple of π/2.
pub fn sin_pi_frac(num: i64, den: u64, bits: u32) -> Float {
    let den = den as i64;
    if (2 * num) % den == 0 {
        let v = match (2 * num / den).rem_euclid(4) {
            1 => 1,
            3 => -1,
            _ => 0,
        };
        return Float::with_val(bits, v);
    }
    let x = Float::with_val(bits + 16, num) / den;
    let mut s = sin_pi(&x);
    s.set_prec(bits);
    s
}

/// The rising factorial x(x+1)…(x+n-1); 1 when n = 0.
pub fn pochhammer(x: &XReal, n: u32) -> XReal {
    let mut acc = Float::with_val(x.prec(), 1);
    let mut f = x.clone();
    for _ in 0..n {
        acc *= &f;
        f += 1;
    }
    acc
}

/// ln|Γ(x)| in double precision, for sizing series and precisions.
pub fn ln_gamma_f64(x: f64) -> f64 {
    use std::f64::consts::PI;
    if x < 0.5 {
        let s = (PI * x).sin().abs();
        return PI.ln() - s.ln() - ln_gamma_f64(1.0 - x);
    }
    let mut y = x;
    let mut shift = 0.0;
    while y < 20.0 {
        shift += y.ln();
        y += 1.0;
    }
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let series = inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
    (y - 0.5) * y.ln() - y + 0.5 * (2.0 * PI).ln() + series - shift
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionCtx {
        PrecisionCtx::new(50)
    }

    fn rel(a: &Float, b: &Float) -> f64 {
        let d = Float::with_val(a.prec(), a - b);
        (d / b).to_f64().abs()
    }

    #[test]
    fn known_values() {
        let c = ctx();
        let g = gamma(&c.real(0.5), &c).unwrap();
        let sqrt_pi = c.pi().sqrt();
        assert!(rel(&g, &sqrt_pi) < 1e-55);
        let g5 = gamma(&c.real(5), &c).unwrap();
        assert!(rel(&g5, &c.real(24)) < 1e-55);
    }

    #[test]
    fn poles_are_rejected() {
        let c = ctx();
        for x in [0, -1, -7] {
            assert!(matches!(gamma(&c.real(x), &c), Err(Error::Pole { .. })));
        }
    }

    #[test]
    fn negative_non_integer_uses_reflection() {
        // Γ(-1/2) = -2√π
        let c = ctx();
        let g = gamma(&c.real(-0.5), &c).unwrap();
        let want = c.pi().sqrt() * -2;
        assert!(rel(&g, &want) < 1e-55);
    }

    #[test]
    fn large_argument() {
        // Γ(101) = 100!
        let c = ctx();
        let g = gamma(&c.real(101), &c).unwrap();
        let fact = rug::Integer::from(rug::Integer::factorial(100));
        assert!(rel(&g, &c.real(&fact)) < 1e-55);
    }

    #[test]
    fn pochhammer_cases() {
        let c = ctx();
        assert_eq!(pochhammer(&c.real(7.3), 0), 1);
        assert_eq!(pochhammer(&c.real(1), 5), 120);
        assert_eq!(pochhammer(&c.real(0.5), 3), 1.875);
        assert_eq!(pochhammer(&c.real(-2), 4), 0);
    }

    #[test]
    fn sine_of_rational_multiples() {
        assert_eq!(sin_pi_frac(3, 2, 64), -1);
        assert_eq!(sin_pi_frac(5, 2, 64), 1);
        assert!(sin_pi_frac(4, 1, 64).is_zero());
        assert_eq!(sin_pi_frac(-1, 2, 64), -1);
        let v = sin_pi_frac(1, 6, 128);
        assert!(Float::with_val(128, &v - 0.5f64).abs() < 1e-35);
    }

    #[test]
    fn ln_gamma_double() {
        assert!((ln_gamma_f64(5.0) - 24f64.ln()).abs() < 1e-13);
        assert!((ln_gamma_f64(0.5) - 0.5 * std::f64::consts::PI.ln()).abs() < 1e-13);
        assert!((ln_gamma_f64(171.5) - 709.143_163_030_928_2).abs() < 1e-9);
    }
}
