use rug::float::Constant;
use rug::Float;

use super::gamma::gamma_bits;
use super::{PrecisionCtx, XReal};
use crate::error::{Error, Result};

/// Bessel function of the first kind J_ν(x) for ν ≥ -1/2, x ≥ 0.
///
/// Ascending series up to x = max(20, digits), Hankel's asymptotic
/// expansion beyond. When the Hankel series stalls before reaching the
/// working precision the ascending series is used instead, at a precision
/// raised to absorb its cancellation.
pub fn bessel_j(nu: f64, x: &XReal, ctx: &PrecisionCtx) -> Result<XReal> {
    let mut v = bessel_j_bits(nu, x, ctx.bits())?;
    v.set_prec(ctx.bits());
    Ok(v)
}

pub fn bessel_j_bits(nu: f64, x: &Float, bits: u32) -> Result<Float> {
    BesselJ::new(nu, bits)?.eval(x)
}

/// J_ν at a fixed order and precision, with 1/Γ(ν+1) computed once.
#[derive(Debug, Clone)]
pub struct BesselJ {
    nu: f64,
    bits: u32,
    switch: f64,
    inv_gamma: Float,
}

impl BesselJ {
    pub fn new(nu: f64, bits: u32) -> Result<Self> {
        if !(nu >= -0.5) {
            return Err(Error::Domain(format!("bessel_j needs nu >= -1/2, got {nu}")));
        }
        let wide = bits + 64;
        let inv_gamma = gamma_bits(&Float::with_val(wide, nu + 1.0), wide)?.recip();
        let digits = f64::from(bits) / std::f64::consts::LOG2_10;
        Ok(Self { nu, bits, switch: digits.max(20.0), inv_gamma })
    }

    pub fn eval(&self, x: &Float) -> Result<Float> {
        let (nu, bits) = (self.nu, self.bits);
        if *x < 0 {
            return Err(Error::Domain(format!("bessel_j needs x >= 0, got {}", x.to_f64())));
        }
        if x.is_zero() {
            return match nu {
                0.0 => Ok(Float::with_val(bits, 1)),
                n if n > 0.0 => Ok(Float::new(bits)),
                _ => Err(Error::Domain("J_nu(0) is unbounded for nu < 0".into())),
            };
        }
        if x.to_f64() > self.switch {
            if let Some(v) = hankel(nu, x, bits) {
                return Ok(v);
            }
        }
        Ok(ascending(nu, x, bits, &self.inv_gamma))
    }
}

fn ascending(nu: f64, x: &Float, bits: u32, inv_gamma: &Float) -> Float {
    let xf = x.to_f64();
    // The largest term is about e^x / (x^ν Γ(ν+1)); carry that many extra bits.
    let work = bits + (xf * std::f64::consts::LOG2_E).ceil() as u32 + 16;
    let nu_x = Float::with_val(work, nu);
    let half_x = Float::with_val(work, x / 2u32);
    let neg_h2 = -Float::with_val(work, half_x.square_ref());
    let tiny = Float::with_val(work, Float::i_exp(1, -(work as i32)));

    let mut term = Float::with_val(work, 1);
    let mut sum = Float::with_val(work, 1);
    let mut k = 0u32;
    loop {
        let denom = Float::with_val(work, &nu_x + (k + 1)) * (k + 1);
        term *= &neg_h2;
        term /= denom;
        sum += &term;
        k += 1;
        if f64::from(k) > xf && Float::with_val(work, term.abs_ref()) < Float::with_val(work, sum.abs_ref()) * &tiny {
            break;
        }
    }
    let mut scale = half_x;
    scale.pow_assign_f(&nu_x);
    let mut out = sum * scale * inv_gamma;
    out.set_prec(bits);
    out
}

trait PowF {
    fn pow_assign_f(&mut self, e: &Float);
}

impl PowF for Float {
    fn pow_assign_f(&mut self, e: &Float) {
        use rug::ops::PowAssign;
        self.pow_assign(e);
    }
}

// J_ν(x) = sqrt(2/(πx)) (P cos ω − Q sin ω), ω = x − (ν/2 + 1/4)π.
fn hankel(nu: f64, x: &Float, bits: u32) -> Option<Float> {
    let work = bits + (x.to_f64().log2().max(0.0)).ceil() as u32 + 16;
    let mu = Float::with_val(work, Float::with_val(work, nu).square() * 4u32);
    let tiny = Float::with_val(work, Float::i_exp(1, -(work as i32)));
    let mut p = Float::with_val(work, 1);
    let mut q = Float::new(work);
    let mut t = Float::with_val(work, 1); // a_k(ν) / x^k, unsigned recurrence
    let mut prev_mag = Float::with_val(work, 1);
    let eight_x = Float::with_val(work, x * 8u32);
    let mut k = 1u32;
    loop {
        let odd = u64::from(2 * k - 1);
        let factor = Float::with_val(work, &mu - odd * odd);
        t *= factor;
        t /= Float::with_val(work, &eight_x * k);
        if t.is_zero() {
            break;
        }
        let mag = Float::with_val(work, t.abs_ref());
        if mag < tiny {
            break;
        }
        if f64::from(k) > 2.0 * nu.abs() + 2.0 && mag > prev_mag {
            return None;
        }
        // k mod 4: 1 → +Q, 2 → -P, 3 → -Q, 0 → +P
        match k % 4 {
            1 => q += &t,
            2 => p -= &t,
            3 => q -= &t,
            _ => p += &t,
        }
        prev_mag = mag;
        k += 1;
        if k > 10_000 {
            return None;
        }
    }
    let pi = Float::with_val(work, Constant::Pi);
    let phase_shift = (Float::with_val(work, nu) / 2u32 + 0.25f64) * &pi;
    let omega = Float::with_val(work, x - &phase_shift);
    let (s, c) = omega.sin_cos(Float::new(work));
    let amp = (Float::with_val(work, 2u32) / (pi * x)).sqrt();
    let mut out = amp * (p * c - q * s);
    out.set_prec(bits);
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionCtx {
        PrecisionCtx::new(50)
    }

    #[test]
    fn value_at_origin() {
        let c = ctx();
        assert_eq!(bessel_j(0.0, &c.real(0), &c).unwrap(), 1);
        assert_eq!(bessel_j(2.0, &c.real(0), &c).unwrap(), 0);
        assert!(bessel_j(-0.5, &c.real(0), &c).is_err());
        assert!(bessel_j(0.0, &c.real(-1), &c).is_err());
        assert!(bessel_j(-1.0, &c.real(1), &c).is_err());
    }

    #[test]
    fn half_order_closed_form() {
        // J_{1/2}(π/2) = 2/π
        let c = ctx();
        let x = c.pi() / 2u32;
        let j = bessel_j(0.5, &x, &c).unwrap();
        let want = Float::with_val(c.bits(), 2u32) / c.pi();
        assert!(Float::with_val(c.bits(), &j - &want).abs() < 1e-55);
    }

    #[test]
    fn j0_at_one_is_stable_under_doubled_precision() {
        let c = ctx();
        let fine = PrecisionCtx::new(100);
        let a = bessel_j(0.0, &c.real(1), &c).unwrap();
        let b = bessel_j(0.0, &fine.real(1), &fine).unwrap();
        assert!(Float::with_val(fine.bits(), &a - &b).abs() < 1e-55);
        let r = fine.parse("0.76519768655796655145").unwrap();
        assert!(Float::with_val(fine.bits(), &b - &r).abs() < 1e-19);
    }

    #[test]
    fn hankel_and_series_agree_across_the_switch() {
        // x = 70 takes the asymptotic branch at 50 digits; compare with the series.
        let c = ctx();
        let x = c.real(70);
        for nu in [0.0, 0.5, 1.0, 3.5] {
            let a = bessel_j(nu, &x, &c).unwrap();
            let ig = BesselJ::new(nu, c.bits()).unwrap().inv_gamma;
            let b = ascending(nu, &x, c.bits(), &ig);
            assert!(Float::with_val(c.bits(), &a - &b).abs() < 1e-50, "nu = {nu}");
        }
    }

    #[test]
    fn three_term_recurrence() {
        // J_{ν-1} + J_{ν+1} = (2ν/x) J_ν
        let c = ctx();
        for xv in [0.3, 2.5, 17.0, 45.0] {
            let x = c.real(xv);
            for nu in [1.0, 1.5, 2.0] {
                let lo = bessel_j(nu - 1.0, &x, &c).unwrap();
                let mid = bessel_j(nu, &x, &c).unwrap();
                let hi = bessel_j(nu + 1.0, &x, &c).unwrap();
                let lhs = Float::with_val(c.bits(), &lo + &hi);
                let rhs = mid * Float::with_val(c.bits(), 2.0 * nu) / &x;
                assert!(Float::with_val(c.bits(), &lhs - &rhs).abs() < 1e-50);
            }
        }
    }
}
