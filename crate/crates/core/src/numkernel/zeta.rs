use rug::Float;

use super::bernoulli::bernoulli_b2k;
use crate::error::{Error, Result};

/// Hurwitz zeta ζ(s, a) = Σ_{n≥0} (n + a)^{-s} for s > 1, a > 0.
///
/// Euler–Maclaurin: direct sum to a shift N, then the integral, the
/// half-term and Bernoulli corrections at N + a.
pub fn hurwitz_zeta(s: &Float, a: &Float, bits: u32) -> Result<Float> {
    if *s <= 1 {
        return Err(Error::Domain(format!("hurwitz_zeta needs s > 1, got {}", s.to_f64())));
    }
    if *a <= 0 {
        return Err(Error::Domain(format!("hurwitz_zeta needs a > 0, got {}", a.to_f64())));
    }
    let work = bits + 32;
    let s = Float::with_val(work, s);
    let a = Float::with_val(work, a);
    let digits = f64::from(work) / std::f64::consts::LOG2_10;
    let n_shift = (digits * 0.6 + s.to_f64().abs() * 0.5).ceil().max(10.0) as u32;

    let neg_s = Float::with_val(work, -&s);
    let mut sum = Float::new(work);
    for n in 0..n_shift {
        let mut t = Float::with_val(work, &a + n);
        t.pow_assign_ref(&neg_s);
        sum += t;
    }
    let x = Float::with_val(work, &a + n_shift);
    let mut x_neg_s = x.clone();
    x_neg_s.pow_assign_ref(&neg_s);
    // ∫_x^∞ t^{-s} dt = x^{1-s} / (s-1)
    sum += Float::with_val(work, &x_neg_s * &x) / Float::with_val(work, &s - 1u32);
    sum += Float::with_val(work, &x_neg_s / 2u32);

    // Σ B_{2k}/(2k)! · s(s+1)…(s+2k-2) · x^{-s-2k+1}
    let tiny = Float::with_val(work, Float::i_exp(1, -(work as i32)));
    let inv_x2 = Float::with_val(work, x.square_ref()).recip();
    let mut rising = s.clone(); // s (s+1) … (s+2k-2) / (2k)!
    rising /= 2u32;
    let mut xp = Float::with_val(work, &x_neg_s / &x);
    let mut prev = Float::with_val(work, f64::INFINITY);
    for k in 1usize..2000 {
        let term = Float::with_val(work, &bernoulli_b2k(k)) * &rising * &xp;
        let mag = Float::with_val(work, term.abs_ref());
        if mag >= prev {
            break;
        }
        sum += &term;
        if mag < Float::with_val(work, sum.abs_ref()) * &tiny {
            break;
        }
        prev = mag;
        let k2 = 2 * k as u64;
        rising *= Float::with_val(work, &s + (k2 - 1)) * Float::with_val(work, &s + k2);
        rising /= (k2 + 1) * (k2 + 2);
        xp *= &inv_x2;
    }
    sum.set_prec(bits);
    Ok(sum)
}

trait PowRef {
    fn pow_assign_ref(&mut self, e: &Float);
}

impl PowRef for Float {
    fn pow_assign_ref(&mut self, e: &Float) {
        use rug::ops::PowAssign;
        self.pow_assign(e);
    }
}
