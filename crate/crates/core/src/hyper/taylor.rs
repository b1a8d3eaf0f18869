use rug::ops::Pow;
use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::numkernel::{gamma_bits, log10_abs, ln_gamma_f64, AlphaParam, PrecisionCtx, XReal};
use crate::quadrature::{accept, EvalResult, Method};

/// Digits the alternating series may lose before it is rejected.
const SPARE_DIGITS: u32 = 10;

/// log10 of the largest Taylor term |Γ((2m+1)/α) z^{2m} / (2m)! / α|.
fn peak_log10(alpha: f64, z: f64) -> f64 {
    if z == 0.0 {
        return (ln_gamma_f64(1.0 / alpha) - alpha.ln()) / std::f64::consts::LN_10;
    }
    let lz = z.abs().ln();
    let mut best = f64::NEG_INFINITY;
    for m in 0.. {
        let mf = m as f64;
        let l = ln_gamma_f64((2.0 * mf + 1.0) / alpha) + 2.0 * mf * lz - ln_gamma_f64(2.0 * mf + 1.0) - alpha.ln();
        best = best.max(l);
        if m > 4 && l < best - 50.0 {
            break;
        }
    }
    best / std::f64::consts::LN_10
}

/// F_α(z) from its Maclaurin series
/// (1/α) Σ (-1)^m Γ((2m+1)/α) z^{2m} / (2m)!, for α > 1.
///
/// The terms are generated along the p residue classes of m mod p, where a
/// step of p multiplies the gamma factor by a rising factorial of length
/// 2q. The working precision covers the largest term; the call fails with
/// `Cancellation` when that term exceeds the result by more than
/// 10^(digits-10).
pub fn taylor_levy(alpha: AlphaParam, z: &XReal, ctx: &PrecisionCtx) -> Result<EvalResult> {
    let (p, q) = (alpha.p(), alpha.q());
    if p <= q {
        return Err(Error::Divergence(format!("Taylor series needs alpha > 1, got {alpha}")));
    }
    let allowed = f64::from(ctx.digits.saturating_sub(SPARE_DIGITS));
    let peak = peak_log10(alpha.to_f64(), z.to_f64());
    // |F| ≤ Γ(1 + 1/α) < 1, so a peak this large is already fatal
    if peak > allowed {
        let upper = ln_gamma_f64(1.0 + 1.0 / alpha.to_f64()) / std::f64::consts::LN_10;
        return Err(Error::Cancellation { max_term_log10: peak, value_log10: upper, allowed_log10: allowed });
    }
    let bits = ctx.bits();
    let mut guard = 32.0f64;
    loop {
        let work = bits + (peak.max(0.0) * std::f64::consts::LOG2_10 + guard).ceil() as u32;
        let (sum, omitted, terms) = sum_taylor(p, q, z, ctx, work)?;
        let value_log10 = log10_abs(&sum);
        let lost = peak - value_log10;
        if lost > allowed {
            return Err(Error::Cancellation { max_term_log10: peak, value_log10, allowed_log10: allowed });
        }
        let lost_bits = lost * std::f64::consts::LOG2_10;
        if lost_bits > peak.max(0.0) * std::f64::consts::LOG2_10 + guard - 8.0 {
            guard = lost_bits + 32.0;
            continue;
        }
        let rounding = 10f64.powf(peak) * (terms as f64) * (-f64::from(work)).exp2();
        let value = Float::with_val(bits, &sum);
        return accept(value, omitted + rounding, ctx, Method::Taylor, terms);
    }
}

// Returns the partial sum, the first omitted term and the term count.
fn sum_taylor(p: u32, q: u32, z: &XReal, ctx: &PrecisionCtx, work: u32) -> Result<(Float, f64, usize)> {
    let z = Float::with_val(work, z);
    let z2 = Float::with_val(work, z.square_ref());
    let z2p = Float::with_val(work, (&z2).pow(p));
    let alpha = Rational::from((p, q));
    let alpha = Float::with_val(work, &alpha);
    // last term in each residue class
    let mut last: Vec<Float> = Vec::with_capacity(p as usize);
    let mut sum = Float::new(work);
    let mut peak_seen = f64::NEG_INFINITY;
    for m in 0..ctx.max_terms as u32 {
        let term = if m < p {
            // (-1)^m Γ((2m+1)/α) z^{2m} / (2m)! / α
            let x = Rational::from(((2 * m + 1) * q, p));
            let g = gamma_bits(&Float::with_val(work, &x), work)?;
            let fact = Float::with_val(work, rug::Integer::from(rug::Integer::factorial(2 * m)));
            let mut t = g * Float::with_val(work, (&z2).pow(m)) / fact * alpha.clone().recip();
            if m % 2 == 1 {
                t = -t;
            }
            last.push(t.clone());
            t
        } else {
            // step from m - p: Γ(x + 2q) = Γ(x)(x)_{2q}, x = (2(m-p)+1)q/p
            let r = (m % p) as usize;
            let k = m - p;
            let x = Rational::from(((2 * k + 1) * q, p));
            let mut factor = Rational::from(1);
            for j in 0..2 * q {
                factor *= Rational::from(&x + j);
            }
            for j in 1..=2 * p {
                factor /= 2 * k + j;
            }
            if p % 2 == 1 {
                factor = -factor;
            }
            let t = Float::with_val(work, &last[r] * &z2p) * Float::with_val(work, &factor);
            last[r] = t.clone();
            t
        };
        let size = term.to_f64().abs();
        sum += &term;
        peak_seen = peak_seen.max(size);
        let target = 0.01 * ctx.eps * sum.to_f64().abs().max(1.0);
        if size < peak_seen && size < target {
            return Ok((sum, size, m as usize + 1));
        }
        if z.is_zero() {
            return Ok((sum, 0.0, 1));
        }
    }
    Err(Error::MaxTermsExceeded { terms: ctx.max_terms })
}
