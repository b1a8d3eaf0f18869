use std::f64::consts::PI;

use rug::ops::Pow;
use rug::{Float, Integer};

use super::{accept, integrate_levy_type, tail_point, EvalResult, LevyIntegrand, Method};
use crate::error::{Error, Result};
use crate::numkernel::{gamma_bits, ln_gamma_f64, sin_pi_frac, AlphaParam, PrecisionCtx};

/// The closed-form value of ∫ z^{2m} (1/π) F_α(z) dz.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PredictedMoment {
    Finite(Integer),
    Zero,
    PlusInfinity,
    MinusInfinity,
}

/// Classifies the 2m-th moment: (-1)^{m+j}(2m)!/j! when α is even and
/// j = 2m/α is an integer, ±∞ when 2m exceeds a non-even α (sign of
/// sin(πα/2)), 0 otherwise.
pub fn predicted_moment(alpha: AlphaParam, m: u32) -> PredictedMoment {
    let n = 2 * m;
    if alpha.is_even_integer() {
        let a = alpha.p();
        if !n.is_multiple_of(a) {
            return PredictedMoment::Zero;
        }
        let j = n / a;
        let mut v = Integer::from(Integer::factorial(n)) / Integer::from(Integer::factorial(j));
        if (m + j) % 2 == 1 {
            v = -v;
        }
        return PredictedMoment::Finite(v);
    }
    if m == 0 {
        return PredictedMoment::Finite(Integer::from(1));
    }
    if f64::from(n) < alpha.to_f64() {
        return PredictedMoment::Zero;
    }
    // α mod 4 in (0, 2) gives sin(πα/2) > 0.
    let r = alpha.p() % (4 * alpha.q());
    if r < 2 * alpha.q() {
        PredictedMoment::PlusInfinity
    } else {
        PredictedMoment::MinusInfinity
    }
}

/// c_m in F_α(z) ~ Σ_{m≥1} c_m z^{-1-αm}: (-1)^{m+1} Γ(mα+1)/m! sin(mπα/2).
pub(crate) fn algebraic_coeff(alpha: AlphaParam, m: u32, bits: u32) -> Result<Float> {
    let s = sin_pi_frac(i64::from(m) * i64::from(alpha.p()), 2 * u64::from(alpha.q()), bits);
    if s.is_zero() {
        return Ok(s);
    }
    let arg = Float::with_val(bits, alpha.value(bits) * m) + 1u32;
    let g = gamma_bits(&arg, bits)?;
    let fact = Float::with_val(bits, Integer::from(Integer::factorial(m)));
    let mut c = g / fact * s;
    if m.is_multiple_of(2) {
        c = -c;
    }
    Ok(c)
}

/// ln of a bound on |F_α(z) - algebraic part| for α ≥ 2: the leading
/// exponential envelope with a safety factor.
pub(crate) fn log_exp_envelope(alpha: f64, z: f64) -> f64 {
    let am1 = alpha - 1.0;
    let rate = am1 * (PI / (2.0 * am1)).sin();
    let x = (z / alpha).powf(alpha / am1);
    let pref = (PI / (2.0 * am1)).sqrt() * 2.0 / (alpha * z.powf(alpha - 2.0)).powf(1.0 / (2.0 * am1));
    (10.0 * alpha).ln() + pref.ln() - rate * x
}

// ∫_0^Z z^n cos(zt) dz.
fn kernel(t: &Float, zc: &Float, n: u32, bits: u32) -> Float {
    let w = Float::with_val(bits, t * zc);
    let wf = w.to_f64();
    if wf < f64::from(n) + 20.0 {
        // Σ_j (-w²)^j / (2j)! / (n + 2j + 1), times Z^{n+1}
        let work = bits + (wf * std::f64::consts::LOG2_E).ceil() as u32 + 16;
        let neg_w2 = -Float::with_val(work, w.square_ref());
        let tiny = Float::with_val(work, Float::i_exp(1, -(work as i32)));
        let mut a = Float::with_val(work, 1);
        let mut sum = Float::with_val(work, 1u32) / (n + 1);
        let mut j = 0u32;
        loop {
            a *= &neg_w2;
            a /= (2 * j + 1) * (2 * j + 2);
            j += 1;
            let term = Float::with_val(work, &a / (n + 2 * j + 1));
            sum += &term;
            if f64::from(j) > wf && Float::with_val(work, term.abs_ref()) < Float::with_val(work, sum.abs_ref()) * &tiny {
                break;
            }
        }
        let mut out = sum * Float::with_val(work, zc.pow(n + 1));
        out.set_prec(bits);
        return out;
    }
    let (s, c) = w.sin_cos(Float::new(bits));
    let inv_t = Float::with_val(bits, t.recip_ref());
    let mut i = Float::with_val(bits, &s * &inv_t);
    let mut j = Float::with_val(bits, 1u32 - &c) * &inv_t;
    let mut zk = Float::with_val(bits, 1);
    for k in 1..=n {
        zk *= zc;
        let zi = Float::with_val(bits, &zk * &inv_t);
        let kt = Float::with_val(bits, &inv_t * k);
        let i_new = Float::with_val(bits, &zi * &s) - Float::with_val(bits, &kt * &j);
        let j_new = Float::with_val(bits, &kt * &i) - Float::with_val(bits, &zi * &c);
        i = i_new;
        j = j_new;
    }
    i
}

/// ∫_{-∞}^{∞} z^{2m} (1/π) F_α(z) dz for the absolutely convergent cases.
///
/// The finite part ∫_0^Z z^{2m} F dz is rewritten as ∫_0^∞ e^{-t^α} K_Z(t) dt
/// with K_Z(t) = ∫_0^Z z^{2m} cos(zt) dz; the remainder beyond Z comes from
/// the algebraic large-z series (optimally truncated) and is bounded by
/// the exponential envelope for α ≥ 2. Z grows until both are below
/// tolerance.
pub fn moment_quad(alpha: AlphaParam, m: u32, ctx: &PrecisionCtx) -> Result<EvalResult> {
    let n = 2 * m;
    let af = alpha.to_f64();
    let even = alpha.is_even_integer();
    if !even && m > 0 && f64::from(n) >= af {
        let sign = match predicted_moment(alpha, m) {
            PredictedMoment::MinusInfinity => -1,
            _ => 1,
        };
        return Err(Error::DivergentMoment { sign });
    }
    let bits = ctx.bits();
    // Absolute tolerance on ∫_0^∞ z^n F dz; the result is (2/π) times it.
    let tol = 0.1 * ctx.eps * PI / 2.0;
    let tail_tol = 0.1 * tol;
    let target = tail_tol.ln();

    let mut zc = 16.0f64;
    let (z_cut, alg_terms, alg_err, exp_err) = loop {
        if zc > 1e5 {
            return Err(Error::ToleranceNotMet { best: Float::new(bits), achieved: f64::INFINITY, target: ctx.eps });
        }
        let ln_z = zc.ln();
        let exp_log = if af >= 2.0 {
            log_exp_envelope(af, zc) + f64::from(n + 1) * ln_z
        } else {
            f64::NEG_INFINITY
        };
        let (alg_ok, m_star, alg_log) = if even {
            (true, 1, f64::NEG_INFINITY)
        } else {
            // |c_m| Z^{n-αm}/(αm - n) without the sine, in logs
            let bound = |k: u32| {
                let kf = f64::from(k);
                ln_gamma_f64(kf * af + 1.0) - ln_gamma_f64(kf + 1.0) + (f64::from(n) - af * kf) * ln_z
                    - (af * kf - f64::from(n)).ln()
            };
            let mut k = 1u32;
            let mut prev = bound(1);
            loop {
                if prev < target - 3.0 || k >= 5000 {
                    break;
                }
                let next = bound(k + 1);
                if next >= prev {
                    break;
                }
                prev = next;
                k += 1;
            }
            (prev < target, k, prev)
        };
        if alg_ok && exp_log < target {
            break (zc, m_star, alg_log.exp(), exp_log.exp());
        }
        zc *= 1.25;
    };

    // Terms with Z^{n+1} magnitude cancel down to O(1).
    let boost = (f64::from(n + 1) * z_cut.log2()).ceil() as u32 + 8;
    let work = bits + boost;
    let zw = Float::with_val(work, z_cut);

    let mut tail_sum = Float::new(work);
    if !even {
        for k in 1..alg_terms {
            let c = algebraic_coeff(alpha, k, work)?;
            if c.is_zero() {
                continue;
            }
            let ex = Float::with_val(work, alpha.value(work) * k) - n;
            let zp = Float::with_val(work, (&zw).pow(&Float::with_val(work, -&ex)));
            tail_sum += c * zp / ex;
        }
    }

    let log_amp = f64::from(n + 1) * z_cut.ln() - f64::from(n + 1).ln();
    let (t_max, t_tail) = tail_point(af, 0.0, log_amp, 0.01 * tol);
    let p = alpha.p();
    let g = |u: &Float, t: &Float| {
        let e = (-Float::with_val(work, u.pow(p))).exp();
        e * kernel(t, &zw, n, work)
    };
    let integrand = LevyIntegrand {
        alpha,
        freq: zw.clone(),
        shift: 1.0,
        t_max,
        tol: 0.5 * tol,
        eps: ctx.eps,
        bits: work,
        budget: ctx.max_terms,
        accelerate: af < 1.0,
    };
    let quad = integrate_levy_type(&integrand, g);
    let two_over_pi = Float::with_val(work, 2u32) / Float::with_val(work, rug::float::Constant::Pi);
    let mut value = (quad.value + tail_sum) * two_over_pi;
    value.set_prec(bits);
    let err = 2.0 / PI * (quad.err + t_tail + alg_err + exp_err);
    accept(value, err, ctx, Method::Quad, quad.panels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(p: u32, q: u32) -> AlphaParam {
        AlphaParam::new(p, q).unwrap()
    }

    #[test]
    fn predictions() {
        assert_eq!(predicted_moment(a(4, 1), 2), PredictedMoment::Finite(Integer::from(-24)));
        assert_eq!(predicted_moment(a(4, 1), 1), PredictedMoment::Zero);
        assert_eq!(predicted_moment(a(6, 1), 3), PredictedMoment::Finite(Integer::from(720)));
        assert_eq!(predicted_moment(a(2, 1), 1), PredictedMoment::Finite(Integer::from(2)));
        assert_eq!(predicted_moment(a(3, 1), 2), PredictedMoment::MinusInfinity);
        assert_eq!(predicted_moment(a(3, 2), 1), PredictedMoment::PlusInfinity);
        assert_eq!(predicted_moment(a(3, 1), 1), PredictedMoment::Zero);
        assert_eq!(predicted_moment(a(1, 2), 0), PredictedMoment::Finite(Integer::from(1)));
    }

    #[test]
    fn recurrence_matches_the_series() {
        // w = tZ = n + 25 takes the recurrence branch.
        let bits = 256;
        let zc = Float::with_val(bits, 16);
        for n in [0u32, 4] {
            let t = Float::with_val(bits, (f64::from(n) + 25.0) / 16.0);
            let rec = kernel(&t, &zc, n, bits);
            let series = kernel_series_only(&t, &zc, n, bits);
            assert!(Float::with_val(bits, &rec - &series).abs() < 1e-50);
        }
    }

    fn kernel_series_only(t: &Float, zc: &Float, n: u32, bits: u32) -> Float {
        let w = Float::with_val(bits, t * zc).to_f64();
        let work = bits + (w * 1.5) as u32 + 32;
        let neg_w2 = -Float::with_val(work, Float::with_val(work, t * zc).square());
        let mut a = Float::with_val(work, 1);
        let mut sum = Float::with_val(work, 1u32) / (n + 1);
        for j in 0..400u32 {
            a *= &neg_w2;
            a /= (2 * j + 1) * (2 * j + 2);
            sum += Float::with_val(work, &a / (n + 2 * j + 3));
        }
        let mut out = sum * Float::with_val(work, zc.pow(n + 1));
        out.set_prec(bits);
        out
    }

    #[test]
    fn normalisation_and_even_moments() {
        let c = PrecisionCtx::new(30);
        let r = moment_quad(a(4, 1), 0, &c).unwrap();
        assert!(Float::with_val(c.bits(), &r.value - 1u32).abs() < 1e-25);
        let r = moment_quad(a(4, 1), 2, &c).unwrap();
        assert!(Float::with_val(c.bits(), &r.value + 24u32).abs() < 1e-20);
        let r = moment_quad(a(4, 1), 1, &c).unwrap();
        assert!(r.value.to_f64().abs() < 1e-20);
        let r = moment_quad(a(3, 2), 0, &c).unwrap();
        assert!(Float::with_val(c.bits(), &r.value - 1u32).abs() < 1e-24);
    }

    #[test]
    fn divergent_rows() {
        let c = PrecisionCtx::new(20);
        assert!(matches!(moment_quad(a(3, 1), 2, &c), Err(Error::DivergentMoment { sign: -1 })));
        assert!(matches!(moment_quad(a(3, 2), 1, &c), Err(Error::DivergentMoment { sign: 1 })));
    }
}
