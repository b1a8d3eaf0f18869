use rug::Float;

use crate::error::{Error, Result};
use crate::numkernel::{PrecisionCtx, XComplex, XReal};
use crate::quadrature::{ComplexResult, Method};

/// Parameters of a generalised hypergeometric series
/// Σ Π(top)_m / Π(bottom)_m · arg^m / m!.
#[derive(Debug, Clone)]
pub struct PfqSpec {
    pub top: Vec<XReal>,
    pub bottom: Vec<XReal>,
    pub arg: XComplex,
}

impl PfqSpec {
    /// Checks that no bottom parameter is a nonpositive integer and that the
    /// series converges: entire when |top| ≤ |bottom|, and the |top| =
    /// |bottom| + 1 case only inside the unit disc.
    pub fn new(top: Vec<XReal>, bottom: Vec<XReal>, arg: XComplex) -> Result<Self> {
        if let Some(b) = bottom.iter().find(|b| b.is_integer() && **b <= 0) {
            return Err(Error::InvalidParameter(format!(
                "bottom parameter {} is a nonpositive integer",
                b.to_f64()
            )));
        }
        let polynomial = top.iter().any(|t| t.is_integer() && *t <= 0);
        if top.len() > bottom.len() && !polynomial {
            let inside = top.len() == bottom.len() + 1 && arg.abs() < 1;
            if !inside {
                return Err(Error::Divergence(format!(
                    "{}F{} series diverges at |arg| = {}",
                    top.len(),
                    bottom.len(),
                    arg.abs().to_f64()
                )));
            }
        }
        Ok(Self { top, bottom, arg })
    }
}

/// Partial sum of a series together with its size bookkeeping.
pub(crate) struct Series {
    pub value: XComplex,
    /// Estimated magnitude of the omitted tail.
    pub tail: f64,
    /// log2 of the largest term magnitude.
    pub max_log2: f64,
    pub terms: usize,
}

fn log2_abs(x: &XComplex) -> f64 {
    let a = x.abs();
    if a.is_zero() {
        f64::NEG_INFINITY
    } else {
        let (m, e) = a.to_f64_exp();
        m.abs().log2() + f64::from(e)
    }
}

/// log2 of the largest term, from a double-precision scan of the term
/// ratios. Used to size the working precision before summing.
pub(crate) fn max_term_log2(top: &[f64], bottom: &[f64], arg_abs: f64, cap: usize) -> f64 {
    if arg_abs == 0.0 {
        return 0.0;
    }
    let ln_arg = arg_abs.ln();
    let big = top.iter().chain(bottom).fold(0.0f64, |a, v| a.max(v.abs()));
    let mut ln_t = 0.0f64;
    let mut best = 0.0f64;
    for m in 0..cap {
        let mf = m as f64;
        let mut r = ln_arg - (mf + 1.0).ln();
        for t in top {
            let v = (t + mf).abs();
            if v == 0.0 {
                return best / std::f64::consts::LN_2;
            }
            r += v.ln();
        }
        for b in bottom {
            r -= (b + mf).abs().ln();
        }
        ln_t += r;
        best = best.max(ln_t);
        if r < 0.0 && mf > big && ln_t < best - 60.0 {
            break;
        }
    }
    best / std::f64::consts::LN_2
}

/// Π(top + m) / Π(bottom + m) / (m + 1): term m+1 over term m, less arg.
fn step_ratio(top: &[Float], bottom: &[Float], m: u32, bits: u32) -> Float {
    let mut ratio = Float::with_val(bits, 1);
    for t in top {
        ratio *= Float::with_val(bits, t + m);
    }
    for b in bottom {
        ratio /= Float::with_val(bits, b + m);
    }
    ratio / (m + 1)
}

/// Direct summation with the term-ratio recurrence at `bits` precision.
/// Stops once |term| < rel·|partial| three times running after the terms
/// start to shrink, or on an exactly zero term.
pub(crate) fn sum_series(
    top: &[Float],
    bottom: &[Float],
    arg: &XComplex,
    rel: f64,
    bits: u32,
    max_terms: usize,
) -> Result<Series> {
    let mut term = XComplex::one(bits);
    let mut sum = XComplex::one(bits);
    let mut prev_log = 0.0f64;
    let mut max_log2 = 0.0f64;
    let mut shrinking = false;
    let mut quiet = 0;
    for m in 0..max_terms {
        term = (&term * arg).scale(&step_ratio(top, bottom, m as u32, bits));
        if term.is_zero() {
            return Ok(Series { value: sum, tail: 0.0, max_log2, terms: m + 1 });
        }
        sum += &term;
        let lt = log2_abs(&term);
        max_log2 = max_log2.max(lt);
        if lt < prev_log {
            shrinking = true;
        }
        let ls = log2_abs(&sum);
        if shrinking && lt < ls + rel.log2() {
            quiet += 1;
            if quiet == 3 {
                // geometric bound on the rest from the last ratio
                let q = (lt - prev_log).exp2();
                let tail = if q < 0.9 { lt.exp2() * q / (1.0 - q) } else { 10.0 * lt.exp2() };
                return Ok(Series { value: sum, tail, max_log2, terms: m + 2 });
            }
        } else {
            quiet = 0;
        }
        prev_log = lt;
    }
    Err(Error::MaxTermsExceeded { terms: max_terms })
}

/// Sums the series to the context tolerance.
pub fn pfq(series: &PfqSpec, ctx: &PrecisionCtx) -> Result<ComplexResult> {
    let bits = ctx.bits();
    let f64s = |v: &[XReal]| v.iter().map(|x| x.to_f64()).collect::<Vec<_>>();
    let peak = max_term_log2(&f64s(&series.top), &f64s(&series.bottom), series.arg.abs().to_f64(), ctx.max_terms);
    let mut guard = 24.0f64;
    loop {
        let work = bits + (peak.max(0.0) + guard).ceil() as u32;
        let lift = |v: &XReal| Float::with_val(work, v);
        let top: Vec<_> = series.top.iter().map(lift).collect();
        let bottom: Vec<_> = series.bottom.iter().map(lift).collect();
        let arg = XComplex::new(lift(&series.arg.re), lift(&series.arg.im));
        let s = sum_series(&top, &bottom, &arg, 0.01 * ctx.eps, work, ctx.max_terms)?;
        let lost = s.max_log2 - log2_abs(&s.value);
        if lost > peak.max(0.0) + guard - 8.0 && guard < 4.0 * f64::from(bits) {
            guard = lost + 24.0;
            continue;
        }
        let rounding = (s.max_log2 - f64::from(work)).exp2() * s.terms as f64;
        let value = XComplex::new(Float::with_val(bits, &s.value.re), Float::with_val(bits, &s.value.im));
        return Ok(ComplexResult { value, err: s.tail + rounding, method: Method::Hyper, terms: s.terms });
    }
}
