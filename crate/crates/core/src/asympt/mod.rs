//! Complete large-z expansion of F_α for integer α ≥ 3: an algebraic
//! series, oscillating exponentially small series, and for α ≡ 2 (mod 4)
//! a purely decaying series.

mod nk;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer};

use crate::error::{Error, Result};
use crate::numkernel::{ln_gamma_f64, AlphaParam, PrecisionCtx, XReal};
use crate::quadrature::{EvalResult, Method};

pub use nk::{nk_table, NkTable, MAX_ORDER};

/// One oscillating exponential series.
#[derive(Debug, Clone)]
pub struct OscComponent {
    pub k: u32,
    /// Coefficient of (z/α)^{α/(α-1)} in the decaying exponent.
    pub decay_rate: f64,
    /// Coefficient of (z/α)^{α/(α-1)} in the cosine phase.
    pub phase_rate: f64,
    pub partial: XReal,
}

/// The expansion split into its parts.
#[derive(Debug, Clone)]
pub struct AsymBreakdown {
    /// Algebraic terms m = 1, 2, … that were kept.
    pub algebraic: Vec<XReal>,
    pub oscillatory: Vec<OscComponent>,
    /// Present exactly when α ≡ 2 (mod 4).
    pub puredecay: Option<XReal>,
    /// Number of exponential-series terms kept (orders 0..m_star).
    pub m_star: usize,
    pub err_estimate: f64,
}

impl AsymBreakdown {
    pub fn total(&self) -> XReal {
        let prec = self.oscillatory.first().map_or(64, |o| o.partial.prec());
        let mut s = Float::new(prec);
        for t in &self.algebraic {
            s += t;
        }
        for o in &self.oscillatory {
            s += &o.partial;
        }
        if let Some(p) = &self.puredecay {
            s += p;
        }
        s
    }
}

/// How many terms of each series to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    /// Stop just before the smallest term among the first 51.
    Optimal,
    /// Keep exactly this many terms.
    Fixed(usize),
}

/// Knobs for [`levy_asym_with`].
#[derive(Debug, Clone, Copy)]
pub struct AsymOptions {
    /// Smallest accepted z; 2α when unset.
    pub z_min: Option<f64>,
    pub algebraic: Truncation,
    pub exponential: Truncation,
    /// Include the exponentially small series at all.
    pub with_exponential: bool,
    pub with_puredecay: bool,
}

impl Default for AsymOptions {
    fn default() -> Self {
        Self {
            z_min: None,
            algebraic: Truncation::Optimal,
            exponential: Truncation::Optimal,
            with_exponential: true,
            with_puredecay: true,
        }
    }
}

/// Default lower limit of the asymptotic regime.
pub fn z_min_default(alpha: u32) -> f64 {
    2.0 * f64::from(alpha)
}

fn integer_alpha(alpha: AlphaParam) -> Result<u32> {
    match alpha.as_integer() {
        Some(a) if a >= 3 => Ok(a),
        _ => Err(Error::InvalidParameter(format!("asymptotic expansion needs integer alpha >= 3, got {alpha}"))),
    }
}

fn positive(z: &XReal) -> Result<()> {
    if *z > 0 && z.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("asymptotic expansion needs z > 0, got {}", z.to_f64())))
    }
}

/// sin(nπ/2) for an integer n, exactly.
fn sin_half_pi(n: u64) -> i32 {
    match n % 4 {
        1 => 1,
        3 => -1,
        _ => 0,
    }
}

/// (α/z)(-1)^{m+1} z^{-αm} Γ(mα)/Γ(m) sin(mπα/2) for m = 1..=count. For
/// even α the sine, and so every term, is an exact zero.
pub fn algebraic_series(alpha: u32, z: &XReal, count: usize) -> Result<Vec<XReal>> {
    positive(z)?;
    let bits = z.prec();
    let mut out = Vec::with_capacity(count);
    for m in 1..=count as u32 {
        let s = sin_half_pi(u64::from(m) * u64::from(alpha));
        if s == 0 {
            out.push(Float::new(bits));
            continue;
        }
        // Γ(mα)/Γ(m) = (mα-1)!/(m-1)!
        let ratio = Integer::from(Integer::factorial(m * alpha - 1)) / Integer::from(Integer::factorial(m - 1));
        let zp = Float::with_val(bits, z.pow(alpha * m + 1));
        let mut t = Float::with_val(bits, ratio) * alpha / zp;
        if (m % 2 == 0) != (s < 0) {
            t = -t;
        }
        out.push(t);
    }
    Ok(out)
}

/// Shared quantities of the exponential series at z.
struct ExpFrame {
    /// (z/α)^{α/(α-1)}
    x: Float,
    /// √(π/(2(α-1))) · 2 / (α z^{α-2})^{1/(2(α-1))}
    pref: Float,
    rates: Vec<(f64, f64, Float, Float)>,
}

fn frame(alpha: u32, z: &XReal, bits: u32) -> ExpFrame {
    let a = f64::from(alpha);
    let a1 = alpha - 1;
    let pi = Float::with_val(bits, Constant::Pi);
    let zf = Float::with_val(bits, z);
    let x = Float::with_val(bits, &zf / alpha).pow(Float::with_val(bits, a) / a1);
    let mut pref = Float::with_val(bits, &pi / (2 * a1)).sqrt() * 2u32;
    let inner = Float::with_val(bits, (&zf).pow(alpha - 2)) * alpha;
    pref /= inner.pow(Float::with_val(bits, 1u32) / (2 * a1));
    let rates = (0..oscillatory_count(alpha))
        .map(|k| {
            let angle = Float::with_val(bits, &pi * (4 * k + 1)) / (2 * a1);
            let (s, c) = angle.sin_cos(Float::new(bits));
            let dec = s * a1;
            let ph = c * a1;
            (dec.to_f64(), ph.to_f64(), dec, ph)
        })
        .collect();
    ExpFrame { x, pref, rates }
}

/// Number of oscillating exponential series, [α/2] - [α/4].
pub fn oscillatory_count(alpha: u32) -> u32 {
    alpha / 2 - alpha / 4
}

/// Whether the purely decaying series is present: α - 4[α/4] = 2.
pub fn has_puredecay(alpha: u32) -> bool {
    alpha % 4 == 2
}

/// The exponential series with orders m = 0..terms of each m-sum. The
/// algebraic part of the result is left empty and `err_estimate` at zero.
pub fn exp_series(alpha: u32, z: &XReal, table: &NkTable, terms: usize, ctx: &PrecisionCtx) -> Result<AsymBreakdown> {
    positive(z)?;
    if table.alpha != alpha {
        return Err(Error::InvalidParameter(format!("N_k table is for alpha = {}, not {alpha}", table.alpha)));
    }
    if terms > table.order() + 1 {
        return Err(Error::InvalidParameter(format!("{terms} terms requested from a table of order {}", table.order())));
    }
    let bits = ctx.bits();
    let fr = frame(alpha, z, bits);
    let a1 = alpha - 1;
    let pi = Float::with_val(bits, Constant::Pi);
    // 2^m N_m X^{-m}
    let mut weights = Vec::with_capacity(terms);
    let mut scale = Float::with_val(bits, 1);
    let step = Float::with_val(bits, 2u32) / &fr.x;
    for m in 0..terms {
        weights.push(Float::with_val(bits, &scale * &table.coeffs[m]));
        scale *= &step;
    }
    let mut oscillatory = Vec::new();
    for (k, (dec_f, ph_f, dec, ph)) in fr.rates.iter().enumerate() {
        let k = k as u32;
        let base = Float::with_val(bits, ph * &fr.x);
        // (4k+2-α)π / (4(α-1)), then -(4k+α)π/(2(α-1)) per order
        let offset = Float::with_val(bits, &pi * (i64::from(4 * k + 2) - i64::from(alpha))) / (4 * a1);
        let per_m = Float::with_val(bits, &pi * (4 * k + alpha)) / (2 * a1);
        let mut sum = Float::new(bits);
        for (m, w) in weights.iter().enumerate() {
            let phase = Float::with_val(bits, &base + &offset) - Float::with_val(bits, &per_m * m as u32);
            sum += Float::with_val(bits, w * phase.cos());
        }
        let damp = (-Float::with_val(bits, dec * &fr.x)).exp();
        let partial = sum * damp * &fr.pref;
        oscillatory.push(OscComponent { k, decay_rate: *dec_f, phase_rate: *ph_f, partial });
    }
    let puredecay = has_puredecay(alpha).then(|| {
        let mut sum = Float::new(bits);
        for (m, w) in weights.iter().enumerate() {
            if m % 2 == 0 {
                sum += w;
            } else {
                sum -= w;
            }
        }
        let damp = (-Float::with_val(bits, &fr.x * a1)).exp();
        -(sum * damp * &fr.pref) / 2u32
    });
    Ok(AsymBreakdown { algebraic: Vec::new(), oscillatory, puredecay, m_star: terms, err_estimate: 0.0 })
}

/// pref · e^{-decay_rate(0)·(z/α)^{α/(α-1)}}: the size of the leading
/// exponential series, used to normalise errors where F oscillates.
pub fn envelope(alpha: u32, z: &XReal, ctx: &PrecisionCtx) -> Result<f64> {
    positive(z)?;
    if alpha < 3 {
        return Err(Error::InvalidParameter(format!("envelope needs integer alpha >= 3, got {alpha}")));
    }
    let fr = frame(alpha, z, ctx.bits());
    let damp = (-Float::with_val(ctx.bits(), &fr.rates[0].2 * &fr.x)).exp();
    Ok((damp * &fr.pref).to_f64())
}

type TableCache = HashMap<(u32, u32), Arc<NkTable>>;

static TABLES: Mutex<Option<TableCache>> = Mutex::new(None);

fn full_table(alpha: u32, ctx: &PrecisionCtx) -> Result<Arc<NkTable>> {
    let key = (alpha, ctx.bits());
    if let Some(t) = TABLES.lock().unwrap_or_else(|e| e.into_inner()).get_or_insert_with(HashMap::new).get(&key) {
        return Ok(t.clone());
    }
    let t = Arc::new(nk_table(alpha, MAX_ORDER, ctx)?);
    TABLES.lock().unwrap_or_else(|e| e.into_inner()).get_or_insert_with(HashMap::new).insert(key, t.clone());
    Ok(t)
}

// Index of the smallest magnitude; the series is cut just before it.
fn smallest(mags: &[f64]) -> usize {
    let mut best = 0;
    for (i, m) in mags.iter().enumerate() {
        if *m < mags[best] {
            best = i;
        }
    }
    best
}

fn outside(z: f64, z_min: f64, reason: &str) -> Error {
    Error::OutsideAsymptoticRegime { z, z_min, reason: reason.to_string() }
}

/// The expansion at z with its parts, under `opts`.
pub fn asym_breakdown(alpha: AlphaParam, z: &XReal, ctx: &PrecisionCtx, opts: &AsymOptions) -> Result<AsymBreakdown> {
    let a = integer_alpha(alpha)?;
    positive(z)?;
    let zf = z.to_f64();
    let z_min = opts.z_min.unwrap_or_else(|| z_min_default(a));
    if zf < z_min {
        return Err(outside(zf, z_min, "below the asymptotic gate"));
    }
    let bits = ctx.bits();
    let z = Float::with_val(bits, z);

    let mut err = 0.0;
    let algebraic = if a % 2 == 0 {
        Vec::new()
    } else {
        let all = algebraic_series(a, &z, MAX_ORDER + 1)?;
        // sizes without the sine: a vanishing term is not a smallest term
        let mags: Vec<f64> = (1..=all.len() as u32)
            .map(|m| {
                let (mf, af) = (f64::from(m), f64::from(a));
                (af.ln() + ln_gamma_f64(mf * af) - ln_gamma_f64(mf) - (mf * af + 1.0) * zf.ln()).exp()
            })
            .collect();
        let keep = match opts.algebraic {
            Truncation::Optimal => {
                let i = smallest(&mags);
                if i == 0 {
                    return Err(outside(zf, z_min, "algebraic terms grow from the start"));
                }
                i
            }
            Truncation::Fixed(n) => n.min(all.len()),
        };
        err += mags.get(keep).copied().unwrap_or(0.0);
        all[..keep].to_vec()
    };

    let table = full_table(a, ctx)?;
    let fr = frame(a, &z, bits);
    let inv_x = 2.0 / fr.x.to_f64();
    let mags: Vec<f64> =
        table.coeffs.iter().enumerate().map(|(m, n)| n.to_f64().abs() * inv_x.powi(m as i32)).collect();
    let m_star = match opts.exponential {
        Truncation::Optimal => {
            let i = smallest(&mags);
            if i == 0 {
                return Err(outside(zf, z_min, "exponential-series terms grow from the start"));
            }
            i
        }
        Truncation::Fixed(n) => n.min(MAX_ORDER + 1),
    };
    let mut out = if opts.with_exponential {
        exp_series(a, &z, &table, m_star, ctx)?
    } else {
        AsymBreakdown { algebraic: Vec::new(), oscillatory: Vec::new(), puredecay: None, m_star: 0, err_estimate: 0.0 }
    };
    if !opts.with_puredecay {
        out.puredecay = None;
    }
    // envelope of every exponential series, for the omitted-term bound
    let xf = fr.x.to_f64();
    let mut env: f64 = fr.rates.iter().map(|r| (-r.0 * xf).exp()).sum();
    if has_puredecay(a) {
        env += 0.5 * (-f64::from(a - 1) * xf).exp();
    }
    env *= fr.pref.to_f64();
    if opts.with_exponential {
        // the remainder after optimal truncation runs to a few dozen times
        // the first omitted term; 2(m*+1) covers the observed range
        let first = mags.get(m_star).copied().unwrap_or(0.0);
        err += 2.0 * (m_star as f64 + 1.0) * first * env;
    } else {
        err += env;
    }
    out.algebraic = algebraic;
    out.m_star = if opts.with_exponential { m_star } else { 0 };
    out.err_estimate = err;
    Ok(out)
}

/// F_α(z) from the complete expansion, each series optimally truncated.
/// The error estimate is the first omitted algebraic term plus a multiple
/// of the first omitted exponential term at its envelope; it is not
/// reduced by raising the precision.
pub fn levy_asym(alpha: AlphaParam, z: &XReal, ctx: &PrecisionCtx) -> Result<EvalResult> {
    levy_asym_with(alpha, z, ctx, &AsymOptions::default())
}

pub fn levy_asym_with(alpha: AlphaParam, z: &XReal, ctx: &PrecisionCtx, opts: &AsymOptions) -> Result<EvalResult> {
    let b = asym_breakdown(alpha, z, ctx, opts)?;
    let terms = b.algebraic.len() + b.m_star;
    Ok(EvalResult { value: b.total(), err: b.err_estimate, method: Method::Asym, terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::levy_quad;

    fn ctx() -> PrecisionCtx {
        PrecisionCtx::new(30)
    }

    fn int(a: u32) -> AlphaParam {
        AlphaParam::integer(a).unwrap()
    }

    #[test]
    fn algebraic_examples() {
        let c = ctx();
        let t = algebraic_series(3, &c.real(2), 1).unwrap();
        assert_eq!(t[0], -0.375);
        let t = algebraic_series(5, &c.real(3), 1).unwrap();
        let want = Float::with_val(c.bits(), 40u32) / 243u32;
        assert!(Float::with_val(c.bits(), &t[0] - &want).abs() < 1e-28);
        for a in [4, 6, 8] {
            assert!(algebraic_series(a, &c.real(5), 10).unwrap().iter().all(|t| t.is_zero()));
        }
    }

    #[test]
    fn structure_of_the_exponential_series() {
        let c = ctx();
        for a in 3..=12u32 {
            let table = nk_table(a, 2, &c).unwrap();
            let b = exp_series(a, &c.real(30), &table, 2, &c).unwrap();
            assert_eq!(b.oscillatory.len() as u32, a / 2 - a / 4);
            assert_eq!(b.puredecay.is_some(), a == 6 || a == 10);
            for w in b.oscillatory.windows(2) {
                assert!(w[1].decay_rate > w[0].decay_rate, "alpha = {a}");
            }
            assert!(b.oscillatory.iter().all(|o| o.decay_rate > 0.0));
        }
        let table = nk_table(4, 0, &c).unwrap();
        let b = exp_series(4, &c.real(10), &table, 1, &c).unwrap();
        assert!((b.oscillatory[0].decay_rate - 1.5).abs() < 1e-15);
        assert!((b.oscillatory[0].phase_rate - 1.5 * 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn cubic_far_out_is_algebraic() {
        let c = ctx();
        let r = levy_asym(int(3), &c.real(30), &c).unwrap();
        let lead = -6.0 / 30f64.powi(4);
        assert!((r.to_f64() - lead).abs() < 1e-3 * lead.abs());
        let b = asym_breakdown(int(3), &c.real(30), &c, &AsymOptions::default()).unwrap();
        // envelope √(π/4)·2/(90)^{1/4}·e^{-√2·10^{3/2}} ≈ 2.18e-20
        let osc = b.oscillatory[0].partial.to_f64().abs();
        assert!(osc <= 2.2e-20 * 1.01);
    }

    #[test]
    fn quartic_against_quadrature() {
        let c = ctx();
        let z = c.real(10);
        let asym = levy_asym(int(4), &z, &c).unwrap();
        let quad = levy_quad(int(4), &z, &c).unwrap();
        let d = Float::with_val(c.bits(), &asym.value - &quad.value).abs().to_f64();
        assert!(d / envelope(4, &z, &c).unwrap() < 1e-3);
        assert!(d <= asym.err, "{d:e} vs {:e}", asym.err);
    }

    #[test]
    fn gate_and_domain() {
        let c = ctx();
        assert!(matches!(levy_asym(int(4), &c.real(7), &c), Err(Error::OutsideAsymptoticRegime { .. })));
        let opts = AsymOptions { z_min: Some(5.0), ..AsymOptions::default() };
        assert!(levy_asym_with(int(4), &c.real(7), &c, &opts).is_ok());
        assert!(levy_asym(AlphaParam::new(5, 2).unwrap(), &c.real(20), &c).is_err());
        assert!(levy_asym(int(2), &c.real(20), &c).is_err());
        assert!(algebraic_series(3, &c.real(-1), 2).is_err());
    }

    #[test]
    fn even_exponent_without_exponentials_is_zero() {
        let c = ctx();
        let opts = AsymOptions { with_exponential: false, ..AsymOptions::default() };
        let r = levy_asym_with(int(6), &c.real(14), &c, &opts).unwrap();
        assert!(r.value.is_zero());
        let quad = levy_quad(int(6), &c.real(14), &c).unwrap();
        assert!(quad.to_f64().abs() <= r.err);
    }
}
