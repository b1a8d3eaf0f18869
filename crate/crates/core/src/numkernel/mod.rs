//! Working-precision arithmetic and the elementary special functions
//! (gamma, Pochhammer, Bessel J, Hurwitz zeta) consumed by every evaluator.
//!
//! Real numbers are MPFR floats ([`XReal`]); every routine takes a
//! [`PrecisionCtx`] and works with [`GUARD_DIGITS`] extra decimal digits.

mod bernoulli;
mod bessel;
mod complex;
mod gamma;
mod zeta;

use std::fmt;
use std::str::FromStr;

use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};

pub use bernoulli::bernoulli_b2k;
pub use bessel::{bessel_j, bessel_j_bits, BesselJ};
pub use complex::XComplex;
pub use gamma::{gamma, gamma_bits, ln_gamma_f64, pochhammer, sin_pi, sin_pi_frac};
pub use zeta::hurwitz_zeta;

/// Arbitrary-precision real.
pub type XReal = Float;

/// Extra decimal digits carried beyond `PrecisionCtx::digits`.
pub const GUARD_DIGITS: u32 = 10;

const BITS_PER_DIGIT: f64 = std::f64::consts::LOG2_10;

/// Converts a decimal digit count to a binary precision.
pub fn digits_to_bits(digits: f64) -> u32 {
    (digits * BITS_PER_DIGIT).ceil().max(64.0) as u32
}

/// Working precision, target tolerance and iteration caps.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionCtx {
    /// Decimal working precision.
    pub digits: u32,
    /// Target relative tolerance.
    pub eps: f64,
    /// Cap on series terms and quadrature panels.
    pub max_terms: usize,
}

impl Default for PrecisionCtx {
    fn default() -> Self {
        Self::new(50)
    }
}

impl PrecisionCtx {
    pub const MIN_DIGITS: u32 = 15;
    // eps is stored as an f64, which bottoms out near 1e-308.
    pub const MAX_DIGITS: u32 = 300;

    /// Context with `digits` of precision and the default tolerance
    /// `10^(5 - digits)`. Panics if `digits` is outside
    /// [`MIN_DIGITS`](Self::MIN_DIGITS)..=[`MAX_DIGITS`](Self::MAX_DIGITS).
    pub fn new(digits: u32) -> Self {
        Self::try_new(digits).expect("digits out of range")
    }

    pub fn try_new(digits: u32) -> Result<Self> {
        if !(Self::MIN_DIGITS..=Self::MAX_DIGITS).contains(&digits) {
            return Err(Error::InvalidParameter(format!(
                "digits must lie in {}..={}, got {digits}",
                Self::MIN_DIGITS,
                Self::MAX_DIGITS
            )));
        }
        Ok(Self { digits, eps: 10f64.powi(5 - digits as i32), max_terms: 100_000 })
    }

    /// Overrides the tolerance. `eps` must be positive.
    pub fn with_eps(mut self, eps: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
        }
        self.eps = eps;
        Ok(self)
    }

    pub fn with_max_terms(mut self, max_terms: usize) -> Self {
        self.max_terms = max_terms.max(1);
        self
    }

    /// Same tolerance policy at a different digit count.
    pub fn with_digits(&self, digits: u32) -> Self {
        let mut c = Self::new(digits);
        c.max_terms = self.max_terms;
        c
    }

    /// Binary precision including guard digits.
    pub fn bits(&self) -> u32 {
        digits_to_bits(f64::from(self.digits + GUARD_DIGITS))
    }

    pub fn real<T>(&self, v: T) -> XReal
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.bits(), v)
    }

    /// Parses a decimal literal exactly to working precision.
    pub fn parse(&self, s: &str) -> Result<XReal> {
        let parsed = Float::parse(s.trim())
            .map_err(|e| Error::InvalidParameter(format!("cannot parse number {s:?}: {e}")))?;
        Ok(Float::with_val(self.bits(), parsed))
    }

    pub fn pi(&self) -> XReal {
        Float::with_val(self.bits(), Constant::Pi)
    }

    pub fn eps_x(&self) -> XReal {
        Float::with_val(self.bits(), self.eps)
    }
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// The exponent α as a reduced positive rational p/q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AlphaParam {
    p: u32,
    q: u32,
}

impl AlphaParam {
    /// Builds p/q in lowest terms; both must be at least 1.
    pub fn new(p: u32, q: u32) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::InvalidParameter(format!("alpha = {p}/{q} must be positive")));
        }
        let g = gcd(p, q);
        Ok(Self { p: p / g, q: q / g })
    }

    pub fn integer(n: u32) -> Result<Self> {
        Self::new(n, 1)
    }

    /// Nearest rational with denominator at most `max_den`.
    pub fn from_decimal(x: f64, max_den: u32) -> Result<Self> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::InvalidParameter(format!("alpha = {x} must be positive")));
        }
        let mut best = (0u32, 1u32, f64::INFINITY);
        for q in 1..=max_den.max(1) {
            let p = (x * f64::from(q)).round().max(1.0);
            let err = (x - p / f64::from(q)).abs();
            if err < best.2 {
                best = (p as u32, q, err);
            }
        }
        Self::new(best.0, best.1)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn to_f64(&self) -> f64 {
        f64::from(self.p) / f64::from(self.q)
    }

    pub fn value(&self, bits: u32) -> XReal {
        Float::with_val(bits, self.p) / self.q
    }

    pub fn as_integer(&self) -> Option<u32> {
        (self.q == 1).then_some(self.p)
    }

    pub fn is_even_integer(&self) -> bool {
        self.q == 1 && self.p.is_multiple_of(2)
    }
}

impl fmt::Display for AlphaParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q == 1 {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}/{}", self.p, self.q)
        }
    }
}

impl FromStr for AlphaParam {
    type Err = Error;

    /// Accepts `p/q`, an integer, or a decimal (rounded to denominator ≤ 64).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidParameter(format!("cannot parse alpha {s:?}"));
        if let Some((p, q)) = s.split_once('/') {
            let p = p.trim().parse().map_err(|_| bad())?;
            let q = q.trim().parse().map_err(|_| bad())?;
            return Self::new(p, q);
        }
        if let Ok(n) = s.parse::<u32>() {
            return Self::new(n, 1);
        }
        let x: f64 = s.parse().map_err(|_| bad())?;
        Self::from_decimal(x, 64)
    }
}

/// `|x|` as an f64 log10, `-inf` for zero.
pub(crate) fn log10_abs(x: &Float) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (m, e) = x.to_f64_exp();
    m.abs().log10() + f64::from(e) * std::f64::consts::LOG10_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_reduces_and_parses() {
        let a = AlphaParam::new(4, 2).unwrap();
        assert_eq!((a.p(), a.q()), (2, 1));
        assert!(AlphaParam::new(0, 1).is_err());
        assert_eq!("3/2".parse::<AlphaParam>().unwrap(), AlphaParam::new(3, 2).unwrap());
        assert_eq!("4".parse::<AlphaParam>().unwrap(), AlphaParam::integer(4).unwrap());
        assert_eq!("1.5".parse::<AlphaParam>().unwrap(), AlphaParam::new(3, 2).unwrap());
        assert_eq!("0.3333333".parse::<AlphaParam>().unwrap(), AlphaParam::new(1, 3).unwrap());
        assert!("-1".parse::<AlphaParam>().is_err());
    }

    #[test]
    fn ctx_defaults() {
        let c = PrecisionCtx::default();
        assert_eq!(c.digits, 50);
        assert!((c.eps / 1e-45 - 1.0).abs() < 1e-12);
        assert!(c.bits() >= 199);
        assert!(PrecisionCtx::try_new(10).is_err());
    }

    #[test]
    fn log10_of_floats() {
        let c = PrecisionCtx::new(30);
        assert!((log10_abs(&c.real(1e-300)) + 300.0).abs() < 1e-9);
        assert_eq!(log10_abs(&c.real(0)), f64::NEG_INFINITY);
    }
}
