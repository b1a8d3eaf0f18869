use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::numkernel::{PrecisionCtx, XReal};

/// Highest coefficient order offered; beyond this the series is formal.
pub const MAX_ORDER: usize = 50;

/// Coefficients N_0..N_M of the exponential series for integer α.
#[derive(Debug, Clone)]
pub struct NkTable {
    pub alpha: u32,
    pub coeffs: Vec<XReal>,
    exact: Vec<Rational>,
}

impl NkTable {
    /// N_k, zero for negative k. Panics past the table end.
    pub fn get(&self, k: i64) -> XReal {
        if k < 0 {
            let prec = self.coeffs.first().map_or(64, |c| c.prec());
            return Float::new(prec);
        }
        self.coeffs[k as usize].clone()
    }

    /// Highest order held.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Runs the recursion for N_k once more from the stored lower orders.
    pub fn recompute(&self, k: usize) -> XReal {
        let prec = self.coeffs[0].prec();
        Float::with_val(prec, &step(self.alpha, k, &self.exact))
    }
}

fn pochhammer(x: &Rational, n: u32) -> Rational {
    let mut acc = Rational::from(1);
    for i in 0..n {
        acc *= Rational::from(x + i);
    }
    acc
}

fn factorial(n: u32) -> Integer {
    Integer::from(Integer::factorial(n))
}

// One application of the recursion; `known` holds N_0..N_{k-1}.
fn step(a: u32, k: usize, known: &[Rational]) -> Rational {
    let a1 = a - 1;
    let two_a1 = 2 * a1;
    let slope = Rational::from((a, 2 * a1));
    let up = Rational::from((a, 4 * a1));
    let down = Rational::from((a - 2, 4 * a1));
    let denom_a = Integer::from(a).pow(2 * a - 1) * Integer::from(k);
    let mut total = Rational::new();
    for s in 1..=two_a1 {
        if (s as usize) > k {
            break;
        }
        let prev = &known[k - s as usize];
        if *prev == 0 {
            continue;
        }
        let power = Integer::from(two_a1).pow(2 * a - s - 2);
        for r in 0..=two_a1 - s {
            let j = Rational::from(i64::from(r + s) - k as i64);
            let base = Rational::from(&slope * &j) - a1;
            let pa = pochhammer(&Rational::from(&base + &up), a1);
            let pb = pochhammer(&Rational::from(&base - &down), a);
            let den = factorial(r) * factorial(two_a1 - s - r);
            let mut t = pa * pb * Rational::from((power.clone(), den)) * prev;
            if (s + r) % 2 == 1 {
                t = -t;
            }
            total += t;
        }
    }
    total / Rational::from(denom_a)
}

/// N_0..N_M by the recursion in exact rational arithmetic, rounded to the
/// context precision.
pub fn nk_table(alpha: u32, m: usize, ctx: &PrecisionCtx) -> Result<NkTable> {
    if alpha < 3 {
        return Err(Error::InvalidParameter(format!("N_k table needs integer alpha >= 3, got {alpha}")));
    }
    if m > MAX_ORDER {
        return Err(Error::InvalidParameter(format!("N_k order {m} exceeds {MAX_ORDER}")));
    }
    let mut exact = vec![Rational::from(1)];
    for k in 1..=m {
        let n = step(alpha, k, &exact);
        exact.push(n);
    }
    let bits = ctx.bits();
    let coeffs = exact.iter().map(|r| Float::with_val(bits, r)).collect();
    Ok(NkTable { alpha, coeffs, exact })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_and_negative_orders() {
        let c = PrecisionCtx::new(30);
        let t = nk_table(4, 0, &c).unwrap();
        assert_eq!(t.coeffs.len(), 1);
        assert_eq!(t.get(0), 1);
        assert!(t.get(-1).is_zero());
        assert!(t.get(-7).is_zero());
    }

    #[test]
    fn first_coefficients() {
        // independent high-precision run of the same recursion
        let c = PrecisionCtx::new(30);
        let cases = [
            (3, 1, 0.017361111111111112),
            (4, 1, 0.024305555555555556),
            (4, 2, 0.0023208429783950617),
            (5, 4, -5.999_120_950_698_853e-5),
            (6, 3, -1.589_863_397_347_965_3e-5),
            (3, 2, 0.0023208429783950617),
        ];
        for (a, k, want) in cases {
            let t = nk_table(a, k, &c).unwrap();
            let got = t.coeffs[k].to_f64();
            assert!((got - want).abs() <= 1e-14 * want.abs(), "N_{k} for {a}: {got}");
        }
    }

    #[test]
    fn recursion_reproduces_the_table() {
        let c = PrecisionCtx::new(40);
        let t = nk_table(5, 12, &c).unwrap();
        for k in 1..=12 {
            let d = Float::with_val(c.bits(), &t.recompute(k) - &t.coeffs[k]).abs();
            assert!(d <= 10.0 * c.eps * t.coeffs[k].to_f64().abs());
        }
    }

    #[test]
    fn bounds() {
        let c = PrecisionCtx::new(20);
        assert!(nk_table(2, 3, &c).is_err());
        assert!(nk_table(4, 51, &c).is_err());
        assert_eq!(nk_table(4, 50, &c).unwrap().order(), 50);
    }
}
