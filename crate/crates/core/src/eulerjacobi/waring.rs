use rug::ops::Pow;
use rug::Float;

use super::{ej_direct, EJParams};
use crate::error::{Error, Result};
use crate::numkernel::{AlphaParam, PrecisionCtx};

/// Enumeration budget: n·s may not exceed this.
pub const WARING_BUDGET: u64 = 1_000_000;

fn check(k: u32, s: u32, n: u64) -> Result<()> {
    if k == 0 || k % 2 == 1 {
        return Err(Error::InvalidParameter(format!("Waring counts need an even power k, got {k}")));
    }
    if s == 0 {
        return Err(Error::InvalidParameter("Waring counts need s >= 1".to_string()));
    }
    let limit = WARING_BUDGET / u64::from(s);
    if n > limit {
        return Err(Error::BudgetExceeded { requested: n, limit });
    }
    Ok(())
}

// k-th powers of 0, 1, 2, … not exceeding n.
fn powers(k: u32, n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for a in 0u64.. {
        match a.checked_pow(k) {
            Some(v) if v <= n => out.push(v),
            _ => break,
        }
    }
    out
}

fn dfs(pw: &[u64], s: u32, rest: u64) -> u64 {
    if s == 0 {
        return u64::from(rest == 0);
    }
    let mut total = 0;
    for (a, &v) in pw.iter().enumerate() {
        if v > rest {
            break;
        }
        let ways = dfs(pw, s - 1, rest - v);
        total += if a == 0 { ways } else { 2 * ways };
    }
    total
}

/// r_{k,s}(n): ordered s-tuples of integers whose k-th powers sum to n,
/// by depth-first enumeration over |a_i| ≤ n^{1/k}.
pub fn waring_count(k: u32, s: u32, n: u64) -> Result<u64> {
    check(k, s, n)?;
    Ok(dfs(&powers(k, n), s, n))
}

/// r_{k,s}(0..=n_max) at once, by repeated convolution of the one-term
/// histogram.
pub fn waring_counts(k: u32, s: u32, n_max: u64) -> Result<Vec<u64>> {
    check(k, s, n_max)?;
    let len = n_max as usize + 1;
    let mut one = vec![0u64; len];
    for (a, v) in powers(k, n_max).into_iter().enumerate() {
        one[v as usize] += if a == 0 { 1 } else { 2 };
    }
    let mut acc = one.clone();
    for _ in 1..s {
        let mut next = vec![0u64; len];
        for (i, &x) in acc.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in one.iter().enumerate().take(len - i) {
                next[i + j] += x * y;
            }
        }
        acc = next;
    }
    Ok(acc)
}

/// Outcome of comparing the truncated generating function with
/// (2 S_k(a) - 1)^s.
#[derive(Debug, Clone)]
pub struct WaringCheck {
    pub residual: f64,
    /// Σ_{n>N} (2 n^{1/k} + 1)^s e^{-an}.
    pub tail_bound: f64,
    /// Propagated error of the S_k(a) evaluation and of the sums.
    pub evaluator_err: f64,
    pub passed: bool,
}

/// Checks Σ_{n≤N} r_{k,s}(n) e^{-an} against (2 S_k(a) - 1)^s.
pub fn waring_genfun_check(k: u32, s: u32, a: f64, n_max: u64, ctx: &PrecisionCtx) -> Result<WaringCheck> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Domain(format!("generating-function parameter a must be > 0, got {a}")));
    }
    let counts = waring_counts(k, s, n_max)?;
    let bits = ctx.bits();
    let ax = ctx.real(a);
    let q = Float::with_val(bits, -&ax).exp();
    let mut series = Float::new(bits);
    let mut w = Float::with_val(bits, 1);
    for &r in &counts {
        if r > 0 {
            series += Float::with_val(bits, &w * r);
        }
        w *= &q;
    }
    let sk = ej_direct(&EJParams::new(AlphaParam::integer(k)?, ax.clone())?, ctx)?;
    let theta = Float::with_val(bits, &sk.value * 2u32) - 1u32;
    let closed = Float::with_val(bits, (&theta).pow(s));
    let residual = Float::with_val(bits, &series - &closed).abs();

    // Σ_{n>N} (2 n^{1/k} + 1)^s e^{-an}, until the terms stop mattering
    let mut tail = Float::new(bits);
    let mut n = n_max + 1;
    loop {
        let root = Float::with_val(bits, n).root(k);
        let bound = Float::with_val(bits, root * 2u32 + 1u32).pow(s);
        let term = bound * Float::with_val(bits, -Float::with_val(bits, &ax * n)).exp();
        let small = term < Float::with_val(bits, &tail * 1e-3) && n > n_max + 10;
        tail += term;
        if small {
            break;
        }
        n += 1;
    }
    // d/dS (2S-1)^s = 2s(2S-1)^{s-1}
    let slope = 2.0 * f64::from(s) * theta.to_f64().abs().powi(s as i32 - 1);
    let scale = closed.to_f64().abs().max(1.0);
    let evaluator_err = slope * sk.err + 10.0 * ctx.eps * scale;
    let passed = residual <= Float::with_val(bits, &tail + evaluator_err);
    Ok(WaringCheck { residual: residual.to_f64(), tail_bound: tail.to_f64(), evaluator_err, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        assert_eq!(waring_count(2, 2, 0).unwrap(), 1);
        assert_eq!(waring_count(2, 1, 4).unwrap(), 2);
        assert_eq!(waring_count(2, 2, 5).unwrap(), 8);
        // (0,±5), (±5,0), (±3,±4), (±4,±3)
        assert_eq!(waring_count(2, 2, 25).unwrap(), 12);
        assert_eq!(waring_count(4, 2, 17).unwrap(), 8);
        assert_eq!(waring_count(2, 1, 3).unwrap(), 0);
    }

    #[test]
    fn histogram_matches_enumeration() {
        let h = waring_counts(2, 3, 60).unwrap();
        for n in 0..=60 {
            assert_eq!(h[n as usize], waring_count(2, 3, n).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn interface_limits() {
        assert!(waring_count(3, 2, 5).is_err());
        assert!(waring_count(2, 0, 5).is_err());
        assert!(matches!(waring_count(2, 4, 300_000), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn single_square_generating_function() {
        let c = PrecisionCtx::new(50);
        let r = waring_genfun_check(2, 1, 1.0, 100, &c).unwrap();
        assert!(r.passed);
        assert!(r.residual <= 1e-40);
    }

    #[test]
    fn two_and_three_squares_and_fourth_powers() {
        let c = PrecisionCtx::new(50);
        for (k, s) in [(2, 2), (2, 3), (4, 2), (4, 3)] {
            let r = waring_genfun_check(k, s, 1.0, 200, &c).unwrap();
            assert!(r.passed, "k={k} s={s}: {r:?}");
        }
    }
}
