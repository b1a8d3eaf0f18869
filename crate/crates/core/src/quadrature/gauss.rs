use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rug::ops::Pow;
use rug::Float;

use crate::numkernel::XComplex;

pub(crate) const ORDER: usize = 32;
const MAX_DEPTH: u32 = 40;

/// Nodes and weights of the 32-point Gauss–Legendre rule on [-1, 1].
pub(crate) struct GaussRule {
    pub x: Vec<Float>,
    pub w: Vec<Float>,
}

static RULES: Mutex<Option<HashMap<u32, Arc<GaussRule>>>> = Mutex::new(None);

/// The rule at `bits` precision, generated once by Newton iteration.
pub(crate) fn rule(bits: u32) -> Arc<GaussRule> {
    let mut guard = RULES.lock().unwrap_or_else(|e| e.into_inner());
    let map = guard.get_or_insert_with(HashMap::new);
    map.entry(bits).or_insert_with(|| Arc::new(build(bits))).clone()
}

// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre(n: usize, x: &Float, bits: u32) -> (Float, Float) {
    let mut p0 = Float::with_val(bits, 1);
    let mut p1 = x.clone();
    for k in 2..=n {
        let kf = k as u32;
        let t = Float::with_val(bits, x * &p1) * (2 * kf - 1);
        let p2 = (t - Float::with_val(bits, &p0 * (kf - 1))) / kf;
        p0 = p1;
        p1 = p2;
    }
    // P_n' = n (x P_n - P_{n-1}) / (x^2 - 1)
    let num = (Float::with_val(bits, x * &p1) - &p0) * n as u32;
    let den = Float::with_val(bits, x.square_ref()) - 1u32;
    (p1, num / den)
}

fn build(bits: u32) -> GaussRule {
    let work = bits + 32;
    let n = ORDER;
    let tol = Float::with_val(work, Float::i_exp(1, -(bits as i32) - 8));
    let mut x = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    for i in 1..=n {
        let guess = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        let mut r = Float::with_val(work, guess);
        for _ in 0..100 {
            let (p, dp) = legendre(n, &r, work);
            let step = p / &dp;
            r -= &step;
            if step.abs() < tol {
                break;
            }
        }
        let (_, dp) = legendre(n, &r, work);
        let one_minus = Float::with_val(work, 1u32) - Float::with_val(work, r.square_ref());
        let wt = Float::with_val(work, 2u32) / (one_minus * dp.square());
        x.push(Float::with_val(bits, &r));
        w.push(Float::with_val(bits, &wt));
    }
    GaussRule { x, w }
}

/// Values a quadrature rule can accumulate: reals and complexes.
pub(crate) trait QValue: Clone {
    fn zero(bits: u32) -> Self;
    fn axpy(&mut self, w: &Float, v: &Self);
    fn scaled(&self, k: &Float) -> Self;
    fn plus(&self, other: &Self) -> Self;
    /// |self - other| as an f64.
    fn dist(&self, other: &Self) -> f64;
}

impl QValue for Float {
    fn zero(bits: u32) -> Self {
        Float::new(bits)
    }
    fn axpy(&mut self, w: &Float, v: &Self) {
        *self += Float::with_val(self.prec(), w * v);
    }
    fn scaled(&self, k: &Float) -> Self {
        Float::with_val(self.prec(), self * k)
    }
    fn plus(&self, other: &Self) -> Self {
        Float::with_val(self.prec(), self + other)
    }
    fn dist(&self, other: &Self) -> f64 {
        Float::with_val(self.prec(), self - other).abs().to_f64()
    }
}

impl QValue for XComplex {
    fn zero(bits: u32) -> Self {
        XComplex::zero(bits)
    }
    fn axpy(&mut self, w: &Float, v: &Self) {
        self.re += Float::with_val(self.re.prec(), w * &v.re);
        self.im += Float::with_val(self.im.prec(), w * &v.im);
    }
    fn scaled(&self, k: &Float) -> Self {
        self.scale(k)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn dist(&self, other: &Self) -> f64 {
        (self - other).abs().to_f64()
    }
}

/// Adaptive Gauss–Legendre over panels with a shared panel budget.
pub(crate) struct Integrator<F> {
    f: F,
    bits: u32,
    rule: Arc<GaussRule>,
    /// Rule applications so far.
    pub panels: usize,
    budget: usize,
    /// Set once the budget ran out; later estimates are unrefined.
    pub exhausted: bool,
}

impl<V: QValue, F: FnMut(&Float) -> V> Integrator<F> {
    pub fn new(f: F, bits: u32, budget: usize) -> Self {
        Self { f, bits, rule: rule(bits), panels: 0, budget, exhausted: false }
    }

    fn gauss(&mut self, a: &Float, b: &Float) -> V {
        self.panels += 1;
        let bits = self.bits;
        let half = Float::with_val(bits, b - a) / 2u32;
        let mid = Float::with_val(bits, a + b) / 2u32;
        let mut acc = V::zero(bits);
        let rule = self.rule.clone();
        for (x, w) in rule.x.iter().zip(&rule.w) {
            let t = Float::with_val(bits, &half * x) + &mid;
            let v = (self.f)(&t);
            acc.axpy(w, &v);
        }
        acc.scaled(&half)
    }

    /// ∫_a^b f with bisection until the rule agrees with its two halves
    /// to `tol`. Returns the value and the summed disagreement.
    pub fn adaptive(&mut self, a: &Float, b: &Float, tol: f64) -> (V, f64) {
        let whole = self.gauss(a, b);
        self.refine(a, b, whole, tol, 0)
    }

    fn refine(&mut self, a: &Float, b: &Float, whole: V, tol: f64, depth: u32) -> (V, f64) {
        let mid = Float::with_val(self.bits, a + b) / 2u32;
        let left = self.gauss(a, &mid);
        let right = self.gauss(&mid, b);
        let both = left.plus(&right);
        let diff = both.dist(&whole);
        if diff <= tol || depth >= MAX_DEPTH {
            return (both, diff);
        }
        if self.panels >= self.budget {
            self.exhausted = true;
            return (both, diff);
        }
        let (l, el) = self.refine(a, &mid, left, tol / 2.0, depth + 1);
        let (r, er) = self.refine(&mid, b, right, tol / 2.0, depth + 1);
        (l.plus(&r), el + er)
    }
}

/// Cohen–Rodriguez Villegas–Zagier acceleration of Σ (-1)^k b_k, given
/// the signed terms a_k = (-1)^k b_k; uses the first `n` of them.
pub(crate) fn cvz_sum(terms: &[Float], n: usize, bits: u32) -> Float {
    let n = n.min(terms.len());
    let sqrt8 = Float::with_val(bits, 8u32).sqrt();
    let base = Float::with_val(bits, sqrt8 + 3u32);
    let mut d = base.pow(n as u32);
    let inv = Float::with_val(bits, d.recip_ref());
    d = (d + inv) / 2u32;
    let mut b = Float::with_val(bits, -1);
    let mut c = Float::with_val(bits, -&d);
    let mut s = Float::new(bits);
    let nn = n as i64;
    for (k, a) in terms.iter().take(n).enumerate() {
        c = Float::with_val(bits, &b - &c);
        let bk = if k % 2 == 0 { a.clone() } else { Float::with_val(bits, -a) };
        s += Float::with_val(bits, &c * &bk);
        let k = k as i64;
        let num = (k + nn) * (k - nn);
        b *= num;
        b *= 2i64;
        b /= (2 * k + 1) * (k + 1);
    }
    s / d
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::float::Constant;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let bits = 200;
        let r = rule(bits);
        let wsum: Float = r.w.iter().fold(Float::new(bits), |acc, w| acc + w);
        assert!(Float::with_val(bits, &wsum - 2u32).abs() < 1e-55);
        // ∫_{-1}^{1} x^62 dx = 2/63
        let mut acc = Float::new(bits);
        for (x, w) in r.x.iter().zip(&r.w) {
            acc += Float::with_val(bits, x.pow(62u32)) * w;
        }
        let want = Float::with_val(bits, 2u32) / 63u32;
        assert!(Float::with_val(bits, &acc - &want).abs() < 1e-55);
    }

    #[test]
    fn adaptive_handles_a_peak() {
        // ∫_0^1 1/(1e-4 + x^2) dx = 100 atan(100)
        let bits = 200;
        let mut q2 = Integrator::new(
            |x: &Float| {
                let eps = Float::with_val(bits, 10_000u32).recip();
                let d = Float::with_val(bits, x.square_ref()) + eps;
                d.recip()
            },
            bits,
            100_000,
        );
        let (v, err) = q2.adaptive(&Float::new(bits), &Float::with_val(bits, 1), 1e-50);
        let want = Float::with_val(bits, 100u32).atan() * 100u32;
        assert!(Float::with_val(bits, &v - &want).abs() < 1e-48);
        assert!(err < 1e-45);
    }

    #[test]
    fn cvz_sums_log2() {
        // Σ (-1)^k / (k+1) = ln 2
        let bits = 200;
        let terms: Vec<Float> = (0..80)
            .map(|k| {
                let v = Float::with_val(bits, 1u32) / (k + 1) as u32;
                if k % 2 == 0 { v } else { -v }
            })
            .collect();
        let s = cvz_sum(&terms, 80, bits);
        let ln2 = Float::with_val(bits, Constant::Log2);
        assert!(Float::with_val(bits, &s - &ln2).abs() < 1e-55);
    }
}
