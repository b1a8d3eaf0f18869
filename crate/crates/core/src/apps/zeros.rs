use rug::Float;

use crate::error::{Error, Result};
use crate::numkernel::{PrecisionCtx, XReal};
use crate::quadrature::levy_quad;
use crate::AlphaParam;

/// Largest scan end accepted by [`real_zeros`].
pub const ZEROS_MAX_ARG: f64 = 40.0;

const MAX_STEP: f64 = 0.05;
const ZERO_TOL: f64 = 1e-12;

// Grid step: 0.05, or a quarter of the local oscillation period at z_max
// when that is smaller. Only integer α ≥ 3 oscillate in the tail.
fn grid_step(alpha: AlphaParam, z_max: f64) -> f64 {
    let Some(a) = alpha.as_integer().filter(|&a| a >= 3) else {
        return MAX_STEP;
    };
    let a = f64::from(a);
    let phase_rate = (a - 1.0) * (std::f64::consts::PI / (2.0 * (a - 1.0))).cos();
    let period = 2.0 * std::f64::consts::PI / phase_rate * (a / z_max).powf(1.0 / (a - 1.0));
    MAX_STEP.min(period / 4.0)
}

/// Positive real zeros of F_α in (0, z_max], ascending. Sign changes on a
/// grid are bracketed and bisected on the quadrature oracle to 1e-12.
pub fn real_zeros(alpha: AlphaParam, z_max: &XReal, ctx: &PrecisionCtx) -> Result<Vec<f64>> {
    let z_max = z_max.to_f64();
    if !(z_max > 0.0 && z_max <= ZEROS_MAX_ARG) {
        return Err(Error::InvalidParameter(format!("zero scan needs 0 < z_max <= {ZEROS_MAX_ARG}, got {z_max}")));
    }
    let bits = ctx.bits();
    // sign of F_α, or None when |F| is inside its own error estimate
    let sign = |z: f64| -> Result<Option<bool>> {
        let r = levy_quad(alpha, &Float::with_val(bits, z), ctx)?;
        let v = r.value.to_f64();
        Ok((v.abs() > r.err && v != 0.0).then_some(v < 0.0))
    };
    let step = grid_step(alpha, z_max);
    let n = (z_max / step).ceil() as usize;

    let mut zeros = Vec::new();
    let mut last: Option<(f64, bool)> = sign(0.0)?.map(|s| (0.0, s));
    for i in 1..=n {
        let z = (i as f64 * step).min(z_max);
        let Some(cur) = sign(z)? else { continue };
        if let Some((mut lo, lo_neg)) = last {
            if lo_neg != cur {
                let mut hi = z;
                while hi - lo > ZERO_TOL {
                    let mid = 0.5 * (lo + hi);
                    match sign(mid)? {
                        Some(s) if s == lo_neg => lo = mid,
                        Some(_) => hi = mid,
                        None => break,
                    }
                }
                zeros.push(0.5 * (lo + hi));
            }
        }
        last = Some((z, cur));
    }
    Ok(zeros)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let c = PrecisionCtx::new(20);
        let four = real_zeros(AlphaParam::integer(4).unwrap(), &c.real(12), &c).unwrap();
        assert!(four.len() >= 3, "{four:?}");
        assert!(four.windows(2).all(|w| w[0] < w[1]));
        let three = real_zeros(AlphaParam::integer(3).unwrap(), &c.real(20), &c).unwrap();
        assert!(!three.is_empty());
        let two = real_zeros(AlphaParam::integer(2).unwrap(), &c.real(20), &c).unwrap();
        assert!(two.is_empty());
        assert!(real_zeros(AlphaParam::integer(4).unwrap(), &c.real(41), &c).is_err());
    }

    #[test]
    fn zeros_are_roots() {
        let c = PrecisionCtx::new(20);
        let a = AlphaParam::integer(4).unwrap();
        for z in real_zeros(a, &c.real(8), &c).unwrap() {
            let lo = levy_quad(a, &c.real(z - 1e-9), &c).unwrap().to_f64();
            let hi = levy_quad(a, &c.real(z + 1e-9), &c).unwrap().to_f64();
            assert!(lo * hi < 0.0, "z = {z}");
        }
    }

    #[test]
    fn step_shrinks_with_z_max() {
        let a = AlphaParam::integer(8).unwrap();
        assert_eq!(grid_step(AlphaParam::integer(2).unwrap(), 40.0), MAX_STEP);
        assert!(grid_step(a, 40.0) <= grid_step(a, 10.0));
    }
}
