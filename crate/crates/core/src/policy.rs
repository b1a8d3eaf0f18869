//! Method selection for F_α(z).

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use crate::asympt::{levy_asym, z_min_default};
use crate::error::{Error, Result};
use crate::hyper::{levy_hyper, taylor_levy};
use crate::numkernel::{AlphaParam, PrecisionCtx, XReal};
use crate::quadrature::{levy_quad, EvalResult};

/// Which evaluator to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolicyMode {
    Auto,
    Quad,
    Taylor,
    Hyper,
    Asym,
    Inversion,
}

impl FromStr for PolicyMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "auto" => PolicyMode::Auto,
            "quad" => PolicyMode::Quad,
            "taylor" => PolicyMode::Taylor,
            "hyper" => PolicyMode::Hyper,
            "asym" => PolicyMode::Asym,
            "inversion" => PolicyMode::Inversion,
            other => return Err(Error::InvalidParameter(format!("unknown method '{other}'"))),
        })
    }
}

impl fmt::Display for PolicyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PolicyMode::Auto => "auto",
            PolicyMode::Quad => "quad",
            PolicyMode::Taylor => "taylor",
            PolicyMode::Hyper => "hyper",
            PolicyMode::Asym => "asym",
            PolicyMode::Inversion => "inversion",
        };
        f.write_str(s)
    }
}

/// Evaluator choice plus an optional fixed series/asymptotic switch point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodPolicy {
    pub mode: PolicyMode,
    pub z_switch_override: Option<f64>,
}

impl Default for MethodPolicy {
    fn default() -> Self {
        Self { mode: PolicyMode::Auto, z_switch_override: None }
    }
}

impl MethodPolicy {
    pub fn new(mode: PolicyMode) -> Self {
        Self { mode, z_switch_override: None }
    }
}

/// Coarse grid for the switch probe: 2α·1.25^k up to this bound.
const PROBE_LIMIT: f64 = 200.0;

type SwitchCache = HashMap<(u32, u32, u32), Option<f64>>;

static SWITCH: Mutex<Option<SwitchCache>> = Mutex::new(None);

/// Series evaluation: Taylor, or the hypergeometric sum once Taylor
/// loses too much to cancellation.
fn series(alpha: AlphaParam, z: &XReal, ctx: &PrecisionCtx) -> Result<EvalResult> {
    match taylor_levy(alpha, z, ctx) {
        Err(Error::Cancellation { .. }) => levy_hyper(alpha, z, ctx),
        other => other,
    }
}

/// First grid point where the asymptotic estimate falls to the series
/// estimate, for integer α ≥ 3; `None` when the grid ends first. Probed
/// once per (α, digits) and cached.
pub fn z_switch(alpha: AlphaParam, ctx: &PrecisionCtx) -> Option<f64> {
    let a = alpha.as_integer().filter(|&a| a >= 3)?;
    let key = (alpha.p(), alpha.q(), ctx.digits);
    if let Some(v) = SWITCH.lock().unwrap_or_else(|e| e.into_inner()).get_or_insert_with(HashMap::new).get(&key) {
        return *v;
    }
    let mut found = None;
    let mut z = z_min_default(a);
    while z <= PROBE_LIMIT {
        let zx = ctx.real(z);
        if let Ok(asym) = levy_asym(alpha, &zx, ctx) {
            // the series meets eps·max(1,|v|) whenever it succeeds, so the
            // estimates can only cross once the expansion reaches that too
            if asym.err <= ctx.eps * asym.to_f64().abs().max(1.0) {
                let series_err = series(alpha, &zx, ctx).map_or(f64::INFINITY, |r| r.err);
                if asym.err <= series_err.max(ctx.eps * asym.to_f64().abs().max(1.0)) {
                    found = Some(z);
                    break;
                }
            }
        }
        z *= 1.25;
    }
    SWITCH.lock().unwrap_or_else(|e| e.into_inner()).get_or_insert_with(HashMap::new).insert(key, found);
    found
}

/// F_α(z) by the method named in `policy`.
///
/// Auto: for integer α ≥ 3 the series below the switch point and the
/// asymptotic expansion at or above it; quadrature for every other α.
pub fn levy_eval(alpha: AlphaParam, z: &XReal, policy: &MethodPolicy, ctx: &PrecisionCtx) -> Result<EvalResult> {
    match policy.mode {
        PolicyMode::Quad => levy_quad(alpha, z, ctx),
        PolicyMode::Taylor => taylor_levy(alpha, z, ctx),
        PolicyMode::Hyper => levy_hyper(alpha, z, ctx),
        PolicyMode::Asym => levy_asym(alpha, &XReal::with_val(z.prec(), z.abs_ref()), ctx),
        PolicyMode::Inversion => Err(Error::InvalidParameter(
            "the inversion formula evaluates the Euler-Jacobi series, not F at a point".to_string(),
        )),
        PolicyMode::Auto => {
            if alpha.as_integer().is_none_or(|a| a < 3) {
                return levy_quad(alpha, z, ctx);
            }
            let zf = z.to_f64().abs();
            let switch = policy.z_switch_override.or_else(|| z_switch(alpha, ctx));
            if switch.is_some_and(|s| zf >= s) {
                levy_asym(alpha, &XReal::with_val(z.prec(), z.abs_ref()), ctx)
            } else {
                series(alpha, z, ctx).or_else(|_| levy_quad(alpha, z, ctx))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::Method;

    #[test]
    fn auto_routes_by_exponent_and_argument() {
        let c = PrecisionCtx::new(30);
        let auto = MethodPolicy::default();
        let r = levy_eval(AlphaParam::new(3, 2).unwrap(), &c.real(1), &auto, &c).unwrap();
        assert_eq!(r.method, Method::Quad);
        let r = levy_eval(AlphaParam::integer(4).unwrap(), &c.real(1), &auto, &c).unwrap();
        assert_eq!(r.method, Method::Taylor);
        let fixed = MethodPolicy { z_switch_override: Some(10.0), ..auto };
        let r = levy_eval(AlphaParam::integer(4).unwrap(), &c.real(12), &fixed, &c).unwrap();
        assert_eq!(r.method, Method::Asym);
        let r = levy_eval(AlphaParam::integer(4).unwrap(), &c.real(9), &fixed, &c).unwrap();
        assert_ne!(r.method, Method::Asym);
    }

    #[test]
    fn switch_point_is_cached_and_sane() {
        let c = PrecisionCtx::new(20);
        let a = AlphaParam::integer(4).unwrap();
        let s = z_switch(a, &c).expect("switch inside the grid");
        assert!(s >= 8.0);
        assert_eq!(z_switch(a, &c), Some(s));
        assert_eq!(z_switch(AlphaParam::integer(2).unwrap(), &c), None);
        // just past the switch the expansion meets the tolerance
        let r = levy_eval(a, &c.real(s * 1.01), &MethodPolicy::default(), &c).unwrap();
        assert_eq!(r.method, Method::Asym);
        assert!(r.err <= c.eps * r.to_f64().abs().max(1.0) * 2.0);
    }

    #[test]
    fn modes_parse() {
        assert_eq!("Hyper".parse::<PolicyMode>().unwrap(), PolicyMode::Hyper);
        assert!("simpson".parse::<PolicyMode>().is_err());
        let c = PrecisionCtx::new(20);
        let inv = MethodPolicy::new(PolicyMode::Inversion);
        assert!(levy_eval(AlphaParam::integer(2).unwrap(), &c.real(1), &inv, &c).is_err());
    }
}
