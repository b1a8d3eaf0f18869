//! The acceptance suite: thirteen numbered checks, each returning a
//! verdict and a one-line summary of what was measured.

use std::fmt;
use std::thread;

use rug::ops::Pow;
use rug::Float;

use crate::apps::{pearcey_relation_check, real_zeros};
use crate::asympt::{
    algebraic_series, asym_breakdown, envelope, has_puredecay, levy_asym_with, AsymOptions, Truncation,
};
use crate::error::{Error, Result};
use crate::eulerjacobi::{ej_direct, ej_inversion, waring_count, waring_genfun_check, EJParams};
use crate::hyper::{levy_hyper, taylor_levy};
use crate::numkernel::{AlphaParam, PrecisionCtx, XReal};
use crate::quadrature::{levy_density_d, levy_quad, moment_quad, EvalResult};

/// Number of criteria, numbered from 1.
pub const CRITERIA: u8 = 13;

/// Outcome of one criterion.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {:>2} {:<28} {}", self.id, self.name, self.detail)
    }
}

pub fn criterion_name(id: u8) -> Option<&'static str> {
    Some(match id {
        1 => "closed forms",
        2 => "cross-method agreement",
        3 => "even-alpha algebraic zeros",
        4 => "asymptotics vs oracle",
        5 => "N_k correction",
        6 => "pure-decay structure",
        7 => "inversion identity",
        8 => "moments",
        9 => "Pearcey relation",
        10 => "Waring counts",
        11 => "real zeros",
        12 => "stability convolution",
        13 => "dimensional closed forms",
        _ => return None,
    })
}

/// Runs criterion `id` at the precision of `ctx`. Evaluator failures
/// inside a check count as a failed verdict, not an error.
pub fn run_criterion(id: u8, ctx: &PrecisionCtx) -> Result<Verdict> {
    let name = criterion_name(id).ok_or_else(|| Error::InvalidParameter(format!("no criterion {id}")))?;
    let outcome = match id {
        1 => closed_forms(ctx),
        2 => cross_method(ctx),
        3 => even_algebraic(ctx),
        4 => asym_vs_oracle(ctx),
        5 => nk_correction(ctx),
        6 => puredecay_structure(ctx),
        7 => inversion(ctx),
        8 => moments(ctx),
        9 => pearcey(ctx),
        10 => waring(ctx),
        11 => zeros(ctx),
        12 => convolution(ctx),
        _ => dimensional(ctx),
    };
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    Ok(Verdict { id, name, passed, detail })
}

pub fn run_all(ctx: &PrecisionCtx) -> Vec<Verdict> {
    (1..=CRITERIA).map(|id| run_criterion(id, ctx).expect("criterion ids are in range")).collect()
}

type Check = Result<(bool, String)>;

fn alpha(s: &str) -> AlphaParam {
    s.parse().expect("literal alpha")
}

fn diff(a: &Float, b: &Float) -> f64 {
    Float::with_val(a.prec().max(b.prec()), a - b).abs().to_f64()
}

fn cauchy(z: &XReal) -> XReal {
    (Float::with_val(z.prec(), z.square_ref()) + 1u32).recip()
}

fn gauss(z: &XReal, ctx: &PrecisionCtx) -> XReal {
    let e = (-Float::with_val(ctx.bits(), z.square_ref()) / 4u32).exp();
    ctx.pi().sqrt() / 2u32 * e
}

fn closed_forms(ctx: &PrecisionCtx) -> Check {
    let (one, two) = (alpha("1"), alpha("2"));
    let mut worst: f64 = 0.0;
    for i in 0..=20 {
        let z = ctx.real(0.5 * f64::from(i));
        let c = cauchy(&z);
        let g = gauss(&z, ctx);
        worst = worst.max(diff(&levy_quad(one, &z, ctx)?.value, &c));
        worst = worst.max(diff(&levy_quad(two, &z, ctx)?.value, &g));
        worst = worst.max(diff(&taylor_levy(two, &z, ctx)?.value, &g));
        worst = worst.max(diff(&levy_hyper(two, &z, ctx)?.value, &g));
    }
    Ok((worst <= 1e-30, format!("max deviation {worst:.2e} (bound 1e-30)")))
}

fn cross_method(ctx: &PrecisionCtx) -> Check {
    let mut worst_abs: f64 = 0.0;
    let mut worst_ratio: f64 = 0.0;
    for a in ["3", "4", "5", "6", "3/2", "5/2"] {
        for z in [0.5, 1.0, 2.0, 4.0] {
            let z = ctx.real(z);
            let q = levy_quad(alpha(a), &z, ctx)?;
            for other in [levy_hyper(alpha(a), &z, ctx)?, taylor_levy(alpha(a), &z, ctx)?] {
                let d = diff(&q.value, &other.value);
                worst_abs = worst_abs.max(d);
                let combined = q.err + other.err;
                worst_ratio = worst_ratio.max(if combined > 0.0 { d / combined } else if d > 0.0 { f64::INFINITY } else { 0.0 });
            }
        }
    }
    let ok = worst_abs <= 1e-15 && worst_ratio <= 3.0;
    Ok((ok, format!("max |diff| {worst_abs:.2e}, max diff/estimates {worst_ratio:.2}")))
}

fn even_algebraic(ctx: &PrecisionCtx) -> Check {
    let mut nonzero = 0;
    for a in [4, 6, 8] {
        for z in [1.0, 10.0, 37.5] {
            nonzero += algebraic_series(a, &ctx.real(z), 60)?.iter().filter(|t| !t.is_zero()).count();
        }
    }
    Ok((nonzero == 0, format!("{nonzero} nonzero terms for alpha in {{4, 6, 8}}")))
}

// |asym - quad| / envelope at alpha = 4
fn normalised_asym_error(z: f64, opts: &AsymOptions, ctx: &PrecisionCtx) -> Result<f64> {
    let four = alpha("4");
    let z = ctx.real(z);
    let q = levy_quad(four, &z, ctx)?;
    let s = levy_asym_with(four, &z, ctx, opts)?;
    Ok(diff(&q.value, &s.value) / envelope(4, &z, ctx)?)
}

fn asym_vs_oracle(ctx: &PrecisionCtx) -> Check {
    let zs = [8.0, 10.0, 12.0, 14.0];
    let low = AsymOptions { exponential: Truncation::Fixed(2), ..AsymOptions::default() };
    let opt = AsymOptions::default();
    let mut low_err = Vec::new();
    let mut opt_err = Vec::new();
    for z in zs {
        low_err.push(normalised_asym_error(z, &low, ctx)?);
        opt_err.push(normalised_asym_error(z, &opt, ctx)?);
    }
    let low_max = low_err.iter().cloned().fold(0.0, f64::max);
    let opt_max = opt_err.iter().cloned().fold(0.0, f64::max);
    let monotone = opt_err.windows(2).all(|w| w[1] <= w[0]);
    let ok = low_max <= 1e-2 && opt_max <= 1e-3 && monotone;
    let fmt = |v: &[f64]| v.iter().map(|e| format!("{e:.1e}")).collect::<Vec<_>>().join(" ");
    Ok((ok, format!("m<=1 [{}], optimal [{}], non-increasing {monotone}", fmt(&low_err), fmt(&opt_err))))
}

fn nk_correction(ctx: &PrecisionCtx) -> Check {
    let mut bad = Vec::new();
    let mut shown = Vec::new();
    for a in [3u32, 4, 5, 6] {
        for z in [12.0, 14.0] {
            let al = AlphaParam::integer(a)?;
            let zr = ctx.real(z);
            let q = levy_quad(al, &zr, ctx)?;
            let err_with = |n| -> Result<f64> {
                let o = AsymOptions { exponential: Truncation::Fixed(n), ..AsymOptions::default() };
                Ok(diff(&q.value, &levy_asym_with(al, &zr, ctx, &o)?.value))
            };
            let (e0, e1) = (err_with(1)?, err_with(2)?);
            shown.push(format!("{a}@{z}: {:.0e}", e1 / e0));
            if !(e1 < e0) {
                bad.push(format!("alpha {a} z {z}"));
            }
        }
    }
    let detail = if bad.is_empty() {
        format!("error ratio with/without N_1 [{}]", shown.join(", "))
    } else {
        format!("no improvement at {}", bad.join(", "))
    };
    Ok((bad.is_empty(), detail))
}

// cos of the leading k = 0 phase at order zero
fn leading_cosine(a: u32, z: f64) -> f64 {
    use std::f64::consts::PI;
    let af = f64::from(a);
    let x = (z / af).powf(af / (af - 1.0));
    let ph = (af - 1.0) * (PI / (2.0 * (af - 1.0))).cos();
    (ph * x + (2.0 - af) * PI / (4.0 * (af - 1.0))).cos()
}

fn puredecay_structure(ctx: &PrecisionCtx) -> Check {
    let mut wrong = Vec::new();
    for a in 3u32..=10 {
        let expected = a == 6 || a == 10;
        let z = ctx.real(2.5 * f64::from(a));
        let b = asym_breakdown(AlphaParam::integer(a)?, &z, ctx, &AsymOptions::default())?;
        if has_puredecay(a) != expected || b.puredecay.is_some() != expected {
            wrong.push(a);
        }
    }
    // a z >= 12 where the k = 0 cosine nearly vanishes
    let z = (0..=2000)
        .map(|i| 12.0 + 0.001 * f64::from(i))
        .find(|&z| leading_cosine(6, z).abs() <= 0.05)
        .ok_or_else(|| Error::InvalidParameter("no near-zero of the leading cosine in [12, 14]".into()))?;
    let six = alpha("6");
    let zr = ctx.real(z);
    let q = levy_quad(six, &zr, ctx)?;
    let with = levy_asym_with(six, &zr, ctx, &AsymOptions::default())?;
    let without = levy_asym_with(six, &zr, ctx, &AsymOptions { with_puredecay: false, ..AsymOptions::default() })?;
    let (e_with, e_without) = (diff(&q.value, &with.value), diff(&q.value, &without.value));
    let ok = wrong.is_empty() && e_without > e_with;
    Ok((
        ok,
        format!(
            "presence mismatches {wrong:?}; alpha 6 at z = {z:.3} (cos {:.3}): error {e_with:.1e} with, {e_without:.1e} without",
            leading_cosine(6, z)
        ),
    ))
}

fn inversion(ctx: &PrecisionCtx) -> Check {
    let mut worst_ratio: f64 = 0.0;
    let mut theta: f64 = 0.0;
    for a in ["2", "3", "4", "3/2"] {
        for s in [0.05, 0.1, 0.5, 1.0] {
            let p = EJParams::new(alpha(a), ctx.real(s))?;
            let d = ej_direct(&p, ctx)?;
            let i = ej_inversion(&p, ctx)?;
            let gap = diff(&d.value, &i.value);
            let combined = d.err + i.err;
            let r = if combined > 0.0 { gap / combined } else if gap > 0.0 { f64::INFINITY } else { 0.0 };
            worst_ratio = worst_ratio.max(r);
            if a == "2" {
                theta = theta.max(gap);
            }
        }
    }
    let ok = worst_ratio <= 3.0 && theta <= 1e-25;
    Ok((ok, format!("max gap/estimates {worst_ratio:.2}, theta case max gap {theta:.1e}")))
}

fn moments(ctx: &PrecisionCtx) -> Check {
    let near = |r: EvalResult, want: f64, tol: f64| (r.to_f64() - want).abs() <= tol;
    let m42 = near(moment_quad(alpha("4"), 2, ctx)?, -24.0, 1e-8);
    let m41 = near(moment_quad(alpha("4"), 1, ctx)?, 0.0, 1e-10);
    let m63 = near(moment_quad(alpha("6"), 3, ctx)?, 720.0, 1e-6);
    let div = matches!(moment_quad(alpha("3"), 2, ctx), Err(Error::DivergentMoment { .. }));
    Ok((m42 && m41 && m63 && div, format!("(4,2) {m42}, (4,1) {m41}, (6,3) {m63}, (3,2) divergent {div}")))
}

fn pearcey(ctx: &PrecisionCtx) -> Check {
    let mut worst: f64 = 0.0;
    for y in [0.0, 1.0, 2.0] {
        worst = worst.max(pearcey_relation_check(&ctx.real(y), ctx)?);
    }
    Ok((worst <= 1e-6, format!("max residual {worst:.2e}")))
}

fn waring(ctx: &PrecisionCtx) -> Check {
    let mut failed = Vec::new();
    for (k, s) in [(2, 2), (2, 3), (4, 2)] {
        let c = waring_genfun_check(k, s, 1.0, 200, ctx)?;
        if !c.passed {
            failed.push(format!("({k},{s}) residual {:.1e}", c.residual));
        }
    }
    let (r5, r25) = (waring_count(2, 2, 5)?, waring_count(2, 2, 25)?);
    let ok = failed.is_empty() && r5 == 8 && r25 == 12;
    Ok((ok, format!("r(5) = {r5}, r(25) = {r25}, generating-function failures {failed:?}")))
}

fn zeros(ctx: &PrecisionCtx) -> Check {
    // signs only need a few digits beyond the envelope at z = 30
    let scan = ctx.with_digits(ctx.digits.min(25));
    let n4 = real_zeros(alpha("4"), &scan.real(12), &scan)?.len();
    let n3 = real_zeros(alpha("3"), &scan.real(20), &scan)?.len();
    let n2 = real_zeros(alpha("2"), &scan.real(20), &scan)?.len();
    let far = real_zeros(alpha("4"), &scan.real(30), &scan)?;
    let rate = |z: f64| 3f64.sqrt() / 2.0 * (z / 4.0).powf(1.0 / 3.0);
    let mut worst: f64 = f64::INFINITY;
    if far.len() >= 4 {
        worst = far[far.len() - 4..]
            .windows(2)
            .map(|w| {
                let period = 2.0 * (w[1] - w[0]);
                let want = 2.0 * std::f64::consts::PI / rate(0.5 * (w[0] + w[1]));
                (period / want - 1.0).abs()
            })
            .fold(0.0, f64::max);
    }
    let ok = n4 >= 3 && n3 >= 1 && n2 == 0 && worst <= 0.05;
    Ok((ok, format!("counts 4:{n4} 3:{n3} 2:{n2}; spacing mismatch {:.2}%", 100.0 * worst)))
}

// (1/π) F_{3/2} at each point, fanned across threads in index order
fn stable_density(points: &[f64], ctx: &PrecisionCtx) -> Result<Vec<f64>> {
    let a = alpha("3/2");
    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(16);
    let chunk = points.len().div_ceil(workers).max(1);
    let parts: Vec<Result<Vec<f64>>> = thread::scope(|s| {
        let handles: Vec<_> = points
            .chunks(chunk)
            .map(|c| {
                s.spawn(move || {
                    c.iter()
                        .map(|&x| Ok(levy_quad(a, &ctx.real(x), ctx)?.to_f64() / std::f64::consts::PI))
                        .collect()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut out = Vec::with_capacity(points.len());
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

fn convolution(ctx: &PrecisionCtx) -> Check {
    const L: f64 = 40.0;
    const H: f64 = 0.01;
    // the grid, not the digits, limits this check
    let c = ctx.with_digits(PrecisionCtx::MIN_DIGITS);
    let n = (L / H).round() as usize;
    let half: Vec<f64> = (0..=n).map(|i| i as f64 * H).collect();
    let g_half = stable_density(&half, &c)?;
    let scale = 2f64.powf(-2.0 / 3.0);
    let target_pts: Vec<f64> = half.iter().map(|x| scale * x).collect();
    let target = stable_density(&target_pts, &c)?;
    // full symmetric grid, index i ↔ x = (i - n) H
    let g: Vec<f64> = (0..=2 * n).map(|i| g_half[i.abs_diff(n)]).collect();
    let mut worst: f64 = 0.0;
    for (i, t) in target.iter().enumerate() {
        // (g⋆g)(x_i) for x_i = i H ≥ 0, over j with x_i - x_j on the grid
        let xi = n + i;
        let mut s = 0.0;
        for (j, gj) in g.iter().enumerate() {
            if let Some(k) = (xi + n).checked_sub(j) {
                if k <= 2 * n {
                    s += gj * g[k];
                }
            }
        }
        worst = worst.max((s * H - scale * t).abs());
    }
    Ok((worst <= 1e-4, format!("max deviation {worst:.2e} over {} points", 2 * n + 1)))
}

fn dimensional(ctx: &PrecisionCtx) -> Check {
    let mut gauss_dev: f64 = 0.0;
    let mut cauchy_dev: f64 = 0.0;
    let bits = ctx.bits();
    for r in [0.0, 1.0, 2.0] {
        let rr = ctx.real(r);
        let g = levy_density_d(alpha("2"), 3, &rr, ctx)?;
        let four_pi = Float::with_val(bits, ctx.pi() * 4u32);
        let want = four_pi.pow(-1.5f64) * (-Float::with_val(bits, rr.square_ref()) / 4u32).exp();
        gauss_dev = gauss_dev.max(diff(&g.value, &want));
        let c = levy_density_d(alpha("1"), 2, &rr, ctx)?;
        let base = (Float::with_val(bits, rr.square_ref()) + 1u32).pow(-1.5f64);
        let want = base / Float::with_val(bits, ctx.pi() * 2u32);
        cauchy_dev = cauchy_dev.max(diff(&c.value, &want));
    }
    let ok = gauss_dev <= 1e-12 && cauchy_dev <= 1e-10;
    Ok((ok, format!("d=3 Gaussian {gauss_dev:.1e}, d=2 Cauchy {cauchy_dev:.1e}")))
}
