//! `levyint`: evaluate F_α(z) and its relatives from the command line.
//!
//! Exit codes: 0 pass, 1 a check failed, 2 usage or evaluator error.

mod output;

use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use levyint_core::apps::{bh_kernel, real_zeros};
use levyint_core::asympt::{asym_breakdown, levy_asym_with, AsymOptions, Truncation};
use levyint_core::eulerjacobi::{ej_direct, ej_inversion, waring_genfun_check, EJParams};
use levyint_core::hyper::{levy_hyper, taylor_levy};
use levyint_core::policy::{levy_eval, MethodPolicy, PolicyMode};
use levyint_core::quadrature::{levy_density_d, levy_quad, moment_quad, predicted_moment, PredictedMoment};
use levyint_core::selfcheck::{run_criterion, CRITERIA};
use levyint_core::{AlphaParam, Error, EvalResult, PrecisionCtx, XReal};
use serde::Serialize;

use output::{emit, real, small, Format};

#[derive(Parser)]
#[command(name = "levyint", version, about = "Multi-method evaluation of the Levy integral F_alpha(z)")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Decimal working precision.
    #[arg(long, global = true, env = "LEVYINT_DIGITS", default_value_t = 50)]
    digits: u32,
    /// Target tolerance; 10^(5 - digits) when unset.
    #[arg(long, global = true)]
    eps: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// auto, quad, taylor, hyper or asym.
    #[arg(long, global = true, default_value = "auto")]
    method: String,
    /// Fixed series/asymptotic switch point for the auto method.
    #[arg(long, global = true)]
    z_switch: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// F_alpha(z) with the chosen method.
    Eval {
        #[arg(long)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Every applicable method side by side, checked against quadrature.
    Compare {
        #[arg(long)]
        alpha: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        z: Vec<String>,
    },
    /// Radial stable density in d dimensions.
    Density {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 1)]
        d: u32,
        #[arg(long, value_delimiter = ',', required = true)]
        r: Vec<String>,
    },
    /// Euler-Jacobi series: direct sum against the inversion formula.
    Ej {
        #[arg(long)]
        alpha: String,
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<String>,
    },
    /// Term-by-term breakdown of the large-z expansion.
    AsymTable {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        z: String,
        /// Largest fixed exponential-series order to tabulate.
        #[arg(long, default_value_t = 6)]
        m: usize,
    },
    /// Predicted 2m-th moments beside quadrature.
    Moments {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 4)]
        m_max: u32,
    },
    /// Positive real zeros of F_alpha up to z_max.
    Zeros {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 20.0)]
        z_max: f64,
    },
    /// Sums-of-powers counts against their generating function.
    Waring {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        s: u32,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 200)]
        n: u64,
    },
    /// The closing-gap kernel on a rectangular grid.
    Kernel {
        #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
        x_min: f64,
        #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
        x_max: f64,
        #[arg(long, allow_hyphen_values = true)]
        y_min: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        y_max: Option<f64>,
        /// Points per axis.
        #[arg(long, default_value_t = 11)]
        points: usize,
    },
    /// Runs the acceptance criteria and prints one verdict per line.
    Selfcheck {
        /// Only these criteria.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

/// Whether every check a command ran passed.
enum Outcome {
    Pass,
    Fail,
}

fn outcome(ok: bool) -> Outcome {
    if ok {
        Outcome::Pass
    } else {
        Outcome::Fail
    }
}

struct Env {
    ctx: PrecisionCtx,
    policy: MethodPolicy,
    format: Format,
    sig: usize,
}

impl Env {
    fn new(g: &Global) -> Result<Self> {
        let mut ctx = PrecisionCtx::try_new(g.digits)?;
        if let Some(e) = g.eps {
            ctx = ctx.with_eps(e)?;
        }
        let mode: PolicyMode = g.method.parse()?;
        let policy = MethodPolicy { mode, z_switch_override: g.z_switch };
        Ok(Self { sig: (g.digits - 5) as usize, ctx, policy, format: g.format })
    }

    fn num(&self, s: &str) -> Result<XReal> {
        Ok(self.ctx.parse(s)?)
    }

    fn real(&self, x: &XReal) -> String {
        real(x, self.sig)
    }
}

fn parse_alpha(s: &str) -> Result<AlphaParam> {
    let a: AlphaParam = s.parse().with_context(|| format!("bad --alpha {s:?}"))?;
    if !s.contains('/') && s.parse::<u32>().is_err() {
        eprintln!("alpha {s} taken as {a}");
    }
    Ok(a)
}

#[derive(Serialize)]
struct EvalRow {
    alpha_p: u32,
    alpha_q: u32,
    arg: String,
    value: String,
    err: String,
    method: String,
    terms: usize,
}

impl EvalRow {
    fn new(env: &Env, alpha: AlphaParam, arg: &XReal, r: &EvalResult) -> Self {
        Self {
            alpha_p: alpha.p(),
            alpha_q: alpha.q(),
            arg: env.real(arg),
            value: env.real(&r.value),
            err: small(r.err),
            method: r.method.to_string(),
            terms: r.terms,
        }
    }
}

fn cmd_eval(env: &Env, alpha: &str, z: &str) -> Result<Outcome> {
    let alpha = parse_alpha(alpha)?;
    let z = env.num(z)?;
    let r = levy_eval(alpha, &z, &env.policy, &env.ctx)?;
    emit(&[EvalRow::new(env, alpha, &z, &r)], env.format)?;
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct CompareRow {
    alpha_p: u32,
    alpha_q: u32,
    arg: String,
    value: String,
    err: String,
    method: String,
    terms: usize,
    deviation: String,
    pass: bool,
}

fn cmd_compare(env: &Env, alpha: &str, zs: &[String]) -> Result<Outcome> {
    let alpha = parse_alpha(alpha)?;
    let ctx = &env.ctx;
    let mut rows = Vec::new();
    let mut ok = true;
    for z in zs {
        let z = env.num(z)?;
        let q = levy_quad(alpha, &z, ctx)?;
        let others = [
            ("taylor", taylor_levy(alpha, &z, ctx)),
            ("hyper", levy_hyper(alpha, &z, ctx)),
            ("asym", levy_asym_with(alpha, &XReal::with_val(z.prec(), z.abs_ref()), ctx, &AsymOptions::default())),
        ];
        let mut results = vec![q.clone()];
        for (name, r) in others {
            match r {
                Ok(r) => results.push(r),
                Err(e) => eprintln!("z = {}: {name} not applicable ({e})", z.to_f64()),
            }
        }
        for r in &results {
            let dev = XReal::with_val(ctx.bits(), &r.value - &q.value).abs().to_f64();
            let pass = dev <= 3.0 * (r.err + q.err) || dev == 0.0;
            ok &= pass;
            let base = EvalRow::new(env, alpha, &z, r);
            rows.push(CompareRow {
                alpha_p: base.alpha_p,
                alpha_q: base.alpha_q,
                arg: base.arg,
                value: base.value,
                err: base.err,
                method: base.method,
                terms: base.terms,
                deviation: small(dev),
                pass,
            });
        }
    }
    emit(&rows, env.format)?;
    Ok(outcome(ok))
}

#[derive(Serialize)]
struct DensityRow {
    alpha_p: u32,
    alpha_q: u32,
    d: u32,
    arg: String,
    value: String,
    err: String,
    method: String,
    terms: usize,
}

fn cmd_density(env: &Env, alpha: &str, d: u32, rs: &[String]) -> Result<Outcome> {
    let alpha = parse_alpha(alpha)?;
    let mut rows = Vec::new();
    for r in rs {
        let r = env.num(r)?;
        let v = levy_density_d(alpha, d, &r, &env.ctx)?;
        let b = EvalRow::new(env, alpha, &r, &v);
        rows.push(DensityRow {
            alpha_p: b.alpha_p,
            alpha_q: b.alpha_q,
            d,
            arg: b.arg,
            value: b.value,
            err: b.err,
            method: b.method,
            terms: b.terms,
        });
    }
    emit(&rows, env.format)?;
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct EjRow {
    alpha_p: u32,
    alpha_q: u32,
    arg: String,
    direct: String,
    direct_err: String,
    inversion: String,
    inversion_err: String,
    residual: String,
    pass: bool,
}

fn cmd_ej(env: &Env, alpha: &str, as_: &[String]) -> Result<Outcome> {
    let alpha = parse_alpha(alpha)?;
    let mut rows = Vec::new();
    let mut ok = true;
    for a in as_ {
        let a = env.num(a)?;
        let p = EJParams::new(alpha, a.clone())?;
        let d = ej_direct(&p, &env.ctx)?;
        let i = ej_inversion(&p, &env.ctx)?;
        let res = XReal::with_val(env.ctx.bits(), &d.value - &i.value).abs().to_f64();
        let pass = res <= 3.0 * (d.err + i.err) || res == 0.0;
        ok &= pass;
        rows.push(EjRow {
            alpha_p: alpha.p(),
            alpha_q: alpha.q(),
            arg: env.real(&a),
            direct: env.real(&d.value),
            direct_err: small(d.err),
            inversion: env.real(&i.value),
            inversion_err: small(i.err),
            residual: small(res),
            pass,
        });
    }
    emit(&rows, env.format)?;
    Ok(outcome(ok))
}

#[derive(Serialize)]
struct AsymRow {
    part: &'static str,
    index: usize,
    value: String,
    decay_rate: Option<f64>,
    phase_rate: Option<f64>,
    err: Option<String>,
    oracle_error: Option<String>,
}

fn cmd_asym_table(env: &Env, alpha: &str, z: &str, m: usize) -> Result<Outcome> {
    let alpha = parse_alpha(alpha)?;
    let ctx = &env.ctx;
    let z = env.num(z)?;
    let oracle = levy_quad(alpha, &z, ctx)?;
    let off = |v: &XReal| small(XReal::with_val(ctx.bits(), v - &oracle.value).abs().to_f64());
    let b = asym_breakdown(alpha, &z, ctx, &AsymOptions::default())?;
    let row = |part, index, value: &XReal| AsymRow {
        part,
        index,
        value: env.real(value),
        decay_rate: None,
        phase_rate: None,
        err: None,
        oracle_error: None,
    };
    let mut rows = Vec::new();
    for (i, t) in b.algebraic.iter().enumerate() {
        rows.push(row("algebraic", i + 1, t));
    }
    for o in &b.oscillatory {
        rows.push(AsymRow { decay_rate: Some(o.decay_rate), phase_rate: Some(o.phase_rate), ..row("oscillatory", o.k as usize, &o.partial) });
    }
    if let Some(p) = &b.puredecay {
        rows.push(row("puredecay", 0, p));
    }
    // running error as exponential orders are added
    for n in 1..=m {
        let o = AsymOptions { exponential: Truncation::Fixed(n), ..AsymOptions::default() };
        let r = levy_asym_with(alpha, &z, ctx, &o)?;
        rows.push(AsymRow { err: Some(small(r.err)), oracle_error: Some(off(&r.value)), ..row("truncated", n, &r.value) });
    }
    let total = b.total();
    rows.push(AsymRow { err: Some(small(b.err_estimate)), oracle_error: Some(off(&total)), ..row("optimal", b.m_star, &total) });
    rows.push(AsymRow { err: Some(small(oracle.err)), ..row("oracle", oracle.terms, &oracle.value) });
    emit(&rows, env.format)?;
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct MomentRow {
    alpha_p: u32,
    alpha_q: u32,
    m: u32,
    predicted: String,
    value: Option<String>,
    err: Option<String>,
    agree: bool,
}

fn cmd_moments(env: &Env, alpha: &str, m_max: u32) -> Result<Outcome> {
    let alpha = parse_alpha(alpha)?;
    let ctx = &env.ctx;
    let mut rows = Vec::new();
    let mut ok = true;
    for m in 0..=m_max {
        let pred = predicted_moment(alpha, m);
        let (predicted, want) = match &pred {
            PredictedMoment::Finite(v) => (v.to_string(), Some(v.to_f64())),
            PredictedMoment::Zero => ("0".to_string(), Some(0.0)),
            PredictedMoment::PlusInfinity => ("+inf".to_string(), None),
            PredictedMoment::MinusInfinity => ("-inf".to_string(), None),
        };
        let row = match (moment_quad(alpha, m, ctx), want) {
            (Ok(r), Some(w)) => {
                let tol = (10.0 * r.err).max(ctx.eps * w.abs().max(1.0));
                let agree = (r.to_f64() - w).abs() <= tol;
                MomentRow { alpha_p: alpha.p(), alpha_q: alpha.q(), m, predicted, value: Some(env.real(&r.value)), err: Some(small(r.err)), agree }
            }
            (Err(Error::DivergentMoment { sign }), None) => {
                let agree = (sign > 0) == matches!(pred, PredictedMoment::PlusInfinity);
                MomentRow { alpha_p: alpha.p(), alpha_q: alpha.q(), m, predicted, value: Some(if sign > 0 { "+inf" } else { "-inf" }.into()), err: None, agree }
            }
            (Ok(r), None) => MomentRow { alpha_p: alpha.p(), alpha_q: alpha.q(), m, predicted, value: Some(env.real(&r.value)), err: Some(small(r.err)), agree: false },
            (Err(Error::DivergentMoment { .. }), Some(_)) => {
                MomentRow { alpha_p: alpha.p(), alpha_q: alpha.q(), m, predicted, value: None, err: None, agree: false }
            }
            (Err(e), _) => return Err(e.into()),
        };
        ok &= row.agree;
        rows.push(row);
    }
    emit(&rows, env.format)?;
    Ok(outcome(ok))
}

#[derive(Serialize)]
struct ZeroRow {
    alpha_p: u32,
    alpha_q: u32,
    index: usize,
    zero: String,
}

fn cmd_zeros(env: &Env, alpha: &str, z_max: f64) -> Result<Outcome> {
    let alpha = parse_alpha(alpha)?;
    let zs = real_zeros(alpha, &env.ctx.real(z_max), &env.ctx)?;
    let rows: Vec<ZeroRow> = zs
        .iter()
        .enumerate()
        .map(|(i, z)| ZeroRow { alpha_p: alpha.p(), alpha_q: alpha.q(), index: i + 1, zero: format!("{z:.12}") })
        .collect();
    emit(&rows, env.format)?;
    let floor = 2 * (alpha.p() / (2 * alpha.q()));
    eprintln!(
        "{} positive zeros in (0, {z_max}], {} counting both signs; floor 2[alpha/2] = {floor}",
        zs.len(),
        2 * zs.len()
    );
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct WaringRow {
    k: u32,
    s: u32,
    a: f64,
    n_max: u64,
    residual: String,
    tail_bound: String,
    evaluator_err: String,
    passed: bool,
}

fn cmd_waring(env: &Env, k: u32, s: u32, a: f64, n: u64) -> Result<Outcome> {
    let c = waring_genfun_check(k, s, a, n, &env.ctx)?;
    let row = WaringRow {
        k,
        s,
        a,
        n_max: n,
        residual: small(c.residual),
        tail_bound: small(c.tail_bound),
        evaluator_err: small(c.evaluator_err),
        passed: c.passed,
    };
    emit(&[row], env.format)?;
    Ok(outcome(c.passed))
}

#[derive(Serialize)]
struct KernelRow {
    x: f64,
    y: f64,
    value: String,
    err: String,
}

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn cmd_kernel(env: &Env, x: (f64, f64), y: (f64, f64), points: usize) -> Result<Outcome> {
    let mut rows = Vec::new();
    for &xv in &axis(x.0, x.1, points) {
        for &yv in &axis(y.0, y.1, points) {
            let k = bh_kernel(&env.ctx.real(xv), &env.ctx.real(yv), &env.ctx)?;
            rows.push(KernelRow { x: xv, y: yv, value: env.real(&k.value), err: small(k.err) });
        }
    }
    emit(&rows, env.format)?;
    Ok(Outcome::Pass)
}

fn cmd_selfcheck(env: &Env, only: &[u8]) -> Result<Outcome> {
    let ids: Vec<u8> = if only.is_empty() { (1..=CRITERIA).collect() } else { only.to_vec() };
    let mut ok = true;
    for id in ids {
        let v = run_criterion(id, &env.ctx)?;
        println!("{v}");
        ok &= v.passed;
    }
    println!("{}", if ok { "all criteria passed" } else { "some criteria failed" });
    Ok(outcome(ok))
}

fn run(cli: Cli) -> Result<Outcome> {
    let env = Env::new(&cli.global)?;
    match cli.command {
        Command::Eval { alpha, z } => cmd_eval(&env, &alpha, &z),
        Command::Compare { alpha, z } => cmd_compare(&env, &alpha, &z),
        Command::Density { alpha, d, r } => cmd_density(&env, &alpha, d, &r),
        Command::Ej { alpha, a } => cmd_ej(&env, &alpha, &a),
        Command::AsymTable { alpha, z, m } => cmd_asym_table(&env, &alpha, &z, m),
        Command::Moments { alpha, m_max } => cmd_moments(&env, &alpha, m_max),
        Command::Zeros { alpha, z_max } => cmd_zeros(&env, &alpha, z_max),
        Command::Waring { k, s, a, n } => cmd_waring(&env, k, s, a, n),
        Command::Kernel { x_min, x_max, y_min, y_max, points } => {
            cmd_kernel(&env, (x_min, x_max), (y_min.unwrap_or(x_min), y_max.unwrap_or(x_max)), points)
        }
        Command::Selfcheck { only } => cmd_selfcheck(&env, &only),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
