use std::fmt;

use crate::numkernel::XReal;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes shared by every evaluator.
#[derive(Debug, Clone)]
pub enum Error {
    /// Gamma evaluated at a nonpositive integer.
    Pole { x: f64 },
    /// Argument outside the mathematical domain of the function.
    Domain(String),
    /// A parameter violates a documented precondition.
    InvalidParameter(String),
    /// The panel or term budget ran out before the error estimate passed.
    ToleranceNotMet { best: XReal, achieved: f64, target: f64 },
    /// The requested moment is infinite; `sign` is +1 or -1.
    DivergentMoment { sign: i8 },
    /// An alternating series lost too many digits to cancellation.
    Cancellation { max_term_log10: f64, value_log10: f64, allowed_log10: f64 },
    /// The series does not converge for this parameter.
    Divergence(String),
    MaxTermsExceeded { terms: usize },
    /// The assembled hypergeometric representation disagrees with the
    /// quadrature oracle by a constant factor.
    PrefactorCalibration { p: u32, q: u32, ratio: f64 },
    OutsideAsymptoticRegime { z: f64, z_min: f64, reason: String },
    BudgetExceeded { requested: u64, limit: u64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Pole { x } => write!(f, "PoleError: gamma has a pole at {x}"),
            Error::Domain(msg) => write!(f, "DomainError: {msg}"),
            Error::InvalidParameter(msg) => write!(f, "InvalidParameter: {msg}"),
            Error::ToleranceNotMet { best, achieved, target } => write!(
                f,
                "ToleranceNotMet: best value {} with error estimate {achieved:.3e} (target {target:.3e})",
                best.to_f64()
            ),
            Error::DivergentMoment { sign } => {
                let s = if *sign > 0 { "+" } else { "-" };
                write!(f, "DivergentMoment: the moment diverges to {s}infinity")
            }
            Error::Cancellation { max_term_log10, value_log10, allowed_log10 } => write!(
                f,
                "CancellationError: largest term 1e{max_term_log10:.1} against value 1e{value_log10:.1} exceeds the allowed ratio 1e{allowed_log10:.0}"
            ),
            Error::Divergence(msg) => write!(f, "DivergenceError: {msg}"),
            Error::MaxTermsExceeded { terms } => {
                write!(f, "MaxTermsExceeded: no convergence after {terms} terms")
            }
            Error::PrefactorCalibration { p, q, ratio } => write!(
                f,
                "PrefactorCalibrationError: hypergeometric assembly for alpha={p}/{q} is off from quadrature by factor {ratio}"
            ),
            Error::OutsideAsymptoticRegime { z, z_min, reason } => write!(
                f,
                "OutsideAsymptoticRegime: z={z} (z_min={z_min}): {reason}"
            ),
            Error::BudgetExceeded { requested, limit } => {
                write!(f, "BudgetExceeded: {requested} exceeds enumeration budget {limit}")
            }
        }
    }
}

impl std::error::Error for Error {}
