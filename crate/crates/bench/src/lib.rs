//! Shared inputs for the benchmarks.

use levyint_core::{AlphaParam, PrecisionCtx};

/// Precisions the benchmarks sweep.
pub const DIGITS: [u32; 2] = [30, 60];

pub fn alpha(s: &str) -> AlphaParam {
    s.parse().expect("literal alpha")
}

pub fn ctx(digits: u32) -> PrecisionCtx {
    PrecisionCtx::new(digits)
}
