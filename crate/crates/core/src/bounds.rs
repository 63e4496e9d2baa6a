//! Union-bound calculators and Pach-size thresholds.
//!
//! Log values are reported as `f64`; whether the underlying quantity is below
//! one is decided separately by an exact big-integer comparison, so signs are
//! certified even when the float is close to zero.

use num_bigint::BigInt;
use num_traits::{One, Pow};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{binomial, ln_bigint};

/// Exact comparisons are skipped past this many bits; the float is then
/// trusted only when it clears [`LOG_MARGIN`].
pub const EXACT_BIT_LIMIT: u64 = 1 << 24;
pub const LOG_MARGIN: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("sign of log-bound {value} cannot be certified")]
    Uncertified { value: f64 },
    #[error("threshold {value} is within rounding distance of an integer")]
    AmbiguousRounding { value: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogBound {
    /// Natural log of the bound.
    pub ln_value: f64,
    /// The bound is strictly below 1.
    pub below_one: bool,
    /// `below_one` came from an exact comparison.
    pub exact: bool,
}

impl LogBound {
    fn certify(ln_value: f64, exact_lhs_rhs: Option<(BigInt, BigInt)>) -> Result<Self, BoundError> {
        match exact_lhs_rhs {
            Some((num, den)) => Ok(Self {
                ln_value,
                below_one: num < den,
                exact: true,
            }),
            None if ln_value.abs() > LOG_MARGIN => Ok(Self {
                ln_value,
                below_one: ln_value < 0.0,
                exact: false,
            }),
            None => Err(BoundError::Uncertified { value: ln_value }),
        }
    }
}

fn check(n: u64, d: u32, m: u64) -> Result<(), BoundError> {
    if n == 0 || d == 0 || m == 0 || m > n {
        return Err(BoundError::InvalidParameters(format!("n = {n}, d = {d}, m = {m}")));
    }
    Ok(())
}

/// `ln[C(n,m)^{d+1} · n^{d²} · 2^{−m^{d+1}}]`.
pub fn sphere_union_bound(n: u64, d: u32, m: u64) -> Result<LogBound, BoundError> {
    check(n, d, m)?;
    let c = binomial(n, m);
    let exponent = (m as f64).powi(d as i32 + 1);
    let ln_value = (d + 1) as f64 * ln_bigint(&c) + (d * d) as f64 * (n as f64).ln()
        - exponent * std::f64::consts::LN_2;
    let exact = (exponent < EXACT_BIT_LIMIT as f64).then(|| {
        let lhs = Pow::pow(&c, d + 1) * Pow::pow(BigInt::from(n), d * d);
        let rhs = BigInt::one() << m.pow(d + 1);
        (lhs, rhs)
    });
    LogBound::certify(ln_value, exact)
}

/// `ln[C(n,m)^{d+1} · 2 · (1 − 2^{−d−1})^{m^d}]`.
pub fn coloring_union_bound(n: u64, d: u32, m: u64) -> Result<LogBound, BoundError> {
    check(n, d, m)?;
    let c = binomial(n, m);
    let edges = (m as f64).powi(d as i32);
    let q = 1.0 - 0.5f64.powi(d as i32 + 1);
    let ln_value = (d + 1) as f64 * ln_bigint(&c) + std::f64::consts::LN_2 + edges * q.ln();
    let exact = ((d + 1) as f64 * edges < EXACT_BIT_LIMIT as f64).then(|| {
        // C^{d+1}·2·(2^{d+1}−1)^{m^d} against 2^{(d+1)m^d}
        let e = m.pow(d);
        let base = (BigInt::one() << (d + 1)) - 1;
        let lhs = Pow::pow(&c, d + 1) * 2 * Pow::pow(base, e);
        let rhs = BigInt::one() << ((d as u64 + 1) * e);
        (lhs, rhs)
    });
    LogBound::certify(ln_value, exact)
}

fn ceil_certified(value: f64) -> Result<u64, BoundError> {
    let nearest = value.round();
    if (value - nearest).abs() < 1e-9 * value.max(1.0) {
        return Err(BoundError::AmbiguousRounding { value });
    }
    Ok(value.ceil() as u64)
}

/// `⌈2 (ln n)^{1/d}⌉`.
pub fn pach_threshold_sphere(n: u64, d: u32) -> Result<u64, BoundError> {
    if n < 2 || d == 0 {
        return Err(BoundError::InvalidParameters(format!("n = {n}, d = {d}")));
    }
    ceil_certified(2.0 * (n as f64).ln().powf(1.0 / d as f64))
}

/// `⌈25 (ln n)^{1/(d−1)}⌉`, defined for `d ≥ 2`.
pub fn pach_threshold_coloring(n: u64, d: u32) -> Result<u64, BoundError> {
    if n < 2 || d < 2 {
        return Err(BoundError::InvalidParameters(format!("n = {n}, d = {d}")));
    }
    ceil_certified(25.0 * (n as f64).ln().powf(1.0 / (d - 1) as f64))
}

/// The constant in the coloring upper bound `f(n) ≤ 30 (ln n)^{1/(d−1)}`.
pub const COLORING_UPPER_CONSTANT: u64 = 30;
/// The constant in the sphere upper bound `f(n) ≤ 2 (ln n)^{1/d}`.
pub const SPHERE_UPPER_CONSTANT: u64 = 2;

/// `30 (ln n)^{1/(d−1)}`, for reporting next to experiments.
pub fn coloring_upper_estimate(n: u64, d: u32) -> f64 {
    COLORING_UPPER_CONSTANT as f64 * (n as f64).ln().powf(1.0 / (d.max(2) - 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_bound_single_vertex() {
        let b = sphere_union_bound(1, 2, 1).unwrap();
        assert!((b.ln_value + std::f64::consts::LN_2).abs() < 1e-12);
        assert!(b.below_one && b.exact);
    }

    #[test]
    fn sphere_bound_large_n() {
        let m = pach_threshold_sphere(1_000_000, 2).unwrap();
        assert_eq!(m, 8);
        // exact evaluation puts m = 8 just above 1; the bound first drops below 1 at m = 9
        let b = sphere_union_bound(1_000_000, 2, m).unwrap();
        assert!(b.exact && !b.below_one);
        assert!((b.ln_value - 0.129046).abs() < 1e-4, "{}", b.ln_value);
        let next = sphere_union_bound(1_000_000, 2, 9).unwrap();
        assert!(next.exact && next.below_one);
        assert!((next.ln_value + 115.429058).abs() < 1e-3);
    }

    #[test]
    fn thresholds() {
        assert_eq!(pach_threshold_sphere(55, 2).unwrap(), 5);
        assert_eq!(pach_threshold_sphere(3, 1).unwrap(), 3);
        assert_eq!(pach_threshold_coloring(100, 2).unwrap(), 116);
        assert_eq!(pach_threshold_coloring(1000, 2).unwrap(), 173);
        assert!(pach_threshold_coloring(100, 1).is_err());
    }

    #[test]
    fn coloring_bound_at_threshold() {
        let b = coloring_union_bound(1000, 2, 173).unwrap();
        assert!(b.exact && b.below_one);
        assert!(b.ln_value < -2000.0);
        let small = coloring_union_bound(10, 2, 2).unwrap();
        assert!(!small.below_one);
    }

    #[test]
    fn float_and_exact_signs_agree() {
        for n in [2u64, 5, 10, 50, 200] {
            for m in 1..=n.min(12) {
                let s = sphere_union_bound(n, 2, m).unwrap();
                if s.ln_value.abs() > 1e-6 {
                    assert_eq!(s.below_one, s.ln_value < 0.0, "sphere n={n} m={m}");
                }
                let c = coloring_union_bound(n, 2, m).unwrap();
                if c.ln_value.abs() > 1e-6 {
                    assert_eq!(c.below_one, c.ln_value < 0.0, "coloring n={n} m={m}");
                }
            }
        }
    }

    #[test]
    fn invalid_parameters() {
        assert!(sphere_union_bound(3, 2, 4).is_err());
        assert!(coloring_union_bound(3, 2, 0).is_err());
        assert!(pach_threshold_sphere(1, 2).is_err());
    }
}
