//! Exact rational helpers: `"num/den"` strings, simplest rationals in an
//! interval, and natural logarithms of big integers.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("malformed rational {0:?}; expected \"num/den\"")]
pub struct ParseRationalError(pub String);

/// Canonical `"num/den"` with `den > 0` and `gcd = 1`; integers keep `/1`.
pub fn format_rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Accepts `"num/den"` or a bare integer.
pub fn parse_rational(s: &str) -> Result<BigRational, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err())?;
    let den: BigInt = den.parse().map_err(|_| err())?;
    if den.is_zero() {
        return Err(err());
    }
    Ok(BigRational::new(num, den))
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

/// A rational of small height strictly between `lo` and `hi` (`lo < hi`),
/// found by walking the continued-fraction (Stern–Brocot) expansion.
pub fn simplest_between(lo: &BigRational, hi: &BigRational) -> BigRational {
    assert!(lo < hi, "empty interval");
    let fl = lo.floor();
    let next = &fl + BigRational::one();
    if &next < hi {
        // an integer fits; prefer the one closest to zero
        if lo.is_negative() && hi.is_positive() {
            return BigRational::zero();
        }
        if hi.is_positive() || hi.is_zero() {
            return next;
        }
        let top = hi.ceil() - BigRational::one();
        return top;
    }
    // lo and hi share the integer part `fl` (hi may equal fl + 1)
    let a = lo - &fl;
    let b = hi - &fl;
    if a.is_zero() {
        // (0, b): the largest unit fraction 1/k < b
        let k = (b.recip()).floor() + BigRational::one();
        return fl + k.recip();
    }
    fl + simplest_between(&b.recip(), &a.recip()).recip()
}

/// `ln x` for a positive big integer, via the top 64 bits and the binary exponent.
pub fn ln_bigint(x: &BigInt) -> f64 {
    assert_eq!(x.sign(), Sign::Plus, "logarithm of a non-positive integer");
    let bits = x.bits();
    if bits <= 64 {
        return x.to_f64().expect("fits").ln();
    }
    let shift = bits - 64;
    let top: BigInt = x >> shift;
    top.to_f64().expect("fits").ln() + shift as f64 * std::f64::consts::LN_2
}

/// `ln q` for a positive rational.
pub fn ln_rational(q: &BigRational) -> f64 {
    ln_bigint(q.numer()) - ln_bigint(q.denom())
}

/// `C(n, k)` exactly.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc = acc.div_floor(&BigInt::from(i + 1));
    }
    acc
}

/// Serde adapter writing a rational as its `"num/den"` string.
pub mod as_string {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let raw = String::deserialize(d)?;
        parse_rational(&raw).map_err(serde::de::Error::custom)
    }
}

/// [`as_string`] for optional rationals.
pub mod as_string_opt {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
        match q {
            Some(q) => s.serialize_some(&format_rational(q)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigRational>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|raw| parse_rational(&raw).map_err(serde::de::Error::custom))
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("6/4").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("-7").unwrap(), int(-7));
        assert_eq!(format_rational(&rat(-6, 4)), "-3/2");
        assert_eq!(format_rational(&int(5)), "5/1");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x/2").is_err());
    }

    #[test]
    fn simplest_between_examples() {
        assert_eq!(simplest_between(&rat(1, 3), &rat(1, 2)), rat(2, 5));
        assert_eq!(simplest_between(&int(0), &int(1)), rat(1, 2));
        assert_eq!(simplest_between(&rat(-1, 2), &rat(3, 2)), int(0));
        assert_eq!(simplest_between(&int(2), &int(5)), int(3));
        assert_eq!(simplest_between(&int(-5), &int(-2)), int(-3));
        assert_eq!(simplest_between(&rat(7, 3), &int(3)), rat(5, 2));
    }

    #[test]
    fn simplest_between_is_strictly_inside() {
        let pairs = [
            (rat(355, 113), rat(22, 7)),
            (rat(-10, 7), rat(-9, 7)),
            (rat(1, 1000000), rat(1, 999999)),
            (rat(-3, 1), rat(-29, 10)),
        ];
        for (lo, hi) in pairs {
            let m = simplest_between(&lo, &hi);
            assert!(lo < m && m < hi, "{m} not in ({lo}, {hi})");
        }
    }

    #[test]
    fn logs_and_binomials() {
        assert_eq!(binomial(10, 3), BigInt::from(120));
        assert_eq!(binomial(3, 5), BigInt::zero());
        let big = BigInt::one() << 200u32;
        assert!((ln_bigint(&big) - 200.0 * std::f64::consts::LN_2).abs() < 1e-9);
        assert!((ln_rational(&rat(1, 8)) + 8f64.ln()).abs() < 1e-12);
    }
}
