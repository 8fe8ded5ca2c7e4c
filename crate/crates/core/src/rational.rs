//! Arbitrary precision rationals and their `p/q` text form.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Result, TautError};

pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Lowest terms, `p` or `p/q` with `q > 1`.
pub fn format(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || TautError::Json(format!("not a rational: `{s}`"));
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() || d.is_negative() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

/// `(2k - 1)!!` with the convention `(-1)!! = 1`, indexed by `k >= 0`.
pub fn odd_double_factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(2 * i - 1))
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_in_lowest_terms() {
        assert_eq!(format(&frac(2, 4)), "1/2");
        assert_eq!(format(&frac(-6, 3)), "-2");
        assert_eq!(format(&frac(3, -9)), "-1/3");
    }

    #[test]
    fn parses_back() {
        assert_eq!(parse_rational("-1/8").unwrap(), frac(-1, 8));
        assert_eq!(parse_rational("30").unwrap(), int(30));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn double_factorials() {
        assert_eq!(odd_double_factorial(0), BigInt::from(1));
        assert_eq!(odd_double_factorial(3), BigInt::from(15));
        assert_eq!(factorial(5), BigInt::from(120));
    }
}
