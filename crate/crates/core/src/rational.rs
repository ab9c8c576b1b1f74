//! Exact rational helpers shared by every module.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

/// `p/q` as an exact rational.
pub fn q(p: i64, d: i64) -> Q {
    Q::new(BigInt::from(p), BigInt::from(d))
}

pub fn q_int(p: i64) -> Q {
    Q::from_integer(BigInt::from(p))
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"0.05"`.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    if let Some((p, d)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(p, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        if fp.is_empty() || !fp.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = ip.starts_with('-');
        let ip_digits = ip.trim_start_matches(['-', '+']);
        let whole: BigInt = if ip_digits.is_empty() {
            BigInt::zero()
        } else {
            ip_digits.parse().map_err(|_| bad())?
        };
        let frac: BigInt = fp.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), fp.len());
        let v = Q::new(whole * &scale + frac, scale);
        return Ok(if neg { -v } else { v });
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Q::from_integer(p))
}

/// Canonical `"p/q"` form (always reduced, always with a denominator).
pub fn format_q(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `-x ln x` with the `0 ln 0 = 0` convention.
pub fn plogp(x: f64) -> f64 {
    if x > 0.0 {
        -x * x.ln()
    } else {
        0.0
    }
}

/// Shannon entropy in nats of exact probabilities.
pub fn entropy_q<'a>(ps: impl IntoIterator<Item = &'a Q>) -> f64 {
    ps.into_iter().map(|p| plogp(to_f64(p))).sum()
}

/// Binary entropy in nats.
pub fn binary_entropy(e: f64) -> f64 {
    plogp(e) + plogp(1.0 - e)
}

pub fn abs_q(x: &Q) -> Q {
    x.abs()
}

pub fn is_integer_multiple(x: &Q, n: u64) -> bool {
    (x * Q::from_integer(BigInt::from(n))).is_integer()
}

pub fn one() -> Q {
    Q::one()
}

pub fn zero() -> Q {
    Q::zero()
}

/// `ln k!` by summation.
pub fn ln_factorial(k: u64) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_forms() {
        assert_eq!(parse_q("1/2").unwrap(), q(1, 2));
        assert_eq!(parse_q("2/4").unwrap(), q(1, 2));
        assert_eq!(parse_q("3").unwrap(), q_int(3));
        assert_eq!(parse_q("0.05").unwrap(), q(1, 20));
        assert_eq!(parse_q("-1.5").unwrap(), q(-3, 2));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn format_roundtrip() {
        let x = q(6, 8);
        assert_eq!(format_q(&x), "3/4");
        assert_eq!(parse_q(&format_q(&x)).unwrap(), x);
        assert_eq!(format_q(&q_int(0)), "0/1");
    }

    #[test]
    fn ln_factorial_small() {
        assert!((ln_factorial(5) - 120f64.ln()).abs() < 1e-12);
        assert_eq!(ln_factorial(0), 0.0);
    }
}
