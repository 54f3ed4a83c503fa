//! Exact rational scalars and the positive/negative-part clamps.
//!
//! [`Rational`] is an arbitrary-precision fraction kept in canonical form
//! (reduced, positive denominator) by construction; every arithmetic
//! operation is exact. It is the scalar of all optimization-side math in
//! this crate.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::{Error, Result};

/// Arbitrary-precision fraction in canonical form: `gcd(|num|, den) = 1`,
/// `den > 0`. Canonicalization is re-established by every operation.
pub type Rational = num_rational::BigRational;

/// Builds a [`Rational`] from machine integers. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Positive part `[c]⁺ = max{c, 0}`.
pub fn pos_part(c: &Rational) -> Rational {
    if c.is_positive() {
        c.clone()
    } else {
        Rational::zero()
    }
}

/// Negative part `[c]⁻ = min{c, 0}`.
pub fn neg_part(c: &Rational) -> Rational {
    if c.is_negative() {
        c.clone()
    } else {
        Rational::zero()
    }
}

/// Parses `"a/b"` or `"a"` (optionally signed, ASCII digits) into a
/// canonical [`Rational`].
pub fn parse_rational(s: &str) -> Result<Rational> {
    let err = |reason: &str| Error::ParseFraction {
        input: s.to_string(),
        reason: reason.to_string(),
    };
    let t = s.trim();
    let (num_str, den_str) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num_str.parse().map_err(|_| err("invalid numerator"))?;
    let den: BigInt = den_str.parse().map_err(|_| err("invalid denominator"))?;
    if den.is_zero() {
        return Err(err("denominator is zero"));
    }
    Ok(Rational::new(num, den))
}

/// Formats a canonical [`Rational`] as `"a/b"`, or `"a"` when the
/// denominator is 1. Round-trips exactly through [`parse_rational`].
pub fn format_rational(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn pos_part_clamps() {
        assert_eq!(pos_part(&rat(3, 5)), rat(3, 5));
        assert_eq!(pos_part(&rat(-7, 40)), Rational::zero());
        assert_eq!(pos_part(&Rational::zero()), Rational::zero());
    }

    #[test]
    fn neg_part_clamps() {
        assert_eq!(neg_part(&rat(3, 5)), Rational::zero());
        assert_eq!(neg_part(&rat(-2, 1)), rat(-2, 1));
        assert_eq!(neg_part(&Rational::zero()), Rational::zero());
    }

    #[test]
    fn canonical_form_preserved_by_arithmetic() {
        let a = rat(6, 4); // canonicalizes to 3/2
        assert_eq!((a.numer().to_string(), a.denom().to_string()), ("3".into(), "2".into()));
        let b = rat(-10, 15); // -2/3, positive denominator
        assert_eq!((b.numer().to_string(), b.denom().to_string()), ("-2".into(), "3".into()));
        let prod = &a * &b;
        assert_eq!(prod, rat(-1, 1));
        // (a/b)·(b/a) = 1 for nonzero a, b
        let x = rat(17, 39);
        assert_eq!(&x * x.recip(), Rational::one());
    }

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3/10", "-7/40", "0", "4", "-12", "10/3"] {
            let x = parse_rational(s).unwrap();
            assert_eq!(format_rational(&x), s);
            assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x);
        }
        // Non-canonical input parses to canonical form.
        assert_eq!(format_rational(&parse_rational("6/4").unwrap()), "3/2");
        assert_eq!(format_rational(&parse_rational("5/-10").unwrap()), "-1/2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1/2/3").is_err());
    }
}
