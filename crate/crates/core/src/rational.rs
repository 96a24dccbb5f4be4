//! Exact rationals and the text formats used in reports.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

/// Arbitrary-precision fraction, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `numer / 12`, the common shape of every class-number quantity.
pub fn twelfths(numer: i128) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(12))
}

/// Serializes as `num/den`, omitting the denominator when it is 1.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// Rounds to 12 significant digits and prints the shortest decimal that
/// round-trips the rounded value.
pub fn format_real(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{:.11e}", x).parse().unwrap_or(x);
    if rounded == 0.0 {
        return "0".to_string();
    }
    format!("{}", rounded)
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Exact comparison of a rational with a double (no rounding of `r`).
pub fn cmp_with_f64(r: &Rational, x: f64) -> Ordering {
    if x.is_nan() {
        panic!("comparison with NaN");
    }
    if x == f64::INFINITY {
        return Ordering::Less;
    }
    if x == f64::NEG_INFINITY {
        return Ordering::Greater;
    }
    let exact = Rational::from_float(x).expect("finite double");
    r.cmp(&exact)
}
