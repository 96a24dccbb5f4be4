//! Exact arithmetic in the real quadratic field Q(sqrt p) and its
//! fundamental unit.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith;
use crate::error::{Error, Result};
use crate::rational::{format_rational, to_f64, Rational};

/// `a + b sqrt(p)` with rational coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadElement {
    pub a: Rational,
    pub b: Rational,
    pub p: u64,
}

impl QuadElement {
    pub fn new(a: Rational, b: Rational, p: u64) -> Self {
        QuadElement { a, b, p }
    }

    /// `(u + v sqrt(p)) / 2`, the shape of an integer of Q(sqrt p) for p = 1 mod 4.
    pub fn from_half_integers(u: BigInt, v: BigInt, p: u64) -> Self {
        let two = BigInt::from(2);
        QuadElement {
            a: Rational::new(u, two.clone()),
            b: Rational::new(v, two),
            p,
        }
    }

    pub fn from_integer(n: i64, p: u64) -> Self {
        QuadElement {
            a: Rational::from_integer(n.into()),
            b: Rational::zero(),
            p,
        }
    }

    fn p_rat(&self) -> Rational {
        Rational::from_integer(BigInt::from(self.p))
    }

    pub fn conjugate(&self) -> Self {
        QuadElement {
            a: self.a.clone(),
            b: -self.b.clone(),
            p: self.p,
        }
    }

    /// `a^2 - p b^2`.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - self.p_rat() * &self.b * &self.b
    }

    pub fn trace(&self) -> Rational {
        &self.a + &self.a
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Exact sign of the real number `a + b sqrt(p)`.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&Rational::zero());
        let sb = self.b.cmp(&Rational::zero());
        match (sa, sb) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (x, y) if x == y => x,
            (sa, _) => {
                // opposite signs: compare a^2 with p b^2
                let a2 = &self.a * &self.a;
                let pb2 = self.p_rat() * &self.b * &self.b;
                match a2.cmp(&pb2) {
                    Ordering::Greater => sa,
                    Ordering::Less => sa.reverse(),
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    /// Positive with a positive conjugate.
    pub fn is_totally_positive(&self) -> bool {
        self.is_positive() && self.conjugate().is_positive()
    }

    /// Floating value without cancellation: when the coordinates have opposite
    /// signs the value is recovered as `norm / conjugate`.
    pub fn to_f64(&self) -> f64 {
        let same_sign = !(self.a.is_positive() && self.b.is_negative()
            || self.a.is_negative() && self.b.is_positive());
        let sqrt_p = (self.p as f64).sqrt();
        if same_sign {
            to_f64(&self.a) + to_f64(&self.b) * sqrt_p
        } else {
            let conj = to_f64(&self.a) - to_f64(&self.b) * sqrt_p;
            to_f64(&self.norm()) / conj
        }
    }

    pub fn pow(&self, mut exp: u32) -> Self {
        let mut base = self.clone();
        let mut acc = QuadElement::from_integer(1, self.p);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            exp >>= 1;
        }
        acc
    }

    /// Inverse of a unit (norm +-1): `conjugate / norm`.
    pub fn unit_inverse(&self) -> Self {
        let n = self.norm();
        debug_assert!(n.abs().is_one());
        QuadElement {
            a: &self.a / &n,
            b: -(&self.b / &n),
            p: self.p,
        }
    }
}

impl Mul for &QuadElement {
    type Output = QuadElement;

    fn mul(self, rhs: &QuadElement) -> QuadElement {
        debug_assert_eq!(self.p, rhs.p);
        let p = self.p_rat();
        QuadElement {
            a: &self.a * &rhs.a + p * &self.b * &rhs.b,
            b: &self.a * &rhs.b + &self.b * &rhs.a,
            p: self.p,
        }
    }
}

impl Add for &QuadElement {
    type Output = QuadElement;

    fn add(self, rhs: &QuadElement) -> QuadElement {
        QuadElement {
            a: &self.a + &rhs.a,
            b: &self.b + &rhs.b,
            p: self.p,
        }
    }
}

impl Sub for &QuadElement {
    type Output = QuadElement;

    fn sub(self, rhs: &QuadElement) -> QuadElement {
        QuadElement {
            a: &self.a - &rhs.a,
            b: &self.b - &rhs.b,
            p: self.p,
        }
    }
}

impl Neg for QuadElement {
    type Output = QuadElement;

    fn neg(self) -> QuadElement {
        QuadElement {
            a: -self.a,
            b: -self.b,
            p: self.p,
        }
    }
}

impl fmt::Display for QuadElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} + {}*sqrt({})",
            format_rational(&self.a),
            format_rational(&self.b),
            self.p
        )
    }
}

/// Fundamental unit `eps > 1` of Z[(1 + sqrt p)/2] and the smallest totally
/// positive unit `eps_plus > 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FundamentalUnit {
    pub epsilon: QuadElement,
    pub norm: i8,
    pub totally_positive: QuadElement,
}

/// Fundamental unit from the continued fraction of `omega = (1 + sqrt p)/2`.
///
/// The convergents `h/q` of omega are tried in order; the first for which
/// `h - q omega'` has norm +-1 is the fundamental unit.
pub fn fundamental_unit(p: u64) -> Result<FundamentalUnit> {
    if p % 4 != 1 || !arith::is_prime(p) {
        return Err(Error::invalid(format!(
            "fundamental unit needs a prime p = 1 mod 4, got {p}"
        )));
    }
    let d = BigInt::from(p);
    let root = d.sqrt();
    // omega_k = (num + sqrt d) / den, starting at (1 + sqrt p) / 2
    let (mut num, mut den) = (BigInt::one(), BigInt::from(2));
    let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
    let (mut q_prev, mut q) = (BigInt::one(), BigInt::zero());
    let quarter = BigInt::from((p - 1) / 4);
    loop {
        let a = (&num + &root) / &den;
        let h_next = &a * &h + &h_prev;
        let q_next = &a * &q + &q_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        q_prev = std::mem::replace(&mut q, q_next);

        // N(h - q omega) = h^2 - h q - q^2 (p - 1) / 4
        let n = &h * &h - &h * &q - &q * &q * &quarter;
        if n.abs().is_one() {
            // h - q omega' = (2h - q + q sqrt p) / 2
            let two_h = &h * BigInt::from(2);
            let epsilon = QuadElement::from_half_integers(two_h - &q, q.clone(), p);
            let norm: i8 = if n.is_positive() { 1 } else { -1 };
            let totally_positive = if norm == 1 {
                epsilon.clone()
            } else {
                &epsilon * &epsilon
            };
            return Ok(FundamentalUnit {
                epsilon,
                norm,
                totally_positive,
            });
        }

        num = &a * &den - &num;
        den = (&d - &num * &num) / &den;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn elt(a: (i64, i64), b: (i64, i64), p: u64) -> QuadElement {
        QuadElement::new(rat(a.0, a.1), rat(b.0, b.1), p)
    }

    #[test]
    fn ring_arithmetic() {
        let x = elt((1, 2), (1, 2), 5);
        let y = elt((3, 1), (-1, 1), 5);
        let prod = &x * &y;
        // (1/2 + 1/2 s)(3 - s) = 3/2 - 5/2 + (3/2 - 1/2) s
        assert_eq!(prod, elt((-1, 1), (1, 1), 5));
        assert_eq!(prod.norm(), &x.norm() * &y.norm());
        assert_eq!(x.conjugate(), elt((1, 2), (-1, 2), 5));
        assert_eq!(x.norm(), rat(-1, 1));
    }

    #[test]
    fn exact_sign() {
        assert!(elt((3, 1), (-1, 1), 5).is_positive());
        assert!(!elt((2, 1), (-1, 1), 5).is_positive());
        assert!(elt((-2, 1), (1, 1), 5).is_positive());
        assert_eq!(elt((0, 1), (0, 1), 5).signum(), Ordering::Equal);
        assert!(elt((3, 2), (1, 2), 5).is_totally_positive());
        assert!(!elt((1, 2), (1, 2), 5).is_totally_positive());
    }

    #[test]
    fn units_of_small_fields() {
        let u5 = fundamental_unit(5).unwrap();
        assert_eq!(u5.epsilon, elt((1, 2), (1, 2), 5));
        assert_eq!(u5.norm, -1);
        assert_eq!(u5.totally_positive, elt((3, 2), (1, 2), 5));

        let u13 = fundamental_unit(13).unwrap();
        assert_eq!(u13.epsilon, elt((3, 2), (1, 2), 13));
        assert_eq!(u13.norm, -1);

        let u17 = fundamental_unit(17).unwrap();
        assert_eq!(u17.epsilon, elt((4, 1), (1, 1), 17));
        assert_eq!(u17.norm, -1);

        assert!(fundamental_unit(7).is_err());
        assert!(fundamental_unit(21).is_err());
    }

    /// Smallest unit > 1 by brute force over (u + v sqrt p)/2 with small v.
    fn brute_unit(p: u64) -> Option<QuadElement> {
        for v in 1i64..2000 {
            let pv2 = p as i64 * v * v;
            for s in [-4i64, 4] {
                let u2 = pv2 + s;
                if u2 <= 0 {
                    continue;
                }
                let u = arith::isqrt(u2 as u64) as i64;
                if u * u == u2 && (u - v) % 2 == 0 {
                    return Some(QuadElement::from_half_integers(u.into(), v.into(), p));
                }
            }
        }
        None
    }

    #[test]
    fn continued_fraction_matches_brute_force() {
        for p in (5u64..400).filter(|&p| p % 4 == 1 && arith::is_prime(p)) {
            let unit = fundamental_unit(p).unwrap();
            assert!(unit.epsilon.norm().abs().is_one());
            assert!(unit.totally_positive.is_totally_positive());
            assert_eq!(unit.totally_positive.norm(), rat(1, 1));
            if let Some(b) = brute_unit(p) {
                assert_eq!(unit.epsilon, b, "p = {p}");
            }
        }
    }

    #[test]
    fn large_units_evaluate_without_cancellation() {
        let unit = fundamental_unit(9_973).unwrap();
        let e = unit.totally_positive.to_f64();
        let ec = unit.totally_positive.conjugate().to_f64();
        assert!(e > 1.0 && ec > 0.0);
        assert!((e * ec - 1.0).abs() < 1e-12);
    }
}
