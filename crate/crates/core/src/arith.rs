//! Integer and real primitives shared by the formula modules.

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Second-order constant in Robin's unconditional bound for sigma_1.
pub const ROBIN_SECOND: f64 = 0.6482;

/// Residue enumeration is used below this modulus, Tonelli-Shanks above.
const SQRT_MOD_ENUMERATION_LIMIT: u64 = 10_000;

/// The analytic constants of the self-intersection bound.
///
/// `delta = pi / (12 e^gamma)` and `c = e^gamma + 0.6482`; under the Riemann
/// hypothesis variant these become `pi / (6 e^gamma)` and `e^gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundConstants {
    pub gamma: f64,
    pub delta: f64,
    pub c: f64,
    pub rh_mode: bool,
}

impl BoundConstants {
    pub fn unconditional() -> Self {
        let e_gamma = EULER_GAMMA.exp();
        BoundConstants {
            gamma: EULER_GAMMA,
            delta: std::f64::consts::PI / (12.0 * e_gamma),
            c: e_gamma + ROBIN_SECOND,
            rh_mode: false,
        }
    }

    pub fn riemann_hypothesis() -> Self {
        let e_gamma = EULER_GAMMA.exp();
        BoundConstants {
            gamma: EULER_GAMMA,
            delta: std::f64::consts::PI / (6.0 * e_gamma),
            c: e_gamma,
            rh_mode: true,
        }
    }

    pub fn new(rh_mode: bool) -> Self {
        if rh_mode {
            Self::riemann_hypothesis()
        } else {
            Self::unconditional()
        }
    }

    pub fn e_gamma(&self) -> f64 {
        self.gamma.exp()
    }
}

impl Default for BoundConstants {
    fn default() -> Self {
        Self::unconditional()
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Floor of the square root.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x.checked_mul(x).is_none_or(|sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

pub fn is_square(n: u64) -> bool {
    let r = isqrt(n);
    r * r == n
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn require_odd_prime(p: u64) -> Result<()> {
    if p == 2 || !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not an odd prime")));
    }
    Ok(())
}

/// Legendre symbol `(n / p)` for an odd prime `p`.
pub fn legendre(n: i64, p: u64) -> Result<i8> {
    require_odd_prime(p)?;
    Ok(legendre_unchecked(n, p))
}

/// Legendre symbol without the primality check; `p` must be an odd prime.
pub(crate) fn legendre_unchecked(n: i64, p: u64) -> i8 {
    let r = n.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Divisor sum `sum_{d | x} d^order` for a positive integer `x`, and 0 for any
/// other rational (zero, negative, or non-integral).
///
/// # Panics
///
/// If `x` is an integer larger than `u64::MAX`.
pub fn sigma(order: u32, x: &Rational) -> u128 {
    if !x.is_integer() || !x.is_positive() {
        return 0;
    }
    let n = x.to_integer().to_u64().expect("sigma argument exceeds u64");
    sigma_u64(order, n)
}

pub fn sigma_u64(order: u32, n: u64) -> u128 {
    if n == 0 {
        return 0;
    }
    factorize(n).iter().fold(1u128, |acc, &(q, e)| {
        let qk = (q as u128).pow(order);
        // 1 + q^k + q^2k + ... + q^ek
        let mut term = 1u128;
        let mut pow = 1u128;
        for _ in 0..e {
            pow *= qk;
            term += pow;
        }
        acc * term
    })
}

/// Prime factorization by trial division, ascending primes.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut q = 2u64;
    while q * q <= n {
        if n.is_multiple_of(q) {
            let mut e = 0;
            while n.is_multiple_of(q) {
                n /= q;
                e += 1;
            }
            out.push((q, e));
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_squarefree(n: u64) -> bool {
    n >= 1 && factorize(n).iter().all(|&(_, e)| e == 1)
}

/// All divisors of `n`, ascending.
pub fn divisors(n: u64) -> Result<Vec<u64>> {
    if n < 1 {
        return Err(Error::invalid("divisors requires n >= 1"));
    }
    let mut out = divisors_from_factors(&factorize(n));
    out.sort_unstable();
    Ok(out)
}

pub(crate) fn divisors_from_factors(factors: &[(u64, u32)]) -> Vec<u64> {
    let mut out = vec![1u64];
    for &(q, e) in factors {
        let len = out.len();
        let mut pow = 1u64;
        for _ in 0..e {
            pow *= q;
            for i in 0..len {
                out.push(out[i] * pow);
            }
        }
    }
    out
}

/// All `x` in `[0, p)` with `x^2 = a (mod p)`, ascending.
pub fn sqrt_mod(a: i64, p: u64) -> Vec<u64> {
    let a = a.rem_euclid(p as i64) as u64;
    if p < SQRT_MOD_ENUMERATION_LIMIT {
        return (0..p).filter(|&x| mul_mod(x, x, p) == a).collect();
    }
    match tonelli_shanks(a, p) {
        None => Vec::new(),
        Some(0) => vec![0],
        Some(x) => {
            let (lo, hi) = if x < p - x { (x, p - x) } else { (p - x, x) };
            vec![lo, hi]
        }
    }
}

/// One square root of `a` modulo the odd prime `p`, if `a` is a residue.
pub fn tonelli_shanks(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    if s == 1 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    let z = (2..p).find(|&z| pow_mod(z, (p - 1) / 2, p) == p - 1)?;
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// `ln(ln(x))`, defined for `x > 1`.
pub fn loglog(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 1.0 {
        return Err(Error::domain(format!("loglog({x}) requires x > 1")));
    }
    Ok(x.ln().ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre(3, 13).unwrap(), 1);
        assert_eq!(legendre(13, 13).unwrap(), 0);
        assert_eq!(legendre(2, 5).unwrap(), -1);
        assert_eq!(legendre(-1, 5).unwrap(), 1);
        assert!(legendre(3, 9).is_err());
        assert!(legendre(3, 2).is_err());
    }

    #[test]
    fn legendre_is_multiplicative() {
        for p in [5u64, 13, 17, 29] {
            for a in 1..=100i64 {
                for b in 1..=100i64 {
                    assert_eq!(
                        legendre(a * b, p).unwrap(),
                        legendre(a, p).unwrap() * legendre(b, p).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma(1, &rat(6, 1)), 12);
        assert_eq!(sigma(1, &rat(5, 4)), 0);
        assert_eq!(sigma(0, &rat(12, 1)), 6);
        assert_eq!(sigma(1, &rat(0, 1)), 0);
        assert_eq!(sigma(1, &rat(-3, 1)), 0);
        for n in 2..2000u64 {
            assert!(sigma_u64(1, n) > n as u128);
        }
    }

    #[test]
    fn sqrt_mod_examples() {
        assert_eq!(sqrt_mod(4, 5), vec![2, 3]);
        assert!(sqrt_mod(2, 5).is_empty());
        assert_eq!(sqrt_mod(10, 13), vec![6, 7]);
        assert_eq!(sqrt_mod(13, 13), vec![0]);
    }

    #[test]
    fn sqrt_mod_matches_enumeration() {
        for p in (3u64..=97).filter(|&p| is_prime(p)) {
            for a in 0..p {
                let brute: Vec<u64> = (0..p).filter(|x| x * x % p == a).collect();
                assert_eq!(sqrt_mod(a as i64, p), brute);
                for &x in &brute {
                    assert_eq!(x * x % p, a);
                }
                let ts = tonelli_shanks(a, p);
                assert_eq!(ts.is_some(), !brute.is_empty());
                if let Some(x) = ts {
                    assert!(brute.contains(&x));
                }
            }
        }
    }

    #[test]
    fn sqrt_mod_large_prime_uses_tonelli_shanks() {
        // 10009 = 1 + 2^3 * 1251, so the general branch runs.
        let p = 10_009u64;
        for a in [0i64, 1, 2, 4, 9, 17, 1234] {
            for x in sqrt_mod(a, p) {
                assert_eq!(mul_mod(x, x, p), a as u64 % p);
            }
        }
        assert_eq!(sqrt_mod(4, p), vec![2, p - 2]);
    }

    #[test]
    fn divisors_examples() {
        assert_eq!(divisors(1).unwrap(), vec![1]);
        assert_eq!(divisors(12).unwrap(), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(13).unwrap(), vec![1, 13]);
        assert!(divisors(0).is_err());
    }

    #[test]
    fn loglog_examples() {
        let ee = std::f64::consts::E.exp();
        assert!((loglog(ee).unwrap() - 1.0).abs() < 1e-15);
        assert!((loglog(3.0).unwrap() - 0.094_047_827_616_699_02).abs() < 1e-15);
        assert!((loglog(36.0).unwrap() - 1.276_345_261_342_604_6).abs() < 1e-14);
        assert!(loglog(1.0).is_err());
        assert!(loglog(0.5).is_err());
    }

    #[test]
    fn constants() {
        let k = BoundConstants::unconditional();
        assert!((k.gamma - 0.577_215_664_901_532_9).abs() < 1e-15);
        assert!(k.delta > 0.0 && k.c > k.e_gamma());
        let rh = BoundConstants::riemann_hypothesis();
        assert_eq!(rh.delta, 2.0 * k.delta);
        assert_eq!(rh.c, k.e_gamma());
    }

    #[test]
    fn primality_and_isqrt() {
        let brute = |n: u64| {
            n >= 2
                && (2..n)
                    .take_while(|q| q * q <= n)
                    .all(|q| !n.is_multiple_of(q))
        };
        for n in 0..3000 {
            assert_eq!(is_prime(n), brute(n), "{n}");
        }
        assert!(is_prime(1_000_000_007));
        assert_eq!(isqrt(u64::MAX), 4_294_967_295);
        assert_eq!(isqrt(24), 4);
        assert_eq!(isqrt(25), 5);
    }
}
