//! Self-intersection numbers of Hirzebruch-Zagier curves `T_N`.
//!
//! ```text
//! T_N^2 = 1/2 sum_{n | N} n (H_p(N^2/n^2) + I_p(N^2/n^2)) (chi_p(n) + chi_p(NA/n))
//! H_p(n) = sum_{x^2 <= 4n, x^2 = 4n mod p} H((4n - x^2) / p)
//! I_p(n) = p^{-1/2} sum_{lambda >> 0, N(lambda) = n} min(lambda, lambda')
//! ```
//!
//! The compact form drops `I_p`; for `N` a product of split primes and `A = 1`
//! the character factor is identically 2.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::Signed;

use crate::arith::{self, legendre_unchecked};
use crate::classnum::ClassNumberCache;
use crate::error::{Error, Result};
use crate::quad::{fundamental_unit, FundamentalUnit, QuadElement};
use crate::rational::{twelfths, Rational};

pub const DEFAULT_TOL: f64 = 1e-10;

/// Widest `v` range the `I_p` orbit search will walk.
const MAX_ORBIT_SEARCH: f64 = 1e8;

/// The prime `p = 1 (mod 4)` and the ideal norm `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HzParams {
    pub p: u64,
    pub a: u64,
}

impl HzParams {
    pub fn new(p: u64, a: u64) -> Result<Self> {
        if p % 4 != 1 || !arith::is_prime(p) {
            return Err(Error::invalid(format!(
                "p must be a prime = 1 mod 4, got {p}"
            )));
        }
        if a == 0 {
            return Err(Error::invalid("A must be >= 1"));
        }
        Ok(HzParams { p, a })
    }

    pub fn with_p(p: u64) -> Result<Self> {
        Self::new(p, 1)
    }

    pub fn chi(&self, n: u64) -> i8 {
        legendre_unchecked((n % self.p) as i64, self.p)
    }
}

/// A value with a certified absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certified {
    pub value: f64,
    pub error_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SelfIntersection {
    Exact(Rational),
    Approx(Certified),
}

impl SelfIntersection {
    pub fn to_f64(&self) -> f64 {
        match self {
            SelfIntersection::Exact(r) => crate::rational::to_f64(r),
            SelfIntersection::Approx(c) => c.value,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            SelfIntersection::Exact(r) => Some(r),
            SelfIntersection::Approx(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TnOptions {
    pub include_ip: bool,
    pub tol: f64,
    /// Permit `N` that is not squarefree.
    pub allow_non_squarefree: bool,
}

impl Default for TnOptions {
    fn default() -> Self {
        TnOptions {
            include_ip: false,
            tol: DEFAULT_TOL,
            allow_non_squarefree: false,
        }
    }
}

/// The formula machinery for one Hilbert modular surface.
#[derive(Debug, Clone)]
pub struct HzSurface {
    params: HzParams,
    cache: Arc<ClassNumberCache>,
    unit: Arc<OnceLock<FundamentalUnit>>,
    sums: Arc<RwLock<HashMap<(u64, bool), i64>>>,
}

impl HzSurface {
    pub fn new(params: HzParams, cache: Arc<ClassNumberCache>) -> Self {
        HzSurface {
            params,
            cache,
            unit: Arc::new(OnceLock::new()),
            sums: Arc::default(),
        }
    }

    pub fn params(&self) -> HzParams {
        self.params
    }

    pub fn cache(&self) -> &Arc<ClassNumberCache> {
        &self.cache
    }

    pub fn unit(&self) -> &FundamentalUnit {
        self.unit
            .get_or_init(|| fundamental_unit(self.params.p).expect("p validated by HzParams"))
    }

    /// `12 * H_p(n)`; `strict` drops the boundary terms `x^2 = 4n`.
    pub fn h_p_sum12(&self, n: u64, strict: bool) -> i64 {
        if let Some(&v) = self.sums.read().unwrap().get(&(n, strict)) {
            return v;
        }
        let v = self.h_p_sum12_uncached(n, strict);
        self.sums.write().unwrap().insert((n, strict), v);
        v
    }

    fn h_p_sum12_uncached(&self, n: u64, strict: bool) -> i64 {
        let p = self.params.p as i64;
        let four_n = 4 * n;
        let bound = arith::isqrt(four_n) as i64;
        let mut total = 0i64;
        for r in arith::sqrt_mod((four_n % self.params.p) as i64, self.params.p) {
            let mut x = -bound + (r as i64 + bound).rem_euclid(p);
            while x <= bound {
                let x2 = (x * x) as u64;
                if !(strict && x2 == four_n) {
                    total += self.cache.hurwitz_h12((four_n - x2) / self.params.p);
                }
                x += p;
            }
        }
        total
    }

    /// `H_p(n)`.
    pub fn h_p_sum(&self, n: u64) -> Result<Rational> {
        require_positive(n)?;
        Ok(twelfths(self.h_p_sum12(n, false) as i128))
    }

    /// `H_p^0(n)`: the same sum over `x^2 < 4n`; every term is nonnegative.
    pub fn h_p0(&self, n: u64) -> Result<Rational> {
        require_positive(n)?;
        Ok(twelfths(self.h_p_sum12(n, true) as i128))
    }

    /// Orbit representatives of totally positive `lambda` with norm `n`:
    /// `lambda = (u + v sqrt p)/2` with `1 <= lambda / lambda' < eps_plus^2`.
    pub fn norm_orbit_representatives(&self, n: u64) -> Result<Vec<QuadElement>> {
        require_positive(n)?;
        let p = self.params.p;
        let eps = &self.unit().totally_positive;
        let eps_f = eps.to_f64();
        if !eps_f.is_finite() {
            return Err(Error::UnitTooLarge(p));
        }
        let eps_conj = eps.conjugate();
        // lambda < eps * sqrt(n) and lambda > v sqrt(p)
        let v_max = eps_f * (n as f64).sqrt() / (p as f64).sqrt() + 2.0;
        if v_max > MAX_ORBIT_SEARCH {
            return Err(Error::UnitTooLarge(p));
        }
        let mut reps = Vec::new();
        for v in 0..=(v_max as u64) {
            let u2 = 4 * n as u128 + p as u128 * (v as u128) * (v as u128);
            let u2 = u64::try_from(u2).map_err(|_| Error::UnitTooLarge(p))?;
            if !arith::is_square(u2) {
                continue;
            }
            let u = arith::isqrt(u2);
            if !(u + v).is_multiple_of(2) {
                continue;
            }
            let lambda = QuadElement::from_half_integers(BigInt::from(u), BigInt::from(v), p);
            // lambda / lambda' < eps^2  <=>  lambda * eps' < its conjugate
            if (&lambda * &eps_conj).b.is_negative() {
                reps.push(lambda);
            }
        }
        Ok(reps)
    }

    /// `I_p(n)` with absolute error at most `tol`.
    ///
    /// Each orbit `{lambda eps^k}` with representative `lambda >= lambda'`
    /// contributes `sum_{k>=0} lambda' eps^-k + sum_{j>=1} lambda eps^-j`;
    /// both tails are geometric and truncated once `term / (eps - 1)` falls
    /// under the per-series error budget.
    pub fn i_p(&self, n: u64, tol: f64) -> Result<Certified> {
        if tol.is_nan() || tol <= 0.0 {
            return Err(Error::invalid(format!("tol must be positive, got {tol}")));
        }
        let reps = self.norm_orbit_representatives(n)?;
        if reps.is_empty() {
            return Ok(Certified {
                value: 0.0,
                error_bound: 0.0,
            });
        }
        let unit = &self.unit().totally_positive;
        let eps = unit.to_f64();
        let eps_inv = unit.conjugate();
        let sqrt_p = (self.params.p as f64).sqrt();
        let budget = tol * sqrt_p / (2.0 * reps.len() as f64);

        let mut sum = 0.0;
        let mut truncation = 0.0;
        for lambda in &reps {
            let small = lambda.conjugate().to_f64();
            let shifted = (lambda * &eps_inv).to_f64();
            for first in [small, shifted] {
                let (s, tail) = geometric_tail_sum(first, eps, budget);
                sum += s;
                truncation += tail;
            }
        }
        Ok(Certified {
            value: sum / sqrt_p,
            error_bound: truncation / sqrt_p,
        })
    }

    /// `chi_p(N A) != -1`.
    pub fn is_eligible(&self, n: u64) -> bool {
        self.params.chi(n) * self.params.chi(self.params.a) != -1
    }

    pub fn t_n_squared(&self, n: u64, opts: TnOptions) -> Result<SelfIntersection> {
        require_positive(n)?;
        if !self.is_eligible(n) {
            return Err(Error::Ineligible {
                p: self.params.p,
                n,
                a: self.params.a,
            });
        }
        if !opts.allow_non_squarefree && !arith::is_squarefree(n) {
            return Err(Error::invalid(format!(
                "N = {n} is not squarefree (pass the override to evaluate the formula anyway)"
            )));
        }
        let divisors = arith::divisors(n)?;
        let na = n as u128 * self.params.a as u128;
        let chi_sum = |d: u64| -> i64 {
            let cofactor = ((na / d as u128) % self.params.p as u128) as u64;
            (self.params.chi(d) + self.params.chi(cofactor)) as i64
        };

        // 24 * T_N^2 from the H_p part
        let mut twenty_fourths = 0i128;
        for &d in &divisors {
            let weight = chi_sum(d);
            if weight == 0 {
                continue;
            }
            let m = n / d;
            twenty_fourths += d as i128 * weight as i128 * self.h_p_sum12(m * m, false) as i128;
        }
        let exact = Rational::new(BigInt::from(twenty_fourths), BigInt::from(24));
        if !opts.include_ip {
            return Ok(SelfIntersection::Exact(exact));
        }

        let weighted: Vec<(u64, i64)> = divisors
            .iter()
            .map(|&d| (d, chi_sum(d)))
            .filter(|&(_, w)| w != 0)
            .collect();
        let per_term_tol = opts.tol / weighted.len().max(1) as f64;
        let mut value = crate::rational::to_f64(&exact);
        let mut error_bound = 0.0;
        for (d, w) in weighted {
            let m = n / d;
            let scale = 0.5 * d as f64 * w.abs() as f64;
            let ip = self.i_p(m * m, per_term_tol / scale)?;
            value += 0.5 * d as f64 * w as f64 * ip.value;
            error_bound += scale * ip.error_bound;
        }
        Ok(SelfIntersection::Approx(Certified { value, error_bound }))
    }
}

/// Sums `first * r^k` for `k >= 0` with `r = 1/eps`, stopping once the
/// remaining tail `term / (eps - 1)` is at most `budget`.
fn geometric_tail_sum(first: f64, eps: f64, budget: f64) -> (f64, f64) {
    let mut sum = 0.0;
    let mut term = first;
    loop {
        sum += term;
        term /= eps;
        let tail = term * eps / (eps - 1.0);
        if tail <= budget || term == 0.0 {
            return (sum, tail);
        }
    }
}

fn require_positive(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("n must be >= 1"));
    }
    Ok(())
}

/// Squarefree `N <= n_max` whose prime factors `q` all satisfy `chi_p(q) = 1`,
/// ascending. `N = 1` (the empty product) is included only on request.
pub fn split_prime_products(p: u64, n_max: u64, include_one: bool) -> Vec<u64> {
    let primes: Vec<u64> = (2..=n_max)
        .filter(|&q| arith::is_prime(q) && q != p && legendre_unchecked((q % p) as i64, p) == 1)
        .collect();
    let mut out = Vec::new();
    if include_one && n_max >= 1 {
        out.push(1);
    }
    fn extend(primes: &[u64], start: usize, acc: u64, n_max: u64, out: &mut Vec<u64>) {
        for (i, &q) in primes.iter().enumerate().skip(start) {
            match acc.checked_mul(q) {
                Some(next) if next <= n_max => {
                    out.push(next);
                    extend(primes, i + 1, next, n_max, out);
                }
                _ => break,
            }
        }
    }
    extend(&primes, 0, 1, n_max, &mut out);
    out.sort_unstable();
    out
}
