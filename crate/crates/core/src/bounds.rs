//! Analytic estimates behind the `p^{3/2}` bound: Paley's class-number lower
//! bound, Robin's divisor-sum upper bound, the three-step chain for
//! `H_p^0(n^2)`, the linearized lower bound for `T_N^2`, and the minimum
//! analysis of its `log log` surrogate `t(N)`.
//!
//! Where the printed statement and its derivation disagree, both versions are
//! exposed and the audit harness compares them against exact values.

use std::f64::consts::PI;

use crate::arith::{self, loglog, BoundConstants, ROBIN_SECOND};
use crate::error::{Error, Result};

/// Paley's surrogate `pi / (24 e^gamma) * sqrt(d) / loglog(d)` for `h(-d)`.
pub fn paley_lower(d: u64) -> Result<f64> {
    if d < 3 {
        return Err(Error::domain(format!("paley_lower({d}) requires d >= 3")));
    }
    paley_lower_real(d as f64)
}

/// The same closed form at a real argument.
pub fn paley_lower_real(d: f64) -> Result<f64> {
    if d.is_nan() || d < 3.0 {
        return Err(Error::domain(format!("paley_lower({d}) requires d >= 3")));
    }
    let e_gamma = arith::EULER_GAMMA.exp();
    Ok(PI / (24.0 * e_gamma) * d.sqrt() / loglog(d)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobinBound {
    /// `e^gamma N loglog N + 0.6482 N / loglog N`
    pub two_term: f64,
    /// `(e^gamma + 0.6482) N loglog N`; dominates the two-term form only once
    /// `loglog N >= 1`.
    pub merged: f64,
}

pub fn robin_upper(n: u64) -> Result<RobinBound> {
    if n < 3 {
        return Err(Error::domain(format!("robin_upper({n}) requires N >= 3")));
    }
    let e_gamma = arith::EULER_GAMMA.exp();
    let nf = n as f64;
    let ll = loglog(nf)?;
    Ok(RobinBound {
        two_term: e_gamma * nf * ll + ROBIN_SECOND * nf / ll,
        merged: (e_gamma + ROBIN_SECOND) * nf * ll,
    })
}

/// `H'(n) = sum_{f^2 | n} paley_lower(n / f^2)`.
pub fn h_prime_tilde(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("h_prime_tilde(0) is undefined"));
    }
    let mut total = 0.0;
    let mut f = 1u64;
    while f * f <= n {
        if n.is_multiple_of(f * f) {
            let arg = n / (f * f);
            total += paley_lower(arg).map_err(|_| {
                Error::domain(format!(
                    "h_prime_tilde({n}): term f = {f} has argument {arg} < 3"
                ))
            })?;
        }
        f += 1;
    }
    Ok(total)
}

/// The three successive lower bounds claimed for `H_p^0(n^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma1Result {
    /// `sum_k H'((4n^2 - x_k^2) / p)` with `x_k = (p-1)/2 + kp`.
    pub rhs1: f64,
    /// After Paley and `sqrt(1 - y) >= 1 - 2y`.
    pub rhs2: f64,
    /// After summing over `k`.
    pub rhs3: f64,
    /// Number of `k` terms, `floor(2n / p)`.
    pub terms: u64,
    /// Terms whose argument `(4n^2 - x_k^2) / p` is not an integer; these use
    /// the Paley closed form at the real argument.
    pub nonintegral_terms: u64,
}

impl Lemma1Result {
    pub fn chain_holds(&self) -> bool {
        self.rhs1 >= self.rhs2 && self.rhs2 >= self.rhs3
    }
}

pub fn lemma1_chain(p: u64, n: u64) -> Result<Lemma1Result> {
    if p % 4 != 1 || !arith::is_prime(p) {
        return Err(Error::invalid(format!(
            "p must be a prime = 1 mod 4, got {p}"
        )));
    }
    if n == 0 {
        return Err(Error::invalid("n must be >= 1"));
    }
    let e_gamma = arith::EULER_GAMMA.exp();
    let terms = 2 * n / p;
    let half = (p - 1) / 2;
    let four_n2 = 4 * n as u128 * n as u128;

    let mut rhs1 = 0.0;
    let mut nonintegral_terms = 0;
    let mut linear_sum = 0.0;
    for k in 0..terms {
        let x = half as u128 + k as u128 * p as u128;
        let numer = four_n2 - x * x;
        rhs1 += if numer.is_multiple_of(p as u128) {
            let arg = (numer / p as u128) as u64;
            h_prime_tilde(arg).map_err(|e| Error::domain(format!("lemma1 term k = {k}: {e}")))?
        } else {
            nonintegral_terms += 1;
            paley_lower_real(numer as f64 / p as f64)
                .map_err(|e| Error::domain(format!("lemma1 term k = {k}: {e}")))?
        };
        let (kf, pf, nf) = (k as f64, p as f64, n as f64);
        let quad = (half as f64).powi(2) + kf * pf * (pf - 1.0) + kf * kf * pf * pf;
        linear_sum += 1.0 - quad / (2.0 * nf * nf);
    }

    let (pf, nf) = (p as f64, n as f64);
    let prefactor = PI * nf / (12.0 * e_gamma * pf.sqrt() * loglog(4.0 * nf * nf)?);
    let rhs2 = if terms == 0 {
        0.0
    } else {
        prefactor * linear_sum
    };
    let rhs3 = prefactor * (2.0 * nf / (3.0 * pf) - 1.0 + 1.0 / pf);
    Ok(Lemma1Result {
        rhs1,
        rhs2,
        rhs3,
        terms,
        nonintegral_terms,
    })
}

/// Which coefficient of the linearized `T_N^2` bound to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Lemma2Variant {
    /// `N delta / (sqrt(p) loglog(4N^2))`, as stated.
    Statement,
    /// `N delta / (6 sqrt(p) loglog(4N^2))`, as the derivation ends.
    Proof,
}

impl Lemma2Variant {
    pub const ALL: [Lemma2Variant; 2] = [Lemma2Variant::Statement, Lemma2Variant::Proof];

    pub fn name(self) -> &'static str {
        match self {
            Lemma2Variant::Statement => "statement",
            Lemma2Variant::Proof => "proof",
        }
    }
}

/// `-(1/6) c N loglog N + Coef (2N/(3p) - 1 + 1/p)`.
pub fn lemma2_lower(p: u64, n: u64, variant: Lemma2Variant, k: &BoundConstants) -> Result<f64> {
    if n < 3 {
        return Err(Error::domain(format!("lemma2_lower needs N >= 3, got {n}")));
    }
    let (pf, nf) = (p as f64, n as f64);
    let mut coef = nf * k.delta / (pf.sqrt() * loglog(4.0 * nf * nf)?);
    if variant == Lemma2Variant::Proof {
        coef /= 6.0;
    }
    Ok(-k.c * nf * loglog(nf)? / 6.0 + coef * (2.0 * nf / (3.0 * pf) - 1.0 + 1.0 / pf))
}

/// `logloglog(p) / log(p)`, defined once `loglog p > 1` (p >= 16).
pub fn epsilon_of(p: u64) -> Result<f64> {
    let pf = p as f64;
    let ll = loglog(pf.max(1.0 + f64::EPSILON))?;
    if ll <= 1.0 {
        return Err(Error::domain(format!(
            "epsilon_of({p}) needs loglog(p) > 1, i.e. p >= 16"
        )));
    }
    Ok(ll.ln() / pf.ln())
}

/// Exponent threshold `k` beyond which the minimum cannot occur:
/// `3 / (2(1 - eps))` as stated, `3 / (2(1 - 3 eps))` as derived.
pub fn k_threshold(eps: f64, variant: Lemma2Variant) -> Result<f64> {
    let slope = match variant {
        Lemma2Variant::Statement => 1.0,
        Lemma2Variant::Proof => 3.0,
    };
    if eps.is_nan() || eps < 0.0 || slope * eps >= 1.0 {
        return Err(Error::domain(format!(
            "k_threshold({eps}, {}) outside its domain",
            variant.name()
        )));
    }
    Ok(3.0 / (2.0 * (1.0 - slope * eps)))
}

fn require_p(p: u64) -> Result<()> {
    if p % 4 != 1 || !arith::is_prime(p) {
        return Err(Error::invalid(format!(
            "p must be a prime = 1 mod 4, got {p}"
        )));
    }
    Ok(())
}

/// `t(N) = -(1/6) c N p^{k eps} + N delta / (sqrt(p) p^{2 k eps}) (2N/(3p) - 1 + 1/p)`.
pub fn t_bound(p: u64, n: f64, k_eps: f64, k: &BoundConstants) -> Result<f64> {
    require_p(p)?;
    let pf = p as f64;
    let grow = pf.powf(k_eps);
    Ok(-k.c * n * grow / 6.0
        + n * k.delta / (pf.sqrt() * grow * grow) * (2.0 * n / (3.0 * pf) - 1.0 + 1.0 / pf))
}

/// `t'(N)`.
pub fn t_bound_deriv(p: u64, n: f64, k_eps: f64, k: &BoundConstants) -> Result<f64> {
    require_p(p)?;
    let pf = p as f64;
    let grow = pf.powf(k_eps);
    Ok(-k.c * grow / 6.0
        + k.delta / (pf.sqrt() * grow * grow) * (4.0 * n / (3.0 * pf) - 1.0 + 1.0 / pf))
}

/// The root of `t'`: `(c / 8 delta) p^{3/2} p^{3 k eps} + (3/4)(p - 1)`.
pub fn n_min_analytic(p: u64, k_eps: f64, k: &BoundConstants) -> Result<f64> {
    require_p(p)?;
    let pf = p as f64;
    Ok(k.c / (8.0 * k.delta) * pf.powf(1.5 + 3.0 * k_eps) + 0.75 * (pf - 1.0))
}

/// The printed minimizer, which carries `-(3/4)(p - 1)`; it differs from the
/// root of `t'` by `(3/2)(p - 1)`.
pub fn n_min_printed(p: u64, k_eps: f64, k: &BoundConstants) -> Result<f64> {
    require_p(p)?;
    let pf = p as f64;
    Ok(k.c / (8.0 * k.delta) * pf.powf(1.5 + 3.0 * k_eps) - 0.75 * (pf - 1.0))
}

/// `-(1/96)(c^2 / delta) p^{3/2}`, the `k eps -> 0` leading term.
pub fn theorem3_bound(p: u64, k: &BoundConstants) -> Result<f64> {
    theorem3_bound_finite(p, 0.0, k)
}

/// As [`theorem3_bound`] with the `p^{4 k eps}` factor reinstated.
pub fn theorem3_bound_finite(p: u64, k_eps: f64, k: &BoundConstants) -> Result<f64> {
    require_p(p)?;
    let pf = p as f64;
    Ok(-(k.c * k.c / k.delta) / 96.0 * pf.powf(1.5 + 4.0 * k_eps))
}
