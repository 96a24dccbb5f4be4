//! Bounds for arbitrary Shimura curves via Miyaoka's inequality, and the
//! Chern-number estimates for the Hilbert modular surface of Q(sqrt p).

use std::f64::consts::PI;

use num_bigint::BigInt;

use crate::arith::{self, loglog, sigma_u64};
use crate::classnum::{class_number, Discriminant};
use crate::error::{Error, Result};
use crate::rational::{rat, Rational};

/// Numerical data of the surface: `c2`, `K^2` and `d2 = 3 c2 - K^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceData {
    pub c2: f64,
    pub ksq: f64,
    pub d2: f64,
}

impl SurfaceData {
    pub fn new(c2: f64, ksq: f64) -> Self {
        SurfaceData {
            c2,
            ksq,
            d2: 3.0 * c2 - ksq,
        }
    }

    /// Data with prescribed `d2` (and `K^2 = 0`).
    pub fn with_d2(d2: f64) -> Self {
        SurfaceData::new(d2 / 3.0, 0.0)
    }
}

/// Intersection data of a curve `C`: `C^2`, `K.C`, geometric genus, `S.C`
/// against the boundary divisor, and `rho(C)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveData {
    pub csq: f64,
    pub kc: f64,
    pub g: u64,
    pub sc: f64,
    pub rho: f64,
}

impl CurveData {
    pub fn new(csq: f64, kc: f64, g: u64) -> Self {
        CurveData {
            csq,
            kc,
            g,
            sc: 0.0,
            rho: 0.0,
        }
    }

    pub fn with_boundary(mut self, sc: f64, rho: f64) -> Self {
        self.sc = sc;
        self.rho = rho;
        self
    }
}

/// Arithmetic minus geometric genus: `(K.C + C^2 - 2g + 2) / 2`.
pub fn delta_of(curve: &CurveData) -> f64 {
    0.5 * (curve.kc + curve.csq - 2.0 * curve.g as f64 + 2.0)
}

/// Left side of Miyaoka's inequality, nonnegative for every `alpha` in [0, 1]:
/// `(a^2/2)(C^2 + 3 C.K - 6g + 6) - 2a(C.K - 3g + 3) + 3 c2 - K^2`.
pub fn miyaoka_lhs(alpha: f64, curve: &CurveData, surface: &SurfaceData) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::domain(format!("alpha = {alpha} outside [0, 1]")));
    }
    let g = curve.g as f64;
    Ok(
        0.5 * alpha * alpha * (curve.csq + 3.0 * curve.kc - 6.0 * g + 6.0)
            - 2.0 * alpha * (curve.kc - 3.0 * g + 3.0)
            + 3.0 * surface.c2
            - surface.ksq,
    )
}

/// `P(a) = a^2 (3 delta - C^2) + a (C^2 - S.C - rho - 2 delta) + d2`.
pub fn p_alpha(alpha: f64, delta: f64, csq: f64, sc: f64, rho: f64, d2: f64) -> f64 {
    alpha * alpha * (3.0 * delta - csq) + alpha * (csq - sc - rho - 2.0 * delta) + d2
}

/// Vertex of `P`: `(2 delta + S.C + rho - C^2) / (2 (3 delta - C^2))`.
pub fn alpha0(delta: f64, csq: f64, sc: f64, rho: f64) -> Result<f64> {
    let lead = 3.0 * delta - csq;
    if lead.is_nan() || lead <= 0.0 {
        return Err(Error::DegenerateQuadratic(lead));
    }
    Ok((2.0 * delta + sc + rho - csq) / (2.0 * lead))
}

/// `(K + S).C + 2 C^2 + rho - 4 delta`; zero exactly when the proportionality
/// relation holds.
pub fn proportionality_residual(curve: &CurveData, delta: f64) -> f64 {
    curve.kc + curve.sc + 2.0 * curve.csq + curve.rho - 4.0 * delta
}

/// Lower bound for `C^2` after the triangle inequality:
/// `2 delta + sc + rho - 2 d2 - 2 sqrt(d2^2 + delta d2) - 2 sqrt(d2 sc) - 2 sqrt(d2 rho)`.
pub fn c2_chain_lower(delta: f64, sc: f64, rho: f64, d2: f64) -> Result<f64> {
    if !(delta >= 0.0 && sc >= 0.0 && rho >= 0.0) {
        return Err(Error::domain(format!(
            "c2_chain_lower needs delta, sc, rho >= 0 (got {delta}, {sc}, {rho})"
        )));
    }
    if d2.is_nan() || d2 <= 0.0 {
        return Err(Error::domain(format!(
            "c2_chain_lower needs d2 > 0, got {d2}"
        )));
    }
    Ok(2.0 * delta + sc + rho
        - 2.0 * d2
        - 2.0 * (d2 * d2 + delta * d2).sqrt()
        - 2.0 * (d2 * sc).sqrt()
        - 2.0 * (d2 * rho).sqrt())
}

/// `f(x) = x - 2 sqrt(d2 x)`, minimized at `x = d2` with value `-d2`.
pub fn f_boundary(x: f64, d2: f64) -> f64 {
    x - 2.0 * (d2 * x).sqrt()
}

/// The bound once both boundary terms are minimized:
/// `2 delta - 4 d2 - 2 sqrt(d2^2 + delta d2)`.
pub fn c2_reduced_lower(delta: f64, d2: f64) -> f64 {
    2.0 * delta - 4.0 * d2 - 2.0 * (d2 * d2 + delta * d2).sqrt()
}

/// The exact coefficient `4 + 2 sqrt((7 + sqrt 13)/2)`, rounded up to 9.
pub fn nine_d2_constant() -> f64 {
    4.0 + 2.0 * ((7.0 + 13f64.sqrt()) / 2.0).sqrt()
}

/// `((5 + sqrt 13)/2) d2`: the reduced bound is nonnegative from here on.
pub fn c2_threshold_delta(d2: f64) -> f64 {
    (5.0 + 13f64.sqrt()) / 2.0 * d2
}

fn require_p(p: u64) -> Result<()> {
    if p % 4 != 1 || !arith::is_prime(p) {
        return Err(Error::invalid(format!(
            "p must be a prime = 1 mod 4, got {p}"
        )));
    }
    Ok(())
}

/// Integer values `(p - x^2)/4` over `x` with `x^2 < p`, `x` odd; the others
/// contribute nothing.
fn quarter_values(p: u64) -> impl Iterator<Item = u64> {
    let b = arith::isqrt(p);
    (-(b as i64)..=b as i64)
        .filter(move |x| {
            let x2 = (x * x) as u64;
            x2 < p && (p - x2).is_multiple_of(4)
        })
        .map(move |x| (p - (x * x) as u64) / 4)
}

/// `zeta_K(-1) = (1/60) sum_x sigma_1((p - x^2)/4)`.
pub fn zeta_k_minus1(p: u64) -> Result<Rational> {
    require_p(p)?;
    let total: u128 = quarter_values(p).map(|m| sigma_u64(1, m)).sum();
    Ok(Rational::new(BigInt::from(total), BigInt::from(60)))
}

/// `index * 2 * zeta_K(-1)`.
pub fn volume(p: u64, index: u64) -> Result<Rational> {
    if index == 0 {
        return Err(Error::invalid("index must be >= 1"));
    }
    Ok(zeta_k_minus1(p)? * rat(2 * index as i64, 1))
}

/// `sum_x sigma_1((p - x^2)/4)` exactly.
pub fn sigma1_sum_exact(p: u64) -> Result<u128> {
    require_p(p)?;
    Ok(quarter_values(p).map(|m| sigma_u64(1, m)).sum())
}

/// `sum_x sigma_0((p - x^2)/4)` exactly.
pub fn sigma0_sum_exact(p: u64) -> Result<u64> {
    require_p(p)?;
    Ok(quarter_values(p).map(|m| sigma_u64(0, m) as u64).sum())
}

fn log_factor(p: f64) -> f64 {
    let l = p.ln();
    3.0 / (2.0 * PI * PI) * l * l + 1.05 * l
}

/// van der Geer: `p^{1/2} ((3 / 2pi^2) log^2 p + 1.05 log p)`.
pub fn vdg_sigma0_upper(p: u64) -> Result<f64> {
    require_p(p)?;
    let pf = p as f64;
    Ok(pf.sqrt() * log_factor(pf))
}

/// `p * vdg_sigma0_upper(p)`.
pub fn sigma1_sum_upper(p: u64) -> Result<f64> {
    Ok(p as f64 * vdg_sigma0_upper(p)?)
}

/// Upper bound on the number of curves in the cusp resolutions.
pub fn cusp_curve_upper(p: u64) -> Result<f64> {
    Ok(vdg_sigma0_upper(p)? / 2.0)
}

/// Quotient singularity counts and their Paley-type lower bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuotientSingularities {
    /// `a_2 = h(-4p)`.
    pub a2_exact: u64,
    pub a2_lower: f64,
    pub a3p_lower: f64,
    pub a3m_lower: f64,
    /// `(3/2) a2 + (5/3) a3+ + (8/3) a3-` at the lower bounds.
    pub contribution_lower: f64,
    /// The contribution formula is stated for `p > 500` only.
    pub small_p_warning: bool,
}

pub fn quotient_sing_lowers(p: u64) -> Result<QuotientSingularities> {
    require_p(p)?;
    let pf = p as f64;
    let e_gamma = arith::EULER_GAMMA.exp();
    let sqrt3 = 3f64.sqrt();
    let a2_exact = class_number(Discriminant::new(-4 * p as i64)?);
    let a2_lower = PI / (12.0 * e_gamma) * pf.sqrt() / loglog(4.0 * pf)?;
    let ll3 = loglog(3.0 * pf)?;
    let a3p_lower = sqrt3 * PI / (6.0 * e_gamma) * pf.sqrt() / ll3;
    let a3m_lower = sqrt3 * PI / (48.0 * e_gamma) * pf.sqrt() / ll3;
    Ok(QuotientSingularities {
        a2_exact,
        a2_lower,
        a3p_lower,
        a3m_lower,
        contribution_lower: 1.5 * a2_lower + 5.0 / 3.0 * a3p_lower + 8.0 / 3.0 * a3m_lower,
        small_p_warning: p <= 500,
    })
}

/// The five bracketed terms of the explicit bound, in display order.
pub fn explicit_c2_terms(p: u64) -> Result<[f64; 5]> {
    require_p(p)?;
    let pf = p as f64;
    let e_gamma = arith::EULER_GAMMA.exp();
    let sqrt3 = 3f64.sqrt();
    let lf = log_factor(pf);
    let root = pf.sqrt();
    let ll4 = loglog(4.0 * pf)?;
    let ll3 = loglog(3.0 * pf)?;
    Ok([
        0.9 * pf.powf(1.5) * lf,
        13.5 * root * lf,
        27.0 * PI / (8.0 * e_gamma) * root / ll4,
        3.0 * 5.0 * sqrt3 * PI / (2.0 * e_gamma) * root / ll3,
        3.0 * sqrt3 * PI / (2.0 * e_gamma) * root / ll3,
    ])
}

/// `C^2 >= -(sum of the five terms)`.
pub fn explicit_c2_bound(p: u64) -> Result<f64> {
    Ok(-explicit_c2_terms(p)?.iter().sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat_int;

    #[test]
    fn delta_examples() {
        assert_eq!(delta_of(&CurveData::new(0.0, 0.0, 1)), 0.0);
        assert_eq!(delta_of(&CurveData::new(-2.0, 0.0, 0)), 0.0);
        assert_eq!(delta_of(&CurveData::new(1.0, 1.0, 0)), 2.0);
    }

    #[test]
    fn miyaoka_examples() {
        let s = SurfaceData::new(4.0, 2.0);
        let c = CurveData::new(3.0, -1.0, 2);
        assert_eq!(miyaoka_lhs(0.0, &c, &s).unwrap(), s.d2);
        let s5 = SurfaceData::with_d2(5.0);
        let v = miyaoka_lhs(1.0, &CurveData::new(0.0, 0.0, 1), &s5).unwrap();
        assert!((v - 5.0).abs() < 1e-12);
        // (1/8)(2 + 6 + 6) - (2 + 3) + 1
        let s1 = SurfaceData::with_d2(1.0);
        let v = miyaoka_lhs(0.5, &CurveData::new(2.0, 2.0, 0), &s1).unwrap();
        assert!((v - (14.0 / 8.0 - 5.0 + 1.0)).abs() < 1e-12);
        assert!(miyaoka_lhs(1.5, &c, &s).is_err());
        assert!(miyaoka_lhs(-0.1, &c, &s).is_err());
    }

    #[test]
    fn p_alpha_examples() {
        assert_eq!(p_alpha(0.0, 1.0, 2.0, 3.0, 4.0, 7.0), 7.0);
        assert!((alpha0(1.0, -1.0, 0.0, 0.0).unwrap() - 0.375).abs() < 1e-15);
        assert!(matches!(
            alpha0(1.0, 3.0, 0.0, 0.0),
            Err(Error::DegenerateQuadratic(_))
        ));
    }

    #[test]
    fn proportionality_examples() {
        // g = 1 gives delta = (2 + 1 - 2 + 2)/2 = 1.5; choose g so delta = 1
        let c = CurveData::new(1.0, 2.0, 0).with_boundary(0.0, 0.0);
        let delta = 1.0;
        assert_eq!(proportionality_residual(&c, delta), 0.0);
        let bumped = c.with_boundary(0.0, 1.0);
        assert_eq!(proportionality_residual(&bumped, delta), 1.0);
    }

    #[test]
    fn chain_examples() {
        assert!((c2_chain_lower(0.0, 0.0, 0.0, 1.0).unwrap() + 4.0).abs() < 1e-15);
        let v = c2_chain_lower(1.0, 1.0, 1.0, 1.0).unwrap();
        assert!((v + 4.828_427_124_746_19).abs() < 1e-9);
        assert!(c2_chain_lower(-1.0, 0.0, 0.0, 1.0).is_err());
        assert!(c2_chain_lower(1.0, 0.0, 0.0, 0.0).is_err());
        // at sc = rho = d2 both boundary parts reach -d2
        let d2 = 3.0;
        let at_min = c2_chain_lower(d2, d2, d2, d2).unwrap();
        assert!((at_min - (c2_reduced_lower(d2, d2))).abs() < 1e-12);
        assert!((f_boundary(d2, d2) + d2).abs() < 1e-12);
    }

    #[test]
    fn constants() {
        let k = nine_d2_constant();
        assert!((k - 8.605_551_275_463_99).abs() < 1e-12);
        assert!(k < 9.0);
        assert!((c2_threshold_delta(1.0) - 4.302_775_637_731_995).abs() < 1e-12);
        assert!((c2_threshold_delta(2.0) - 2.0 * c2_threshold_delta(1.0)).abs() < 1e-12);
        let d2 = 1.0;
        assert!((c2_reduced_lower(0.0, d2) + 6.0 * d2).abs() < 1e-12);
        assert!(c2_reduced_lower(c2_threshold_delta(d2), d2).abs() < 1e-12);
    }

    #[test]
    fn zeta_examples() {
        assert_eq!(zeta_k_minus1(5).unwrap(), rat(1, 30));
        assert_eq!(zeta_k_minus1(13).unwrap(), rat(1, 6));
        assert_eq!(zeta_k_minus1(17).unwrap(), rat(1, 3));
        assert!(zeta_k_minus1(7).is_err());
        assert_eq!(volume(5, 1).unwrap(), rat(1, 15));
        assert_eq!(volume(13, 1).unwrap(), rat(1, 3));
        assert_eq!(volume(5, 6).unwrap(), rat(2, 5));
        assert!(volume(5, 0).is_err());
    }

    #[test]
    fn zeta_times_sixty_is_a_positive_integer() {
        for p in (5u64..3000).filter(|&p| p % 4 == 1 && arith::is_prime(p)) {
            let z = zeta_k_minus1(p).unwrap() * rat_int(60);
            assert!(z.is_integer() && z > rat_int(0));
        }
    }

    #[test]
    fn sigma_sums() {
        assert_eq!(sigma0_sum_exact(13).unwrap(), 6);
        assert_eq!(sigma0_sum_exact(5).unwrap(), 2);
        assert_eq!(sigma1_sum_exact(13).unwrap(), 10);
        let u = vdg_sigma0_upper(13).unwrap();
        assert!((u - 13.315_587_999_567_358).abs() < 1e-9);
        assert!((cusp_curve_upper(13).unwrap() - u / 2.0).abs() < 1e-12);
        assert!((sigma1_sum_upper(13).unwrap() - 13.0 * u).abs() < 1e-9);
    }

    #[test]
    fn quotient_singularities() {
        let q = quotient_sing_lowers(13).unwrap();
        assert_eq!(q.a2_exact, 2);
        assert!((q.a2_lower - 0.385_711_319_957_151_6).abs() < 1e-9);
        assert!((q.a3m_lower - 0.176_741_639_366_169).abs() < 1e-9);
        assert!(q.small_p_warning);
        assert!(!quotient_sing_lowers(509).unwrap().small_p_warning);
        for p in (5u64..2000).filter(|&p| p % 4 == 1 && arith::is_prime(p)) {
            let q = quotient_sing_lowers(p).unwrap();
            assert!(q.a2_lower <= q.a2_exact as f64, "p = {p}");
        }
    }

    /// Independent re-evaluation of the displayed bound.
    fn explicit_reference(p: f64) -> f64 {
        let eg = 0.577_215_664_901_532_9f64.exp();
        let l = p.ln();
        let bracket = 0.151_981_775_463_721_7 * l * l + 1.05 * l;
        let t1 = 9.0 / 10.0 * p * p.sqrt() * bracket;
        let t2 = 27.0 / 2.0 * p.sqrt() * bracket;
        let t3 = 27.0 * std::f64::consts::PI / 8.0 / eg * p.sqrt() / (4.0 * p).ln().ln();
        let pref = 3f64.sqrt() * std::f64::consts::PI / eg / 2.0;
        let t45 = (15.0 + 3.0) * pref * p.sqrt() / (3.0 * p).ln().ln();
        -(t1 + t2 + t3 + t45)
    }

    #[test]
    fn explicit_bound() {
        let b = explicit_c2_bound(13).unwrap();
        assert!(((b - explicit_reference(13.0)) / b).abs() < 1e-6);
        assert!((b + 427.526_514_253_547_1).abs() < 1e-6);
        let mut last = f64::INFINITY;
        for p in [17u64, 101, 1009] {
            let terms = explicit_c2_terms(p).unwrap();
            assert!(terms.iter().all(|&t| t > 0.0));
            let b = explicit_c2_bound(p).unwrap();
            assert!(((b - explicit_reference(p as f64)) / b).abs() < 1e-6);
            assert!(b < last);
            last = b;
        }
        for p in (5u64..500).filter(|&p| p % 4 == 1 && arith::is_prime(p)) {
            assert!(explicit_c2_terms(p).unwrap().iter().all(|&t| t > 0.0));
        }
    }
}
