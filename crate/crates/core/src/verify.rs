//! Audit of each printed inequality against exact values. A failed claim is a
//! finding, reported with a witness; only operational problems are errors.

use std::fmt;
use std::io::Write;

use crate::arith::BoundConstants;
use crate::bounds::{
    lemma1_chain, n_min_analytic, n_min_printed, paley_lower, robin_upper, t_bound_deriv,
    Lemma2Variant,
};
use crate::classnum::Discriminant;
use crate::error::{Error, Result};
use crate::hz::HzSurface;
use crate::rational::{cmp_with_f64, format_rational, format_real, rat};
use crate::scan::{below, scan, tn2_text, ScanConfig, ScanReport};

/// Bumped whenever the claim set changes.
pub const SCHEMA_VERSION: &str = "hzbound-verify/1";
pub const VERIFY_HEADER: &str = "schema,claim_id,parameters,status,witness";

/// Robin strictness is only checked this far.
pub const ROBIN_LIMIT: u64 = 1_000_000;
/// Range of `m` for the boundary identity.
pub const BOUNDARY_LIMIT: u64 = 200;
/// Range of `n` for the three-step chain.
pub const CHAIN_LIMIT: u64 = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIPPED",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClaimStatus {
    pub claim_id: &'static str,
    pub parameters: String,
    pub status: Status,
    pub witness: String,
}

impl ClaimStatus {
    fn new(claim_id: &'static str, parameters: String, failure: Option<String>) -> Self {
        let (status, witness) = match failure {
            Some(w) => (Status::Fail, w),
            None => (Status::Pass, String::new()),
        };
        ClaimStatus {
            claim_id,
            parameters,
            status,
            witness,
        }
    }

    fn skipped(claim_id: &'static str, parameters: String) -> Self {
        ClaimStatus {
            claim_id,
            parameters,
            status: Status::Skipped,
            witness: String::new(),
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            SCHEMA_VERSION, self.claim_id, self.parameters, self.status, self.witness
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub n_max: u64,
    pub d_max: u64,
    pub workers: usize,
    pub constants: BoundConstants,
}

impl VerifyConfig {
    pub fn new(n_max: u64, d_max: u64) -> Self {
        VerifyConfig {
            n_max,
            d_max,
            workers: 0,
            constants: BoundConstants::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub p: u64,
    pub claims: Vec<ClaimStatus>,
    pub scan: ScanReport,
}

impl VerifyReport {
    pub fn claim(&self, id: &str) -> Option<&ClaimStatus> {
        self.claims.iter().find(|c| c.claim_id == id)
    }

    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "{VERIFY_HEADER}")?;
        for c in &self.claims {
            writeln!(out, "{}", c.csv_row())?;
        }
        Ok(())
    }
}

/// Collects the first failure and a count.
struct Failures {
    first: Option<String>,
    count: u64,
}

impl Failures {
    fn new() -> Self {
        Failures {
            first: None,
            count: 0,
        }
    }

    fn record(&mut self, describe: impl FnOnce() -> String) {
        if self.first.is_none() {
            self.first = Some(describe());
        }
        self.count += 1;
    }

    fn witness(self) -> Option<String> {
        let count = self.count;
        self.first.map(|w| format!("{w}; failures={count}"))
    }
}

/// `sigma_1(N) < e^gamma N loglog N + 0.6482 N / loglog N` for `3 <= N <= limit`.
pub fn robin_claim(limit: u64) -> ClaimStatus {
    let params = format!("N=3..{limit}");
    if limit < 3 {
        return ClaimStatus::skipped("a_robin", params);
    }
    let sigma = sigma1_table(limit);
    let mut fails = Failures::new();
    for n in 3..=limit {
        let bound = robin_upper(n).expect("N >= 3").two_term;
        let s = sigma[n as usize];
        if s as f64 >= bound {
            fails.record(|| format!("N={n} sigma1={s} bound={}", format_real(bound)));
        }
    }
    ClaimStatus::new("a_robin", params, fails.witness())
}

/// `sigma_1(n)` for all `n <= limit` by a divisor sieve.
pub fn sigma1_table(limit: u64) -> Vec<u64> {
    let mut sigma = vec![0u64; limit as usize + 1];
    for d in 1..=limit as usize {
        for m in (d..=limit as usize).step_by(d) {
            sigma[m] += d as u64;
        }
    }
    sigma
}

/// Every `d` in `[3, d_max]` with `-d` a discriminant and
/// `paley_lower(d) > h(-d)`.
pub fn paley_exceptions(surface: &HzSurface, d_max: u64) -> Vec<u64> {
    (3..=d_max)
        .filter(|d| matches!(d % 4, 0 | 3))
        .filter(|&d| {
            let h = surface
                .cache()
                .class_number(Discriminant::new(-(d as i64)).expect("d = 0, 3 mod 4"));
            paley_lower(d).expect("d >= 3") > h as f64
        })
        .collect()
}

fn paley_claim(surface: &HzSurface, d_max: u64) -> ClaimStatus {
    let params = format!("d=3..{d_max}");
    if d_max < 3 {
        return ClaimStatus::skipped("b_paley", params);
    }
    let exceptions = paley_exceptions(surface, d_max);
    let witness = (!exceptions.is_empty()).then(|| {
        let list: Vec<String> = exceptions.iter().map(u64::to_string).collect();
        format!("exceptions={}", list.join(" "))
    });
    ClaimStatus::new("b_paley", params, witness)
}

fn boundary_claim(surface: &HzSurface, n_max: u64) -> Result<ClaimStatus> {
    let m_max = n_max.min(BOUNDARY_LIMIT);
    let params = format!("p={};m=1..{m_max}", surface.params().p);
    let mut fails = Failures::new();
    for m in 1..=m_max {
        let full = surface.h_p_sum(m * m)?;
        let strict = surface.h_p0(m * m)?;
        if full != &strict - rat(1, 6) {
            fails.record(|| {
                format!(
                    "m={m} H_p={} H_p0={}",
                    format_rational(&full),
                    format_rational(&strict)
                )
            });
        }
    }
    Ok(ClaimStatus::new("c_boundary", params, fails.witness()))
}

fn lemma1_claims(surface: &HzSurface, n_max: u64) -> Result<[ClaimStatus; 2]> {
    let p = surface.params().p;
    let n_limit = n_max.min(CHAIN_LIMIT);
    let mut chain = Failures::new();
    let mut outer = Failures::new();
    let (mut checked, mut skipped) = (0u64, 0u64);
    for n in 1..=n_limit {
        let r = match lemma1_chain(p, n) {
            Ok(r) if r.terms >= 1 => r,
            Ok(_) => continue,
            Err(Error::Domain(_)) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        checked += 1;
        if !r.chain_holds() {
            chain.record(|| {
                format!(
                    "n={n} rhs1={} rhs2={} rhs3={}",
                    format_real(r.rhs1),
                    format_real(r.rhs2),
                    format_real(r.rhs3)
                )
            });
        }
        let exact = surface.h_p0(n * n)?;
        if cmp_with_f64(&exact, r.rhs1).is_lt() {
            outer.record(|| {
                format!(
                    "n={n} H_p0={} rhs1={}",
                    format_rational(&exact),
                    format_real(r.rhs1)
                )
            });
        }
    }
    let params = format!("p={p};n=1..{n_limit};checked={checked};domain_skipped={skipped}");
    let claim = |id, fails: Failures| {
        if checked == 0 {
            ClaimStatus::skipped(id, params.clone())
        } else {
            ClaimStatus::new(id, params.clone(), fails.witness())
        }
    };
    Ok([
        claim("d_lemma1_chain", chain),
        claim("e_lemma1_outer", outer),
    ])
}

fn lemma2_claim(report: &ScanReport, variant: Lemma2Variant) -> ClaimStatus {
    let id = match variant {
        Lemma2Variant::Statement => "f_lemma2_statement",
        Lemma2Variant::Proof => "f_lemma2_proof",
    };
    let params = format!("p={};N<={}", report.p, report.n_max);
    let mut fails = Failures::new();
    let mut any = false;
    for r in &report.records {
        let (bound, viol) = match variant {
            Lemma2Variant::Statement => (r.lemma2_statement, r.viol_statement),
            Lemma2Variant::Proof => (r.lemma2_proof, r.viol_proof),
        };
        let Some(bound) = bound else { continue };
        any = true;
        if viol {
            fails.record(|| {
                format!(
                    "N={} tn2={} bound={}",
                    r.n,
                    tn2_text(&r.tn2),
                    format_real(bound)
                )
            });
        }
    }
    if !any {
        return ClaimStatus::skipped(id, params);
    }
    ClaimStatus::new(id, params, fails.witness())
}

fn theorem3_claim(report: &ScanReport) -> ClaimStatus {
    let params = format!("p={};N<={}", report.p, report.n_max);
    match report.minimum() {
        None => ClaimStatus::skipped("g_theorem3", params),
        Some(min) => {
            let witness = below(&min.tn2, report.theorem3_bound).then(|| {
                format!(
                    "N={} tn2={} bound={}",
                    min.n,
                    tn2_text(&min.tn2),
                    format_real(report.theorem3_bound)
                )
            });
            ClaimStatus::new("g_theorem3", params, witness)
        }
    }
}

fn remark_claim(report: &ScanReport) -> ClaimStatus {
    let threshold = report.remark_threshold();
    let params = format!(
        "p={};N=({}..{}]",
        report.p,
        format_real(threshold),
        report.n_max
    );
    let tail: Vec<_> = report
        .records
        .iter()
        .filter(|r| r.n as f64 > threshold)
        .collect();
    if tail.is_empty() {
        return ClaimStatus::skipped("h_remark_15_7", params);
    }
    let mut fails = Failures::new();
    for r in tail {
        if below(&r.tn2, 0.0) {
            fails.record(|| format!("N={} tn2={}", r.n, tn2_text(&r.tn2)));
        }
    }
    ClaimStatus::new("h_remark_15_7", params, fails.witness())
}

/// Whether the printed minimizer of `t(N)` is a root of `t'` (at `k eps = 0`).
fn n_min_claim(p: u64, k: &BoundConstants) -> Result<ClaimStatus> {
    let analytic = n_min_analytic(p, 0.0, k)?;
    let printed = n_min_printed(p, 0.0, k)?;
    let slope = t_bound_deriv(p, printed, 0.0, k)?;
    let scale = k.c / 6.0;
    let witness = (slope.abs() > 1e-9 * scale).then(|| {
        format!(
            "analytic={} printed={} gap={} t'(printed)={}",
            format_real(analytic),
            format_real(printed),
            format_real(analytic - printed),
            format_real(slope)
        )
    });
    Ok(ClaimStatus::new(
        "i_nmin_discrepancy",
        format!("p={p};k_eps=0"),
        witness,
    ))
}

/// Runs the fixed claim set (a)..(i) for one prime.
pub fn verify(surface: &HzSurface, cfg: &VerifyConfig) -> Result<VerifyReport> {
    let p = surface.params().p;
    let scan_cfg = ScanConfig {
        workers: cfg.workers,
        constants: cfg.constants,
        ..ScanConfig::new(cfg.n_max)
    };
    let report = scan(surface, &scan_cfg)?;

    let mut claims = vec![
        robin_claim(cfg.n_max.min(ROBIN_LIMIT)),
        paley_claim(surface, cfg.d_max),
        boundary_claim(surface, cfg.n_max)?,
    ];
    claims.extend(lemma1_claims(surface, cfg.n_max)?);
    for v in Lemma2Variant::ALL {
        claims.push(lemma2_claim(&report, v));
    }
    claims.push(theorem3_claim(&report));
    claims.push(remark_claim(&report));
    claims.push(n_min_claim(p, &cfg.constants)?);
    debug_assert!(claims
        .iter()
        .all(|c| c.status != Status::Fail || !c.witness.is_empty()));
    Ok(VerifyReport {
        p,
        claims,
        scan: report,
    })
}
