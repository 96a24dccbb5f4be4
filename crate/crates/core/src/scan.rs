//! Scans of `T_N^2` over the split-prime family with the linearized bounds
//! evaluated alongside.

use std::io::Write;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::arith::{sigma_u64, BoundConstants};
use crate::bounds::{lemma2_lower, theorem3_bound, Lemma2Variant};
use crate::error::{Error, Result};
use crate::hz::{split_prime_products, HzSurface, SelfIntersection, TnOptions};
use crate::rational::{cmp_with_f64, format_rational, format_real, Rational};

pub const SCAN_HEADER: &str =
    "N,eligible,tn2,sigma_floor,lemma2_statement,lemma2_proof,viol_statement,viol_proof";

/// Exponent in the remark that `T_N^2 >= 0` once `N > p^{15/7}`.
pub const REMARK_EXPONENT: f64 = 15.0 / 7.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRecord {
    pub n: u64,
    pub eligible: bool,
    pub tn2: SelfIntersection,
    /// `-sigma_1(N) / 6`
    pub sigma_floor: Rational,
    /// `None` below `N = 3`, where the bound is undefined.
    pub lemma2_statement: Option<f64>,
    pub lemma2_proof: Option<f64>,
    pub viol_statement: bool,
    pub viol_proof: bool,
}

impl ScanRecord {
    pub fn csv_row(&self) -> String {
        let tn2 = match &self.tn2 {
            SelfIntersection::Exact(r) => format_rational(r),
            SelfIntersection::Approx(c) => format_real(c.value),
        };
        let opt = |x: Option<f64>| x.map(format_real).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{}",
            self.n,
            self.eligible,
            tn2,
            format_rational(&self.sigma_floor),
            opt(self.lemma2_statement),
            opt(self.lemma2_proof),
            self.viol_statement,
            self.viol_proof
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    pub n_max: u64,
    pub include_ip: bool,
    pub tol: f64,
    /// Worker threads; 0 uses the rayon default.
    pub workers: usize,
    pub constants: BoundConstants,
}

impl ScanConfig {
    pub fn new(n_max: u64) -> Self {
        ScanConfig {
            n_max,
            include_ip: false,
            tol: crate::hz::DEFAULT_TOL,
            workers: 0,
            constants: BoundConstants::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScanReport {
    pub p: u64,
    pub n_max: u64,
    pub records: Vec<ScanRecord>,
    pub theorem3_bound: f64,
}

impl ScanReport {
    /// The row with the smallest `T_N^2` (first one on ties).
    pub fn minimum(&self) -> Option<&ScanRecord> {
        self.records
            .iter()
            .reduce(|best, r| if tn2_less(&r.tn2, &best.tn2) { r } else { best })
    }

    pub fn remark_threshold(&self) -> f64 {
        (self.p as f64).powf(REMARK_EXPONENT)
    }

    pub fn summary_line(&self) -> String {
        match self.minimum() {
            None => format!("p={} n_max={}: no eligible N", self.p, self.n_max),
            Some(min) => format!(
                "p={} n_max={} rows={} min_tn2={} argmin={} theorem3_bound={} argmin_le_p^(15/7)={}",
                self.p,
                self.n_max,
                self.records.len(),
                tn2_text(&min.tn2),
                min.n,
                format_real(self.theorem3_bound),
                (min.n as f64) <= self.remark_threshold()
            ),
        }
    }

    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "{SCAN_HEADER}")?;
        for r in &self.records {
            writeln!(out, "{}", r.csv_row())?;
        }
        Ok(())
    }
}

pub fn tn2_text(t: &SelfIntersection) -> String {
    match t {
        SelfIntersection::Exact(r) => format_rational(r),
        SelfIntersection::Approx(c) => format_real(c.value),
    }
}

fn tn2_less(a: &SelfIntersection, b: &SelfIntersection) -> bool {
    match (a, b) {
        (SelfIntersection::Exact(x), SelfIntersection::Exact(y)) => x < y,
        _ => a.to_f64() < b.to_f64(),
    }
}

/// `t < bound`, exactly when `t` is rational.
pub fn below(t: &SelfIntersection, bound: f64) -> bool {
    match t {
        SelfIntersection::Exact(r) => cmp_with_f64(r, bound).is_lt(),
        SelfIntersection::Approx(c) => c.value < bound,
    }
}

pub fn scan_record(surface: &HzSurface, n: u64, cfg: &ScanConfig) -> Result<ScanRecord> {
    let p = surface.params().p;
    let opts = TnOptions {
        include_ip: cfg.include_ip,
        tol: cfg.tol,
        allow_non_squarefree: false,
    };
    let tn2 = surface.t_n_squared(n, opts)?;
    let sigma_floor = -Rational::new(BigInt::from(sigma_u64(1, n)), BigInt::from(6));
    let bound = |v| {
        (n >= 3)
            .then(|| lemma2_lower(p, n, v, &cfg.constants))
            .transpose()
    };
    let lemma2_statement = bound(Lemma2Variant::Statement)?;
    let lemma2_proof = bound(Lemma2Variant::Proof)?;
    Ok(ScanRecord {
        n,
        eligible: surface.is_eligible(n),
        viol_statement: lemma2_statement.is_some_and(|b| below(&tn2, b)),
        viol_proof: lemma2_proof.is_some_and(|b| below(&tn2, b)),
        tn2,
        sigma_floor,
        lemma2_statement,
        lemma2_proof,
    })
}

/// Evaluates every `N` of the split-prime family up to `n_max`. Rows come back
/// in ascending `N` regardless of the worker count.
pub fn scan(surface: &HzSurface, cfg: &ScanConfig) -> Result<ScanReport> {
    let p = surface.params().p;
    let family = split_prime_products(p, cfg.n_max, false);
    if let Some(&largest) = family.last() {
        surface.cache().reserve(4 * largest * largest / p);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    let records = pool.install(|| {
        family
            .par_iter()
            .map(|&n| scan_record(surface, n, cfg))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(ScanReport {
        p,
        n_max: cfg.n_max,
        records,
        theorem3_bound: theorem3_bound(p, &cfg.constants)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classnum::ClassNumberCache;
    use crate::hz::HzParams;
    use crate::rational::rat;
    use std::sync::Arc;

    fn surface(p: u64) -> HzSurface {
        HzSurface::new(
            HzParams::with_p(p).unwrap(),
            Arc::new(ClassNumberCache::new()),
        )
    }

    #[test]
    fn small_scans() {
        let report = scan(&surface(13), &ScanConfig::new(20)).unwrap();
        let ns: Vec<u64> = report.records.iter().map(|r| r.n).collect();
        assert_eq!(ns, vec![3, 17]);
        let min = report.minimum().unwrap();
        assert_eq!(min.n, 3);
        assert_eq!(min.tn2.exact().unwrap(), &rat(-2, 3));
        assert!(min.viol_statement);
        assert!(min.viol_proof);
        assert!(report.summary_line().contains("min_tn2=-2/3 argmin=3"));

        let empty = scan(&surface(13), &ScanConfig::new(2)).unwrap();
        assert!(empty.records.is_empty());
        assert!(empty.summary_line().ends_with("no eligible N"));

        let five = scan(&surface(5), &ScanConfig::new(12)).unwrap();
        assert_eq!(five.records.len(), 1);
        assert_eq!(five.records[0].n, 11);
    }

    #[test]
    fn rows_respect_sigma_floor_and_flags() {
        let report = scan(&surface(17), &ScanConfig::new(600)).unwrap();
        // 2 splits in Q(sqrt 17), so N = 2 has no lower-bound value
        assert_eq!(report.records[0].n, 2);
        assert_eq!(report.records[0].lemma2_statement, None);
        assert!(report.records[0].csv_row().ends_with(",,,false,false"));
        for r in &report.records {
            let t = r.tn2.exact().unwrap();
            assert!(t >= &r.sigma_floor);
            if let Some(b) = r.lemma2_statement {
                assert_eq!(r.viol_statement, cmp_with_f64(t, b).is_lt());
            }
        }
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let s = surface(13);
        let mut outputs = Vec::new();
        for workers in [1, 3] {
            let cfg = ScanConfig {
                workers,
                ..ScanConfig::new(300)
            };
            let mut buf = Vec::new();
            scan(&s, &cfg).unwrap().write_csv(&mut buf).unwrap();
            outputs.push(buf);
        }
        assert_eq!(outputs[0], outputs[1]);
        let text = String::from_utf8(outputs.pop().unwrap()).unwrap();
        assert!(text.starts_with(SCAN_HEADER));
        assert!(text.contains("\n3,true,-2/3,-2/3,"));
    }
}
