//! Class numbers of positive definite binary quadratic forms, the weighted
//! variant `h'`, the Hurwitz-type sum `H(n)`, and a persistent cache.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::{Arc, RwLock};

use crate::arith;
use crate::error::{Error, Result};
use crate::rational::{rat, rat_int, twelfths, Rational};

/// Largest prime the cache keeps square-root tables for; covers `|d| < 2e8`.
const MAX_SIEVE_PRIME: u64 = 1 << 13;
const MIN_SIEVE_PRIME: u64 = 1 << 8;
/// Distinct prime factors of any `k < |d| / 3` the sieve handles (`k < 2^27`).
const MAX_DISTINCT: usize = 8;

/// A negative discriminant `D <= -3` with `D = 0, 1 (mod 4)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Discriminant(i64);

impl Discriminant {
    pub fn new(value: i64) -> Result<Self> {
        if value <= -3 && matches!(value.rem_euclid(4), 0 | 1) {
            Ok(Discriminant(value))
        } else {
            Err(Error::InvalidDiscriminant(value))
        }
    }

    pub fn value(self) -> i64 {
        self.0
    }

    pub fn abs(self) -> u64 {
        self.0.unsigned_abs()
    }
}

impl TryFrom<i64> for Discriminant {
    type Error = Error;

    fn try_from(value: i64) -> Result<Self> {
        Discriminant::new(value)
    }
}

impl fmt::Display for Discriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Number of reduced primitive forms `(a, b, c)` with `b^2 - 4ac = d`.
///
/// Reduced means `|b| <= a <= c` with `b >= 0` whenever `|b| = a` or `a = c`.
/// Forms are grouped by `|b|`: each one is a factorization `a * c` of
/// `(b^2 - d) / 4` with `|b| <= a <= c`.
pub fn class_number(d: Discriminant) -> u64 {
    count_reduced_forms(d.abs(), arith::factorize)
}

fn count_reduced_forms(abs_d: u64, factor: impl Fn(u64) -> Vec<(u64, u32)>) -> u64 {
    let mut count = 0u64;
    let mut buf = Vec::new();
    let mut b = abs_d % 2;
    while 3 * b * b <= abs_d {
        let k = (b * b + abs_d) / 4;
        count += forms_with_b(&factor(k), b, k, &mut buf);
        b += 2;
    }
    count
}

/// Weighted count of reduced forms `(a, b, k / a)` for a fixed `b`, with `a`
/// running over the divisors of `k = (b^2 + |d|) / 4` in `[b, sqrt(k)]`.
/// `factors` is the factorization of `k`; `buf` is scratch space.
fn forms_with_b(factors: &[(u64, u32)], b: u64, k: u64, buf: &mut Vec<u64>) -> u64 {
    let a_max = arith::isqrt(k);
    buf.clear();
    buf.push(1);
    for &(q, e) in factors {
        for i in 0..buf.len() {
            let mut a = buf[i];
            for _ in 0..e {
                a *= q;
                if a > a_max {
                    break;
                }
                buf.push(a);
            }
        }
    }
    // a common factor of (a, b, c) must divide b and appear squared in k
    let imprimitive_possible = factors.iter().any(|&(q, e)| e >= 2 && b.is_multiple_of(q));
    let mut count = 0;
    for &a in buf.iter() {
        if a < b || (imprimitive_possible && arith::gcd(arith::gcd(a, b), k / a) != 1) {
            continue;
        }
        count += if b == 0 || a == b || a * a == k { 1 } else { 2 };
    }
    count
}

/// Factors every `(b^2 + |d|) / 4` of one discriminant at once by sieving
/// over `b` with the roots of `x^2 = -|d| (mod q)` for each odd prime `q`.
#[derive(Debug)]
struct FormSieve {
    limit: u64,
    primes: Vec<u64>,
    /// `roots[offsets[i] + r]` is a square root of `r` modulo `primes[i]`,
    /// or `u16::MAX` when `r` is a non-residue.
    roots: Vec<u16>,
    offsets: Vec<usize>,
}

impl FormSieve {
    fn new(limit: u64) -> Self {
        let primes: Vec<u64> = (3..=limit).filter(|&q| arith::is_prime(q)).collect();
        let mut roots = Vec::new();
        let mut offsets = Vec::with_capacity(primes.len());
        for &q in &primes {
            let base = roots.len();
            offsets.push(base);
            roots.resize(base + q as usize, u16::MAX);
            for x in 0..=q / 2 {
                roots[base + (x * x % q) as usize] = x as u16;
            }
        }
        FormSieve {
            limit,
            primes,
            roots,
            offsets,
        }
    }

    /// Whether every `k = (b^2 + |d|) / 4` with `3b^2 <= |d|` factors over the table.
    fn covers(&self, abs_d: u64) -> bool {
        self.limit * self.limit > abs_d / 3
    }

    fn class_number(&self, abs_d: u64) -> u64 {
        let b0 = abs_d % 2;
        let mut ks = Vec::new();
        let mut b = b0;
        while 3 * b * b <= abs_d {
            ks.push((b * b + abs_d) / 4);
            b += 2;
        }
        let mut rest = ks.clone();
        let mut factors = vec![(0u64, 0u32); ks.len() * MAX_DISTINCT];
        let mut lens = vec![0usize; ks.len()];
        let mut push = |t: usize, f: (u64, u32)| {
            factors[t * MAX_DISTINCT + lens[t]] = f;
            lens[t] += 1;
        };
        for (t, k) in rest.iter_mut().enumerate() {
            let e = k.trailing_zeros();
            if e > 0 {
                *k >>= e;
                push(t, (2, e));
            }
        }
        let k_max = ks.last().copied().unwrap_or(0);
        for (i, &q) in self.primes.iter().enumerate() {
            if q * q > k_max {
                break;
            }
            let target = (q - abs_d % q) % q;
            let r = self.roots[self.offsets[i] + target as usize];
            if r == u16::MAX {
                continue;
            }
            let r = r as u64;
            let pair = [r, q - r];
            let distinct = if r == 0 { 1 } else { 2 };
            for &root in &pair[..distinct] {
                let lifted = if root % 2 == b0 { root } else { root + q };
                let mut t = ((lifted - b0) / 2) as usize;
                while t < ks.len() {
                    let mut e = 0;
                    while rest[t] % q == 0 {
                        rest[t] /= q;
                        e += 1;
                    }
                    push(t, (q, e));
                    t += q as usize;
                }
            }
        }
        for (t, &r) in rest.iter().enumerate() {
            if r > 1 {
                push(t, (r, 1));
            }
        }
        let mut count = 0;
        let mut buf = Vec::new();
        for (t, &k) in ks.iter().enumerate() {
            let fs = &factors[t * MAX_DISTINCT..t * MAX_DISTINCT + lens[t]];
            count += forms_with_b(fs, b0 + 2 * t as u64, k, &mut buf);
        }
        count
    }
}

/// `h'(d)`: `1/3` at `d = -3`, `1/2` at `d = -4`, `h(d)` otherwise.
pub fn h_prime(d: Discriminant) -> Rational {
    match d.value() {
        -3 => rat(1, 3),
        -4 => rat(1, 2),
        _ => rat_int(class_number(d) as i64),
    }
}

/// `H(n) = sum_{f^2 | n} h'(-n / f^2)`, with `H(0) = -1/12`.
///
/// Terms whose argument is not a discriminant contribute nothing, so `H(n) = 0`
/// whenever `n = 1, 2 (mod 4)`.
pub fn hurwitz_h(n: i64) -> Result<Rational> {
    if n < 0 {
        return Err(Error::invalid(format!("H({n}) requires n >= 0")));
    }
    Ok(twelfths(hurwitz_h12_with(n as u64, class_number) as i128))
}

/// `12 * H(n)`, always an integer.
fn hurwitz_h12_with(n: u64, mut h: impl FnMut(Discriminant) -> u64) -> i64 {
    hurwitz_h12_factored(n, &arith::factorize(n), &mut h)
}

fn hurwitz_h12_factored(
    n: u64,
    factors: &[(u64, u32)],
    h: &mut impl FnMut(Discriminant) -> u64,
) -> i64 {
    if n == 0 {
        return -1;
    }
    if matches!(n % 4, 1 | 2) {
        return 0;
    }
    let halves: Vec<(u64, u32)> = factors
        .iter()
        .filter(|&&(_, e)| e >= 2)
        .map(|&(q, e)| (q, e / 2))
        .collect();
    let mut total = 0i64;
    for f in arith::divisors_from_factors(&halves) {
        let m = n / (f * f);
        if matches!(m % 4, 0 | 3) {
            total += match m {
                3 => 4,
                4 => 6,
                _ => 12 * h(Discriminant(-(m as i64))) as i64,
            };
        }
    }
    total
}

/// Class numbers keyed by discriminant.
pub type ClassTable = BTreeMap<i64, u64>;

/// Reads a cache file: one `<discriminant>\t<class number>` entry per line.
pub fn cache_load(path: impl AsRef<Path>) -> Result<ClassTable> {
    parse_table(&fs::read_to_string(path)?)
}

pub fn parse_table(text: &str) -> Result<ClassTable> {
    let mut table = ClassTable::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let parse_err = |msg: String| Error::Parse { line: line_no, msg };
        let (d, h) = line.split_once('\t').ok_or_else(|| {
            parse_err(format!(
                "expected `<discriminant>\\t<class number>`, got {line:?}"
            ))
        })?;
        let d: i64 = d
            .parse()
            .map_err(|_| parse_err(format!("bad discriminant {d:?}")))?;
        Discriminant::new(d).map_err(|e| parse_err(e.to_string()))?;
        let h: u64 = h
            .parse()
            .ok()
            .filter(|&h| h >= 1)
            .ok_or_else(|| parse_err(format!("bad class number {h:?}")))?;
        if table.insert(d, h).is_some() {
            return Err(parse_err(format!("duplicate discriminant {d}")));
        }
    }
    Ok(table)
}

/// Writes `table` sorted ascending by absolute discriminant, LF line endings.
pub fn cache_store(table: &ClassTable, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    for (d, h) in table.iter().rev() {
        writeln!(out, "{d}\t{h}")?;
    }
    out.flush()?;
    Ok(())
}

/// Memoizing class-number oracle shared by the formula modules.
///
/// Readers may call it from any number of threads; persisting it to disk is
/// the caller's job and must happen from a single writer.
#[derive(Debug, Default)]
pub struct ClassNumberCache {
    table: RwLock<HashMap<i64, u64>>,
    sieve: RwLock<Option<Arc<FormSieve>>>,
    hurwitz: RwLock<HashMap<u64, i64>>,
}

impl ClassNumberCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_table(table: ClassTable) -> Self {
        ClassNumberCache {
            table: RwLock::new(table.into_iter().collect()),
            sieve: RwLock::new(None),
            hurwitz: RwLock::default(),
        }
    }

    /// Loads `path` if it exists, otherwise starts empty.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        if path.exists() {
            Ok(Self::from_table(cache_load(path)?))
        } else {
            Ok(Self::new())
        }
    }

    pub fn table(&self) -> ClassTable {
        self.table
            .read()
            .unwrap()
            .iter()
            .map(|(&d, &h)| (d, h))
            .collect()
    }

    pub fn store(&self, path: impl AsRef<Path>) -> Result<()> {
        cache_store(&self.table(), path)
    }

    pub fn len(&self) -> usize {
        self.table.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, d: Discriminant) -> Option<u64> {
        self.table.read().unwrap().get(&d.value()).copied()
    }

    /// Builds the tables needed for `H(n)` with `n <= max_n` up front.
    pub fn reserve(&self, max_n: u64) {
        self.sieve_for(max_n);
    }

    fn sieve_for(&self, abs_d: u64) -> Option<Arc<FormSieve>> {
        if let Some(s) = self.sieve.read().unwrap().as_ref() {
            if s.covers(abs_d) {
                return Some(Arc::clone(s));
            }
        }
        let needed = arith::isqrt(abs_d / 3) + 1;
        if needed > MAX_SIEVE_PRIME {
            return None;
        }
        let mut guard = self.sieve.write().unwrap();
        let current = guard.as_ref().map_or(0, |s| s.limit);
        if current < needed {
            let limit = needed
                .max(2 * current)
                .clamp(MIN_SIEVE_PRIME, MAX_SIEVE_PRIME);
            *guard = Some(Arc::new(FormSieve::new(limit)));
        }
        guard.clone()
    }

    /// `h(d)`, memoized.
    pub fn class_number(&self, d: Discriminant) -> u64 {
        if let Some(h) = self.get(d) {
            return h;
        }
        let abs_d = d.abs();
        let h = match self.sieve_for(abs_d) {
            Some(sieve) => sieve.class_number(abs_d),
            None => class_number(d),
        };
        self.table.write().unwrap().insert(d.value(), h);
        h
    }

    pub fn h_prime(&self, d: Discriminant) -> Rational {
        match d.value() {
            -3 => rat(1, 3),
            -4 => rat(1, 2),
            _ => rat_int(self.class_number(d) as i64),
        }
    }

    pub fn hurwitz_h(&self, n: i64) -> Result<Rational> {
        if n < 0 {
            return Err(Error::invalid(format!("H({n}) requires n >= 0")));
        }
        Ok(twelfths(self.hurwitz_h12(n as u64) as i128))
    }

    /// `12 * H(n)`.
    pub fn hurwitz_h12(&self, n: u64) -> i64 {
        if let Some(&v) = self.hurwitz.read().unwrap().get(&n) {
            return v;
        }
        let v = hurwitz_h12_factored(n, &arith::factorize(n), &mut |d| self.class_number(d));
        self.hurwitz.write().unwrap().insert(n, v);
        v
    }
}
