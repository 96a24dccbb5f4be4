use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use hzbound_core::bounds::theorem3_bound;
use hzbound_core::classnum::{ClassNumberCache, Discriminant};
use hzbound_core::hz::{HzParams, HzSurface, SelfIntersection, TnOptions};
use hzbound_core::rational::{format_rational, format_real};
use hzbound_core::scan::{scan, ScanConfig};
use hzbound_core::surface::{self, c2_chain_lower, nine_d2_constant, SurfaceData};
use hzbound_core::verify::{verify, VerifyConfig};
use hzbound_core::{BoundConstants, Error};

use crate::args::{Cli, Command, GlobalOpts};

const CACHE_FILE: &str = "classnum.tsv";

#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) => CliError::Io(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

type CliResult<T> = std::result::Result<T, CliError>;

fn prime_params(p: u64, a: u64) -> CliResult<HzParams> {
    HzParams::new(p, a).map_err(|_| CliError::Invalid("p must be a prime ≡ 1 mod 4".into()))
}

/// Where the cache lives for this invocation, if anywhere.
fn cache_path(global: &GlobalOpts, out: Option<&Path>) -> Option<PathBuf> {
    if global.no_cache {
        return None;
    }
    if let Some(path) = &global.cache {
        return Some(path.clone());
    }
    let dir = out
        .and_then(Path::parent)
        .filter(|d| !d.as_os_str().is_empty())
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    Some(dir.join(CACHE_FILE))
}

struct CacheSession {
    cache: Arc<ClassNumberCache>,
    path: Option<PathBuf>,
    loaded: usize,
}

impl CacheSession {
    fn open(path: Option<PathBuf>) -> CliResult<Self> {
        let cache = match &path {
            Some(p) => ClassNumberCache::open(p).map_err(|e| match e {
                Error::Io(io) => io_err(p, io),
                other => CliError::Invalid(format!("{}: {other}", p.display())),
            })?,
            None => ClassNumberCache::new(),
        };
        let loaded = cache.len();
        Ok(CacheSession {
            cache: Arc::new(cache),
            path,
            loaded,
        })
    }

    fn close(self) -> CliResult<()> {
        match self.path {
            Some(path) if self.cache.len() != self.loaded => {
                self.cache.store(&path).map_err(|e| match e {
                    Error::Io(io) => io_err(&path, io),
                    other => CliError::from(other),
                })
            }
            _ => Ok(()),
        }
    }
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| io_err(path, e))
}

pub fn run(cli: Cli) -> CliResult<()> {
    let constants = BoundConstants::new(cli.global.rh);
    match cli.command {
        Command::Classnum { d } => {
            let d = Discriminant::new(d)?;
            let session = CacheSession::open(cache_path(&cli.global, None))?;
            println!("{}", session.cache.class_number(d));
            session.close()
        }
        Command::Selfint {
            p,
            n,
            a,
            include_ip,
            tol,
            allow_non_squarefree,
        } => {
            let params = prime_params(p, a)?;
            let session = CacheSession::open(cache_path(&cli.global, None))?;
            let surface = HzSurface::new(params, Arc::clone(&session.cache));
            let opts = TnOptions {
                include_ip,
                tol,
                allow_non_squarefree,
            };
            match surface.t_n_squared(n, opts)? {
                SelfIntersection::Exact(r) => println!("{}", format_rational(&r)),
                SelfIntersection::Approx(c) => {
                    println!("{} +- {:e}", format_real(c.value), c.error_bound)
                }
            }
            session.close()
        }
        Command::Scan {
            p,
            n_max,
            include_ip,
            tol,
            workers,
            out,
        } => {
            let params = prime_params(p, 1)?;
            let mut file = create(&out)?;
            let session = CacheSession::open(cache_path(&cli.global, Some(&out)))?;
            let surface = HzSurface::new(params, Arc::clone(&session.cache));
            let cfg = ScanConfig {
                n_max,
                include_ip,
                tol,
                workers,
                constants,
            };
            let report = scan(&surface, &cfg)?;
            report
                .write_csv(&mut file)
                .and_then(|_| file.flush())
                .map_err(|e| io_err(&out, e))?;
            println!("{}", report.summary_line());
            session.close()
        }
        Command::Verify {
            p,
            n_max,
            d_max,
            workers,
            out,
        } => {
            let params = prime_params(p, 1)?;
            let mut file = create(&out)?;
            let session = CacheSession::open(cache_path(&cli.global, Some(&out)))?;
            let surface = HzSurface::new(params, Arc::clone(&session.cache));
            let cfg = VerifyConfig {
                n_max,
                d_max,
                workers,
                constants,
            };
            let report = verify(&surface, &cfg)?;
            report
                .write_csv(&mut file)
                .and_then(|_| file.flush())
                .map_err(|e| io_err(&out, e))?;
            for c in &report.claims {
                if c.witness.is_empty() {
                    println!("{:<20} {}", c.claim_id, c.status);
                } else {
                    println!("{:<20} {}  {}", c.claim_id, c.status, c.witness);
                }
            }
            session.close()
        }
        Command::Chern { p } => chern(p, &constants),
        Command::SurfaceBound {
            c2,
            ksq,
            delta,
            sc,
            rho,
        } => {
            let s = SurfaceData::new(c2, ksq);
            println!("d2={}", format_real(s.d2));
            println!("nine_d2_bound={}", format_real(-9.0 * s.d2));
            println!(
                "exact_constant_bound={}",
                format_real(-nine_d2_constant() * s.d2)
            );
            if let (Some(delta), Some(sc), Some(rho)) = (delta, sc, rho) {
                let chain = c2_chain_lower(delta, sc, rho, s.d2)?;
                println!("chain_lower={}", format_real(chain));
            }
            Ok(())
        }
    }
}

fn chern(p: u64, constants: &BoundConstants) -> CliResult<()> {
    prime_params(p, 1)?;
    let zeta = surface::zeta_k_minus1(p)?;
    let sigma0 = surface::sigma0_sum_exact(p)?;
    let sigma0_upper = surface::vdg_sigma0_upper(p)?;
    let sigma1 = surface::sigma1_sum_exact(p)?;
    let q = surface::quotient_sing_lowers(p)?;
    let terms = surface::explicit_c2_terms(p)?;

    println!("p = {p}");
    println!("zeta_K(-1) = {}", format_rational(&zeta));
    println!(
        "volume (index 1) = {}",
        format_rational(&surface::volume(p, 1)?)
    );
    println!(
        "sigma0 sum = {sigma0} <= {} (van der Geer)",
        format_real(sigma0_upper)
    );
    println!(
        "sigma1 sum = {sigma1} <= {}",
        format_real(surface::sigma1_sum_upper(p)?)
    );
    println!(
        "cusp resolution curves <= {}",
        format_real(surface::cusp_curve_upper(p)?)
    );
    println!(
        "a2 = h(-4p) = {} >= {}",
        q.a2_exact,
        format_real(q.a2_lower)
    );
    println!("a3+ >= {}", format_real(q.a3p_lower));
    println!("a3- >= {}", format_real(q.a3m_lower));
    println!(
        "quotient singularity contribution >= {}",
        format_real(q.contribution_lower)
    );
    if q.small_p_warning {
        println!("warning: the quotient singularity contribution formula is stated for p > 500");
    }
    let listed: Vec<String> = terms.iter().map(|&t| format_real(t)).collect();
    println!("explicit bound terms = {}", listed.join(" "));
    println!(
        "9 * contribution lower = {}",
        format_real(9.0 * q.contribution_lower)
    );
    println!(
        "explicit C^2 bound = {}",
        format_real(surface::explicit_c2_bound(p)?)
    );
    println!(
        "p^(3/2) lower bound for T_N^2 = {}",
        format_real(theorem3_bound(p, constants)?)
    );
    Ok(())
}
