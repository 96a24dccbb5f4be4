use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "hzbound",
    version,
    about = "Self-intersection numbers of Hirzebruch-Zagier curves and the bounds audited against them"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Class-number cache file [default: classnum.tsv next to the output file,
    /// or in the working directory]
    #[arg(long, global = true, value_name = "PATH")]
    pub cache: Option<PathBuf>,

    /// Neither read nor write the class-number cache
    #[arg(long, global = true, conflicts_with = "cache")]
    pub no_cache: bool,

    /// Use the constants valid under the Riemann hypothesis
    #[arg(long, global = true)]
    pub rh: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Class number h(d) of a negative discriminant
    Classnum {
        #[arg(short = 'd', allow_negative_numbers = true)]
        d: i64,
    },

    /// Self-intersection number T_N^2
    Selfint {
        #[arg(short = 'p')]
        p: u64,
        #[arg(short = 'N')]
        n: u64,
        /// Norm of the ideal a
        #[arg(long = "A", default_value_t = 1)]
        a: u64,
        /// Include the I_p term (the value becomes a certified decimal)
        #[arg(long)]
        include_ip: bool,
        /// Absolute error allowed in the I_p sum
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Evaluate the formula for N that is not squarefree
        #[arg(long)]
        allow_non_squarefree: bool,
    },

    /// T_N^2 over the split-prime family N <= n-max, as CSV
    Scan {
        #[arg(short = 'p')]
        p: u64,
        #[arg(long)]
        n_max: u64,
        #[arg(long)]
        include_ip: bool,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Worker threads (0 = one per core); the output does not depend on it
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[arg(short = 'o', value_name = "PATH")]
        out: PathBuf,
    },

    /// Audit every printed inequality against exact values, as CSV
    Verify {
        #[arg(short = 'p')]
        p: u64,
        #[arg(long)]
        n_max: u64,
        #[arg(long)]
        d_max: u64,
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[arg(short = 'o', value_name = "PATH")]
        out: PathBuf,
    },

    /// zeta_K(-1), volume, cusp and quotient-singularity estimates, and the
    /// explicit C^2 bound
    Chern {
        #[arg(short = 'p')]
        p: u64,
    },

    /// Miyaoka-type bounds for a curve on a surface with given Chern numbers
    SurfaceBound {
        #[arg(long, allow_negative_numbers = true)]
        c2: f64,
        #[arg(long, allow_negative_numbers = true)]
        ksq: f64,
        #[arg(long, requires_all = ["sc", "rho"])]
        delta: Option<f64>,
        #[arg(long, requires_all = ["delta", "rho"])]
        sc: Option<f64>,
        #[arg(long, requires_all = ["delta", "sc"])]
        rho: Option<f64>,
    },
}
