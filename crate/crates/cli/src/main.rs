mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::Format;

#[derive(Debug, Parser)]
#[command(name = "fjseries", version, about = "Lattice invariants, congruence counts and Euler-product checks")]
pub struct Cli {
    /// Output format for report rows.
    #[arg(long, global = true, value_enum, env = "FJSERIES_FORMAT", default_value = "json")]
    pub format: Format,

    /// Worker threads for enumeration (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct LatticeArg {
    /// JSON file {"n": .., "gram": [[..], ..]}.
    #[arg(long)]
    pub lattice: PathBuf,
}

#[derive(Debug, Args)]
pub struct Rank1Args {
    #[arg(short = 't')]
    pub t: i64,
    #[arg(long, default_value_t = 200)]
    pub nmax: u64,
    /// Comma-separated bad primes (default: 2 and the primes of t).
    #[arg(long, value_delimiter = ',')]
    pub bad: Option<Vec<u64>>,
}

#[derive(Debug, Args)]
pub struct EvenRankArgs {
    #[command(flatten)]
    pub lattice: LatticeArg,
    #[arg(long, value_delimiter = ',', required = true)]
    pub primes: Vec<u64>,
    #[arg(long, default_value_t = 2)]
    pub kmax: u32,
    #[arg(long, default_value = "auto")]
    pub method: fjseries::congruence::CountMethod,
}

#[derive(Debug, Subcommand)]
pub enum SeriesCommand {
    /// zeta_xi = zeta zeta(2s)^{-1} L(s, chi_t) for S = [[2t]].
    VerifyRank1(Rank1Args),
    /// Local factors of zeta_xi for an even-rank lattice against counts.
    VerifyEvenrank(EvenRankArgs),
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Level q of the lattice.
    Level(LatticeArg),
    /// Whether the lattice is maximal, with a glue vector if not.
    Maximal(LatticeArg),
    /// n(xi; d) = #{s mod dS : Q(s) ≡ D (mod qd)}.
    Count {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(short = 'D', allow_negative_numbers = true)]
        d_disc: Option<i64>,
        #[arg(short = 'd')]
        d: u64,
        #[arg(long, default_value = "auto")]
        method: fjseries::congruence::CountMethod,
    },
    /// Local factor of zeta_xi at p (D = -q) and its expansion.
    EulerFactor {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(short = 'p', long = "prime")]
        p: u64,
        #[arg(long, default_value_t = 4)]
        kmax: usize,
    },
    /// Counts n(xi; p^k) against the closed form, per (p, k).
    VerifyEuler {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long, default_value_t = 50)]
        pmax: u64,
        #[arg(long, default_value_t = 3)]
        kmax: u32,
        /// Comma-separated bad primes (default: primes of 2 q det(S) |D|).
        #[arg(long, value_delimiter = ',')]
        bad: Option<Vec<u64>>,
        #[arg(long, default_value = "auto")]
        method: fjseries::congruence::CountMethod,
    },
    /// Same as `series verify-rank1`.
    VerifyRank1(Rank1Args),
    /// Same as `series verify-evenrank`.
    VerifyEvenrank(EvenRankArgs),
    /// Identity checks for the series of congruence counts.
    #[command(subcommand)]
    Series(SeriesCommand),
    /// Class numbers and the rank-one index for squarefree t.
    Rank1 {
        #[arg(long, default_value_t = 15)]
        tmax: i64,
    },
    /// Applies V_N^* to a coefficient table.
    Adjoint {
        #[arg(long)]
        table: PathBuf,
    },
    /// Convolution identity with a seeded class-number-one provider.
    CheckConvolution {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long)]
        weight: i64,
        #[arg(long, default_value_t = 60)]
        nmax: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(short = 'D', allow_negative_numbers = true)]
        d_disc: Option<i64>,
        #[arg(long, value_delimiter = ',')]
        bad: Option<Vec<u64>>,
    },
    /// Coefficients of the assembled Dirichlet series.
    Assemble {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long)]
        weight: i64,
        #[arg(long, default_value_t = 100)]
        nmax: u64,
        /// A(xi) as "p/q".
        #[arg(long, default_value = "1")]
        axi: String,
        /// JSON {"center_shift": "p/q", "factors": [{"p":..,"num":[..],"den":[..]}, ..]};
        /// L = 1 when omitted.
        #[arg(long)]
        lfunction: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        bad: Option<Vec<u64>>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
