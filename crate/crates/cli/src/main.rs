//! `charlab`: batch commands over the character-sum toolkit.
//!
//! Exit codes: 0 ok, 1 threshold violated, 2 usage, 3 resource.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "charlab",
    version,
    about = "Character sums, pretentious distances and Euler-product constants"
)]
struct Cli {
    /// Directory for CSV/JSON artifacts and the run manifest; stdout if absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker thread cap (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for sampled scans.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Maximal partial sums M(chi) for one modulus or a family scan.
    Msum(commands::MsumArgs),
    /// Mean-weight identity, z_l positivity and S_j closed form sweep.
    Identities(commands::IdentitiesArgs),
    /// The constants C_m(a) from truncated Euler products.
    Cma(commands::CmaArgs),
    /// Residuals of prime sums in a class against C_m(a).
    Lz(commands::LzArgs),
    /// Sums of C_m(a) over the cosets of ker(psi).
    Coset(commands::CosetArgs),
    /// S_j-weighted log(K/L) against the small-prime cosine sum.
    Controlerr(commands::ControlErrArgs),
    /// The extremal-character construction pipeline.
    Construct(Box<commands::ConstructArgs>),
    /// Plot-ready columns from an earlier CSV.
    Plotdata(commands::PlotdataArgs),
}

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
pub enum Failure {
    Threshold(String),
    Usage(String),
    Resource(String),
    Other(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        use charlab_core::Error as E;
        match e.downcast_ref::<E>() {
            Some(E::Resource(_)) | Some(E::EmptyTable(_)) => Self::Resource(format!("{e:#}")),
            Some(E::Domain(_)) | Some(E::Parse { .. }) => Self::Usage(format!("{e:#}")),
            _ => Self::Other(e),
        }
    }
}

impl From<charlab_core::Error> for Failure {
    fn from(e: charlab_core::Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

pub type CmdResult = Result<(), Failure>;

/// Settings shared by every command.
#[derive(Debug, Clone)]
pub struct Global {
    pub out: Option<PathBuf>,
    pub seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    let global = Global {
        out: cli.out,
        seed: cli.seed,
    };
    let result = match cli.command {
        Command::Msum(a) => commands::msum(&global, a),
        Command::Identities(a) => commands::identities(&global, a),
        Command::Cma(a) => commands::cma(&global, a),
        Command::Lz(a) => commands::lz(&global, a),
        Command::Coset(a) => commands::coset(&global, a),
        Command::Controlerr(a) => commands::controlerr(&global, a),
        Command::Construct(a) => commands::construct(&global, *a),
        Command::Plotdata(a) => commands::plotdata(&global, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Threshold(msg)) => {
            eprintln!("threshold violated: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Resource(msg)) => {
            eprintln!("resource error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
