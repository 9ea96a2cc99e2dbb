use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gss_core::channel::DEFAULT_SEED;
use gss_core::{ChannelParams, Execution};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "gss", version, about = "Generalized simple streaming codes: rates, constructions, verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format (default: csv for tables, json for construct/verify).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write output to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,

    /// Seed for every random choice of the run.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads for parallel loops (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    /// Run every loop on the calling thread.
    #[arg(long, global = true)]
    pub sequential: bool,
}

impl Cli {
    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal, SS and GSS rates for parameter triples.
    Rates(RatesArgs),
    /// Maximum-rate dispersion vector for one triple.
    Construct(ParamArgs),
    /// Exhaustively check on-time recovery under every admissible pattern.
    Verify(VerifyArgs),
    /// Compare the brute-force maximum rate with the closed form for all triples up to tau-max.
    Oracle(OracleArgs),
    /// Gilbert-Elliott Monte Carlo comparing the GSS and SS codes.
    Simulate(SimulateArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Rates(_) => "rates",
            Command::Construct(_) => "construct",
            Command::Verify(_) => "verify",
            Command::Oracle(_) => "oracle",
            Command::Simulate(_) => "simulate",
        }
    }

    pub fn default_format(&self) -> Format {
        match self {
            Command::Construct(_) | Command::Verify(_) => Format::Json,
            _ => Format::Csv,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    #[arg(long)]
    pub a: u32,
    #[arg(long)]
    pub b: u32,
    #[arg(long)]
    pub tau: u32,
}

impl ParamArgs {
    pub fn params(&self) -> Result<ChannelParams, CliError> {
        ChannelParams::new(self.a, self.b, self.tau).map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Debug, Clone, Args)]
pub struct RatesArgs {
    #[arg(long, requires_all = ["b", "tau"])]
    pub a: Option<u32>,
    #[arg(long, requires_all = ["a", "tau"])]
    pub b: Option<u32>,
    #[arg(long, requires_all = ["a", "b"])]
    pub tau: Option<u32>,
    /// Explicit triples "a,b,tau" (repeatable).
    #[arg(long = "params", value_name = "A,B,TAU")]
    pub triples: Vec<String>,
    /// Sweep such as "a=1..3 b=3 tau=6" (inclusive ranges; invalid combinations skipped).
    #[arg(long)]
    pub sweep: Option<String>,
    /// The five reference triples (3,5,5), (4,5,10), (5,8,16), (9,15,15), (10,18,20).
    #[arg(long)]
    pub reference: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CodeKind {
    Gss,
    Ss,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long)]
    pub horizon: usize,
    /// Test only admissible patterns that admit no further erasure.
    #[arg(long)]
    pub maximal_only: bool,
    #[arg(long, value_enum, default_value = "gss")]
    pub code: CodeKind,
    /// Override the MDS dimension k (default n - r).
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub tau_max: u32,
    #[arg(long, default_value_t = 4)]
    pub entry_bound: u32,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = 1000)]
    pub length: usize,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    /// Gilbert-Elliott parameters as JSON (all five fields required).
    #[arg(long, value_name = "FILE")]
    pub ge_config: Option<PathBuf>,
    /// Write the first trial's erased GSS packet stream in binary framing.
    #[arg(long, value_name = "FILE")]
    pub stream_out: Option<PathBuf>,
}
