// SPDX-License-Identifier: Apache-2.0

//! `xorpvss`: file-based driver for dealing, verification, disputes,
//! membership proofs, reconstruction and simulation.
//!
//! Every command prints one line to stdout (`OK ...`, `REJECT ...` or
//! `VERDICT ...`) and details to stderr. Exit codes: 0 success, 1 protocol
//! rejection or lying verdict, 2 usage or file errors, 3 parameter search
//! exhausted, 4 workspace locked.

mod cheat;
mod commands;
mod workspace;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cheat::{DealerCheat, ParticipantCheat};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    SearchExhausted(String),
    Locked(PathBuf),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::SearchExhausted(_) => 3,
            CliError::Locked(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::SearchExhausted(m) => f.write_str(m),
            CliError::Locked(p) => write!(f, "workspace is locked by another invocation ({})", p.display()),
        }
    }
}

impl From<xorpvss::Error> for CliError {
    fn from(e: xorpvss::Error) -> CliError {
        match e {
            xorpvss::Error::SearchExhausted { .. } => CliError::SearchExhausted(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

/// The stdout line and exit status of a command that ran to completion.
pub struct Outcome {
    pub line: String,
    pub success: bool,
}

impl Outcome {
    pub fn ok(line: impl Into<String>) -> Outcome {
        Outcome { line: line.into(), success: true }
    }

    pub fn reject(line: impl Into<String>) -> Outcome {
        Outcome { line: line.into(), success: false }
    }
}

#[derive(Parser, Debug)]
#[command(name = "xorpvss", version, about = "Publicly verifiable secret sharing with XOR-masked shares")]
struct Cli {
    /// Workspace directory holding params, board, keys, transcripts and reports.
    #[arg(long, global = true, default_value = ".")]
    workspace: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate or fix the group parameters (params.json).
    Params(ParamsArgs),
    /// Create a participant key (keys/<i>.json) or a standalone key file.
    Keygen(KeygenArgs),
    /// Deal a secret to participants 1..=n (board.json, dealer.json).
    Deal(DealArgs),
    /// Decrypt and check participant i's share against the commitments.
    Verify(IndexArg),
    /// Decrypt participant i's share.
    Decrypt(IndexArg),
    /// Run, or replay, a dispute over participant i's share.
    Dispute(DisputeArgs),
    /// Run the membership proof for participant i.
    Membership(MembershipArgs),
    /// Pool shares of the listed participants at a reconstructor.
    Reconstruct(ReconstructArgs),
    /// Run a scenario config and write its report.
    Simulate(SimulateArgs),
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false, id = "source")]
struct ParamsSourceArgs {
    /// Bit length of q for a generated group (requires --seed).
    #[arg(long, requires = "seed")]
    q_bits: Option<u64>,
    /// Use p = 23, q = 11, g = 2.
    #[arg(long)]
    fixed_toy: bool,
}

#[derive(Args, Debug)]
struct ParamsArgs {
    #[command(flatten)]
    source: ParamsSourceArgs,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct KeySourceArgs {
    /// Seed for drawing the private key.
    #[arg(long)]
    seed: Option<u64>,
    /// Explicit private key (decimal).
    #[arg(long)]
    sk: Option<String>,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct KeyTargetArgs {
    /// Participant index; writes keys/<index>.json.
    #[arg(long)]
    index: Option<u64>,
    /// Write the key here instead, e.g. for the reconstructor.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct KeygenArgs {
    #[command(flatten)]
    target: KeyTargetArgs,
    #[command(flatten)]
    source: KeySourceArgs,
}

#[derive(Args, Debug)]
struct DealArgs {
    /// Number of participants; keys/1..=n must exist.
    #[arg(long)]
    n: u64,
    /// Secret (decimal); the other coefficients come from --seed.
    #[arg(long, requires_all = ["k", "seed"], conflicts_with = "coeffs")]
    secret: Option<String>,
    /// Threshold.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Explicit polynomial coefficients F_0,F_1,... (decimal).
    #[arg(long, value_delimiter = ',', required_unless_present = "secret")]
    coeffs: Vec<String>,
}

#[derive(Args, Debug)]
struct IndexArg {
    #[arg(long)]
    index: u64,
}

#[derive(Args, Debug)]
struct DisputeArgs {
    #[arg(long, required_unless_present = "replay")]
    index: Option<u64>,
    /// lambdaN:V[,V] | share:S | masked:M
    #[arg(long, conflicts_with = "replay")]
    dealer_cheat: Option<DealerCheat>,
    /// A | alpha:A | masked:M
    #[arg(long, conflicts_with = "replay")]
    participant_cheat: Option<ParticipantCheat>,
    /// Re-derive the verdict of a recorded transcript.
    #[arg(long)]
    replay: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MembershipArgs {
    #[arg(long)]
    index: u64,
    /// Prove with this share (decimal) instead of the decrypted one.
    #[arg(long)]
    impostor_share: Option<String>,
    /// Seed for the verifier's challenge.
    #[arg(long)]
    challenge_seed: u64,
}

#[derive(Args, Debug)]
struct ReconstructArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    indices: Vec<u64>,
    #[arg(long)]
    reconstructor_key: PathBuf,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    /// Report path; defaults to reports/<config name>.json in the workspace.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = workspace::Workspace::open(&cli.workspace).and_then(|ws| commands::run(&ws, cli.command));
    match result {
        Ok(outcome) => {
            println!("{}", outcome.line);
            ExitCode::from(if outcome.success { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
