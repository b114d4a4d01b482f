use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pgapolar::PhiKind;
use serde::Serialize;

/// Design Eb/N0 used when neither design flag is given.
pub const DEFAULT_DESIGN_EBN0_DB: f64 = 1.0;

#[derive(Debug, Parser)]
#[command(
    name = "pgapolar",
    version,
    about = "Polar code construction (GA / piecewise GA), encoding, SC decoding and FER simulation"
)]
pub struct Cli {
    /// TOML file whose keys mirror the long flags; flags given on the
    /// command line take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank subchannels and write the reliability profile and frozen set.
    Construct(ConstructArgs),
    /// Count subchannels on which two constructions disagree.
    Compare(CompareArgs),
    /// Encode message blocks (one per line) into codewords.
    Encode(CodecArgs),
    /// SC-decode codewords or LLR vectors (one per line) into messages.
    Decode(DecodeArgs),
    /// Monte Carlo FER/BER over BPSK-AWGN.
    Simulate(SimulateArgs),
    /// Evaluate φ or its inverse.
    Phi(PhiArgs),
}

/// Code parameters shared by several subcommands.
#[derive(Debug, Clone, Args, Serialize)]
pub struct CodeArgs {
    /// Block length N (power of two).
    #[arg(long)]
    pub n: usize,
    /// Information length K.
    #[arg(long)]
    pub k: Option<usize>,
    /// Design SNR E_dB = 10·log10(R·Eb/N0) in dB.
    #[arg(long, allow_hyphen_values = true)]
    pub design_snr_db: Option<f64>,
    /// Design point as Eb/N0 in dB [default: 1 when no design flag is given].
    #[arg(long, allow_hyphen_values = true)]
    pub design_ebn0_db: Option<f64>,
    /// φ used by the construction.
    #[arg(long, default_value = "pga-approx")]
    pub method: PhiKind,
    /// Use this frozen-set file instead of constructing one.
    #[arg(long, value_name = "FILE")]
    pub frozen: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ConstructArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub code: CodeArgs,
    /// Output stem: writes STEM.csv (profile), STEM.frozen and STEM.json.
    /// Without it the profile CSV goes to stdout.
    #[arg(long, value_name = "STEM")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    /// |A_a \ A_b|: information channels of A that B freezes.
    Swapped,
    /// |A_a Δ A_b| = 2·swapped.
    Symmetric,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CompareArgs {
    /// First frozen-set file.
    #[arg(long, value_name = "FILE", requires = "b")]
    pub a: Option<PathBuf>,
    /// Second frozen-set file.
    #[arg(long, value_name = "FILE", requires = "a")]
    pub b: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub design_snr_db: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub design_ebn0_db: Option<f64>,
    /// Method of the first construction.
    #[arg(long, default_value = "ga-approx")]
    pub method_a: PhiKind,
    /// Method of the second construction.
    #[arg(long, default_value = "pga-approx")]
    pub method_b: PhiKind,
    #[arg(long, value_enum, default_value = "swapped")]
    pub metric: Metric,
    /// Print the differing information indices of each side.
    #[arg(long)]
    pub verbose: bool,
    /// Print the grid R ∈ {1/2, 1/3, 2/3} × N ∈ {128, ..., 2048},
    /// K = floor(N·R), method-a against method-b.
    #[arg(long, conflicts_with_all = ["a", "b", "n", "k"])]
    pub table1: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BitFormat {
    /// '0'/'1' characters.
    Bin,
    /// Hex digits, most significant bit first, last digit zero-padded.
    Hex,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CodecArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub code: CodeArgs,
    /// Input file ('-' for stdin).
    #[arg(long, default_value = "-")]
    pub input: PathBuf,
    /// Output file ('-' for stdout).
    #[arg(long, default_value = "-")]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value = "bin")]
    pub format: BitFormat,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DecodeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub codec: CodecArgs,
    /// Input lines are comma-separated channel LLRs instead of hard bits.
    #[arg(long)]
    pub llr: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub code: CodeArgs,
    /// Eb/N0 grid in dB, strictly increasing.
    #[arg(
        long,
        value_delimiter = ',',
        required = true,
        allow_hyphen_values = true
    )]
    pub ebn0_db: Vec<f64>,
    #[arg(long, default_value_t = pgapolar::CampaignSpec::DEFAULT_TARGET_FRAME_ERRORS)]
    pub target_frame_errors: u64,
    #[arg(long, default_value_t = pgapolar::CampaignSpec::DEFAULT_MAX_FRAMES)]
    pub max_frames: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Results CSV path; a JSON copy with metadata is written next to it.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Worker threads [default: available parallelism].
    #[arg(long, env = "PGAPOLAR_WORKERS")]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(group(clap::ArgGroup::new("input").required(true).args(["x", "y"])))]
pub struct PhiArgs {
    /// Mean LLR(s) at which to evaluate φ.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x: Vec<f64>,
    /// Value(s) in [0, 1] at which to evaluate φ⁻¹.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub y: Vec<f64>,
    #[arg(long, default_value = "pga-approx")]
    pub kind: PhiKind,
    /// Quadrature nodes for the integral kinds.
    #[arg(long, default_value_t = pgapolar::QuadratureSpec::DEFAULT_NODES)]
    pub nodes: usize,
    /// Bisection iterations of the inverse.
    #[arg(long, default_value_t = 20)]
    pub iterations: u32,
}
