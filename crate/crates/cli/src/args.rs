//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::document::Format;

#[derive(Debug, Parser, Serialize)]
#[command(name = "wishart-stc", version, about = "Largest-eigenvalue experiments for space-time code design")]
pub struct Cli {
    /// Root seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Histogram of the largest eigenvalue of a complex Wishart matrix.
    Density(DensityArgs),
    /// Translation (1), mode (2) and fitted-translation (3) tables.
    Tables(TablesArgs),
    /// Least-squares fit of the translation plane.
    FitD1(FitArgs),
    /// Pairwise error probability.
    #[command(subcommand)]
    Pep(PepCommand),
    /// Design-criterion report for a codebook.
    #[command(subcommand)]
    Criteria(CriteriaCommand),
    /// List the words of an example codebook.
    Examples(ExamplesArgs),
    /// Search for a codebook maximizing the minimum spectral distance.
    Search(SearchArgs),
    /// Monte Carlo error rate over the MIMO channel.
    Simulate(SimulateArgs),
}

impl Command {
    pub fn name(&self) -> String {
        match self {
            Command::Density(_) => "density".into(),
            Command::Tables(_) => "tables".into(),
            Command::FitD1(_) => "fit-d1".into(),
            Command::Pep(p) => format!(
                "pep {}",
                match p {
                    PepCommand::Closed(_) => "closed",
                    PepCommand::Quad(_) => "quad",
                    PepCommand::Mc(_) => "mc",
                    PepCommand::Compare(_) => "compare",
                }
            ),
            Command::Criteria(c) => format!(
                "criteria {}",
                match c {
                    CriteriaCommand::RankDet(_) => "rank-det",
                    CriteriaCommand::Trace(_) => "trace",
                    CriteriaCommand::Lmax(_) => "lmax",
                }
            ),
            Command::Examples(_) => "examples".into(),
            Command::Search(_) => "search".into(),
            Command::Simulate(_) => "simulate".into(),
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct DensityArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
    #[arg(long, default_value_t = 200_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 200)]
    pub bins: usize,
    /// Upper end of the histogram range; chosen from the ensemble when omitted.
    #[arg(long)]
    pub hi: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    /// Recompute from Monte Carlo draws.
    Computed,
    /// The reference values shipped with the library.
    Published,
}

#[derive(Debug, Args, Serialize)]
pub struct TablesArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub which: u8,
    #[arg(long, value_enum, default_value_t = Source::Computed)]
    pub source: Source,
    #[arg(long, default_value_t = 200_000)]
    pub trials: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct FitArgs {
    /// Mode differences to fit: the reference table or fresh Monte Carlo modes.
    #[arg(long, value_enum, default_value_t = Source::Published)]
    pub source: Source,
    #[arg(long, default_value_t = 200_000)]
    pub trials: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct LinkArgs {
    /// Transmit antennas.
    #[arg(long)]
    pub ntx: usize,
    /// Receive antennas.
    #[arg(long)]
    pub nrx: usize,
    /// Frame length in symbol times.
    #[arg(long)]
    pub frame: usize,
    #[arg(long)]
    pub n0: f64,
    /// Squared spectral distance between the two codewords.
    #[arg(long)]
    pub c: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct QuadArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub link: LinkArgs,
    #[arg(long, default_value_t = 1e-10)]
    pub rel_tol: f64,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PepCommand {
    /// Closed-form triple sum.
    Closed(LinkArgs),
    /// Adaptive quadrature of the averaging integral.
    Quad(QuadArgs),
    /// Monte Carlo pairwise error next to both analytic values.
    Mc(McArgs),
    /// Closed form against both quadrature variants.
    Compare(QuadArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExampleId {
    BinarySingular,
    Traceless,
    Quaternion,
    QuaternionModified,
}

/// Where a command gets its codebook from.
#[derive(Debug, Args, Serialize)]
pub struct BookSource {
    #[arg(long, value_enum, conflicts_with = "book")]
    pub example: Option<ExampleId>,
    /// `(x, z)` list for the traceless family: `x:re:im` items separated by `;`.
    #[arg(long)]
    pub params: Option<String>,
    /// Codebook file.
    #[arg(long)]
    pub book: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct McArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: BookSource,
    #[arg(long)]
    pub nrx: usize,
    #[arg(long)]
    pub n0: f64,
    /// Word indices `i,j`: transmit word i, compete against word j.
    #[arg(long, default_value = "0,1")]
    pub pair: String,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct CriteriaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: BookSource,
    /// Relative threshold for numerical rank.
    #[arg(long, default_value_t = wishart_stc::stc::DEFAULT_RANK_TOL)]
    pub tol_rank: f64,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CriteriaCommand {
    RankDet(CriteriaArgs),
    Trace(CriteriaArgs),
    Lmax(CriteriaArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct ExamplesArgs {
    #[arg(long, value_enum)]
    pub id: ExampleId,
    /// `(x, z)` list for the traceless family: `x:re:im` items separated by `;`.
    #[arg(long)]
    pub params: Option<String>,
    /// Also write the codebook file here.
    #[arg(long)]
    pub save: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Exhaustive,
    Greedy,
}

#[derive(Debug, Args, Serialize)]
pub struct SearchArgs {
    /// Comma-separated symbols, each `re`, `re:im`, `i` or `-i`.
    #[arg(long, allow_hyphen_values = true)]
    pub alphabet: String,
    #[arg(long)]
    pub ntx: usize,
    #[arg(long)]
    pub frame: usize,
    #[arg(long)]
    pub size: usize,
    #[arg(long, value_enum, default_value_t = Strategy::Exhaustive)]
    pub strategy: Strategy,
    /// Subset limit for exhaustive search (default 1000000), restart count
    /// for greedy search (default 32).
    #[arg(long)]
    pub budget: Option<usize>,
    /// Also write the codebook file here.
    #[arg(long)]
    pub save: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormArg {
    Spectral,
    Frobenius,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SimMode {
    Pairwise,
    Word,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: BookSource,
    #[arg(long)]
    pub nrx: usize,
    #[arg(long)]
    pub n0: f64,
    #[arg(long, value_enum, default_value_t = NormArg::Spectral)]
    pub norm: NormArg,
    #[arg(long, value_enum, default_value_t = SimMode::Pairwise)]
    pub mode: SimMode,
    /// Word indices `i,j` for pairwise mode.
    #[arg(long, default_value = "0,1")]
    pub pair: String,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
}
