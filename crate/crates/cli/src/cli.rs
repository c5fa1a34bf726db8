use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kasami_core::correlation::Engine;
use kasami_core::families::{ExportFormat, FamilyKind};

#[derive(Parser, Debug)]
#[command(
    name = "kasami",
    version,
    about = "Generalized Kasami sequence families over GF(2^n)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Defining polynomial as hex, e.g. 0x43 for x^6 + x + 1.
    #[arg(long, global = true)]
    pub poly: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Field parameters.
    Field {
        #[command(subcommand)]
        action: FieldAction,
    },
    /// Sequence family generation.
    Family {
        #[command(subcommand)]
        action: FamilyAction,
    },
    /// Full periodic correlation distribution of a family.
    Corr(CorrArgs),
    /// Every checkable claim at one (n, k).
    Verify(VerifyArgs),
    /// The linear code spanned by the family.
    Code {
        #[command(subcommand)]
        action: CodeAction,
    },
    /// Exhaustive root and point counts for the associated field equations.
    Census(CensusArgs),
}

#[derive(Subcommand, Debug)]
pub enum FieldAction {
    Info(FieldArgs),
}

#[derive(Subcommand, Debug)]
pub enum FamilyAction {
    Gen(GenArgs),
}

#[derive(Subcommand, Debug)]
pub enum CodeAction {
    Weights(CodeArgs),
}

#[derive(Args, Debug)]
pub struct FieldArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct FamilySelect {
    #[arg(long)]
    pub n: u32,
    /// Exponent parameter; fixed to n/2 + 1 for the Kasami kinds.
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long, value_enum, default_value_t = KindArg::Fk)]
    pub kind: KindArg,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[command(flatten)]
    pub family: FamilySelect,
    #[arg(long, value_enum, default_value_t = FormatArg::Hex)]
    pub format: FormatArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CorrArgs {
    #[command(flatten)]
    pub family: FamilySelect,
    #[arg(long, value_enum, default_value_t = EngineArg::Spectral)]
    pub engine: EngineArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Lift the size limits on the engines.
    #[arg(long)]
    pub force: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub k: u32,
    /// Seed for the sampled checks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CodeArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Enumerate codewords above the default size limit.
    #[arg(long)]
    pub force: bool,
}

#[derive(Args, Debug)]
pub struct CensusArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run the scans above their default size limits.
    #[arg(long)]
    pub force: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum KindArg {
    Fk,
    SmallKasami,
    LargeKasami,
}

impl From<KindArg> for FamilyKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Fk => FamilyKind::GeneralizedFk,
            KindArg::SmallKasami => FamilyKind::SmallKasami,
            KindArg::LargeKasami => FamilyKind::LargeKasami,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum EngineArg {
    Brute,
    Spectral,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Brute => Engine::Brute,
            EngineArg::Spectral => Engine::Spectral,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormatArg {
    Bits,
    Hex,
    Json,
}

impl From<FormatArg> for ExportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Bits => ExportFormat::Bits,
            FormatArg::Hex => ExportFormat::Hex,
            FormatArg::Json => ExportFormat::Json,
        }
    }
}
