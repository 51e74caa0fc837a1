mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use output::Format;

#[derive(Parser, Debug)]
#[command(name = "xfam", version, about = "Cross t-intersecting set families: bounds, constructions, shifting, and exhaustive checks")]
pub struct Cli {
    /// Output format (default: csv for `sweep`, json otherwise).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write the result here instead of stdout.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a closed-form bound.
    Bound(BoundArgs),
    /// Build a scattered or block family.
    Construct(ConstructArgs),
    /// Test whether families are (cross) t-intersecting; exit 1 if not.
    Check(FilesArgs),
    /// Necessary intersection points of one intersecting family or a cross tuple.
    Nip(FilesArgs),
    /// Apply one shift σ_ij, or shift to a fixed point.
    Shift(ShiftArgs),
    /// Run the reduction to the extremal shape and print the trace.
    Replay(ReplayArgs),
    /// Exhaustive maximisation over small ground sets.
    Search(SearchArgs),
    /// Tabulate a corollary bound over a parameter grid.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BoundMode {
    Main,
    Uniform,
    Nonuniform,
    Single,
}

#[derive(clap::Args, Debug)]
pub struct BoundArgs {
    #[arg(long, value_enum)]
    pub mode: BoundMode,
    #[arg(short = 'n')]
    pub n: usize,
    #[arg(short = 'r')]
    pub r: Option<usize>,
    #[arg(short = 't', long = "t")]
    pub t: Option<usize>,
    /// Uniformity (uniform mode) or window start (main/single modes).
    #[arg(short = 'k')]
    pub k: Option<usize>,
    /// Per-family window starts for main mode.
    #[arg(long, value_delimiter = ',')]
    pub ks: Option<Vec<usize>>,
    /// Per-family size caps k̂_j for main mode.
    #[arg(long, value_delimiter = ',')]
    pub caps: Option<Vec<usize>>,
    #[arg(long)]
    pub khat: Option<usize>,
    /// `count`, `product:<p>`, `uniform:<k>`, `level:<k>`, or `@file.json`;
    /// repeat once per family or give one for all.
    #[arg(long)]
    pub measure: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConstructKind {
    Scatter,
    Block,
}

#[derive(clap::Args, Debug)]
pub struct ConstructArgs {
    #[arg(value_enum)]
    pub kind: ConstructKind,
    #[arg(short = 'n')]
    pub n: usize,
    #[arg(short = 'a')]
    pub a: usize,
    #[arg(short = 't', long = "t")]
    pub t: Option<usize>,
    #[arg(long)]
    pub max_size: Option<usize>,
}

#[derive(clap::Args, Debug)]
pub struct FilesArgs {
    #[arg(short = 't', long = "t")]
    pub t: Option<usize>,
    #[arg(long, num_args = 1.., required = true)]
    pub files: Vec<PathBuf>,
}

#[derive(clap::Args, Debug)]
pub struct ShiftArgs {
    #[arg(long, num_args = 1.., required = true)]
    pub files: Vec<PathBuf>,
    #[arg(long, requires = "j")]
    pub i: Option<usize>,
    #[arg(long, requires = "i")]
    pub j: Option<usize>,
}

#[derive(clap::Args, Debug)]
pub struct ReplayArgs {
    #[arg(long, num_args = 1.., required = true)]
    pub files: Vec<PathBuf>,
    #[arg(short = 't', long = "t")]
    pub t: Option<usize>,
    #[arg(long)]
    pub measure: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    pub caps: Option<Vec<usize>>,
    /// Window start for a single family (default: the measure's).
    #[arg(short = 'k')]
    pub k: Option<usize>,
    /// Size cap for a single family (default: the measure's window end).
    #[arg(long)]
    pub khat: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SearchMode {
    Uniform,
    Nonuniform,
    Truncated,
    Single,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    Sum,
    Product,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RestrictionArg {
    UpClosed,
    Shifted,
    None,
}

#[derive(clap::Args, Debug)]
pub struct SearchArgs {
    #[arg(long, value_enum)]
    pub mode: SearchMode,
    #[arg(short = 'n')]
    pub n: usize,
    #[arg(short = 'k')]
    pub k: Option<usize>,
    #[arg(short = 'r')]
    pub r: Option<usize>,
    #[arg(short = 't', long = "t")]
    pub t: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub caps: Option<Vec<usize>>,
    #[arg(long)]
    pub khat: Option<usize>,
    #[arg(long)]
    pub measure: Vec<String>,
    #[arg(long, value_enum, default_value = "sum")]
    pub objective: ObjectiveArg,
    #[arg(long, value_enum, default_value = "up-closed")]
    pub restriction: RestrictionArg,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Include wall-clock time in the output.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SweepMode {
    Uniform,
    Nonuniform,
}

#[derive(clap::Args, Debug)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub mode: SweepMode,
    #[arg(long)]
    pub n_max: usize,
    #[arg(long, default_value_t = 3)]
    pub r_max: usize,
    #[arg(long, default_value_t = 2)]
    pub t_max: usize,
    /// Also run the exhaustive search where the guard allows it.
    #[arg(long)]
    pub oracle: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("xfam: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
