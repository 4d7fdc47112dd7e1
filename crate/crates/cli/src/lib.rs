//! The `tensorank` command line: named tensors, rank reports, generic ranks,
//! pencil analysis, norms, covering sets and stored tables.
//!
//! Every command reads and writes the JSON tensor format of
//! [`tensorank::io`], so commands compose through pipes. All randomness flows
//! from `--seed`, and objects are written with sorted keys, so equal inputs
//! give byte-identical output.

mod commands;
mod error;
mod output;

use std::io::{Read, Write};
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

pub use error::CliError;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "TENSORANK_THREADS";

#[derive(Parser, Debug)]
#[command(name = "tensorank", version, about = "Ranks, generic ranks and norms of small complex tensors")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// One line of JSON.
    Json,
    /// Tab-separated rows.
    Tsv,
    /// Indented JSON.
    Pretty,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a named tensor.
    Make(MakeArgs),
    /// Certified lower and upper bounds on the rank of a tensor.
    Rank(RankArgs),
    /// Generic rank of a shape by the randomized Jacobian test.
    Genrank(GenrankArgs),
    /// Exact rank of a tensor with a mode of size 2 from its matrix pencil.
    Pencil(PencilArgs),
    /// Spectral norm, nuclear norm and geometric measure.
    Norms(NormsArgs),
    /// Dominating and 3-separated sets of the Hamming graph of a shape.
    Domset(DomsetArgs),
    /// Stored reference values.
    Tables(TablesArgs),
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Tensor file; standard input when omitted or `-`.
    #[arg(long = "in", value_name = "FILE")]
    input: Option<PathBuf>,
    /// Denominator bound when floating entries must be read exactly.
    #[arg(long, default_value_t = 1_000_000)]
    max_den: u64,
}

#[derive(Args, Debug)]
struct MakeArgs {
    /// `w:D`, `ghz:N,D`, `identity:K,D`, `wkron2`, `w3-square` or `poly:FILE`.
    #[arg(long)]
    state: String,
    /// Scale to unit Frobenius norm (floating-point entries).
    #[arg(long)]
    normalize: bool,
}

#[derive(Args, Debug)]
struct RankArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Exact evidence only: no numeric fitting.
    #[arg(long)]
    exact: bool,
    /// Largest number of terms tried by the numeric fit.
    #[arg(long, value_name = "R")]
    cap: Option<usize>,
}

#[derive(Args, Debug)]
struct GenrankArgs {
    /// Comma-separated mode sizes.
    #[arg(long)]
    shape: String,
    /// Random points per candidate rank.
    #[arg(long, default_value_t = 3)]
    trials: usize,
    /// Prime modulus of the field.
    #[arg(long)]
    prime: Option<u64>,
}

#[derive(Args, Debug)]
struct PencilArgs {
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Args, Debug)]
struct NormsArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    spectral: bool,
    #[arg(long)]
    nuclear: bool,
    /// Geometric measure of entanglement.
    #[arg(long)]
    eta: bool,
    /// Random starts of the power method.
    #[arg(long)]
    starts: Option<usize>,
    /// Term cap of the nuclear solver.
    #[arg(long)]
    max_terms: Option<usize>,
    /// Relative duality gap accepted as verified.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args, Debug)]
struct DomsetArgs {
    /// Comma-separated mode sizes.
    #[arg(long)]
    shape: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Table {
    All,
    /// Generic ranks of `n^{×d}`.
    Qunit,
    /// Generic, maximal and orthogonal-basis ranks side by side.
    Comparison,
    /// Generic and maximal ranks of `3×3×p`.
    #[value(name = "33p")]
    ThreeThreeP,
}

#[derive(Args, Debug)]
struct TablesArgs {
    #[arg(long, value_enum, default_value_t = Table::All)]
    table: Table,
}

fn configure_threads(err: &mut dyn Write) {
    let Ok(v) = std::env::var(THREADS_ENV) else { return };
    match v.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            // a second call in the same process keeps the first pool
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        _ => {
            let _ = writeln!(err, "warning: ignoring {THREADS_ENV}={v:?}; expected a positive integer");
        }
    }
}

/// Runs one command line and returns the process exit code: 0 on success,
/// 1 on a failed computation, 2 on a usage error, 3 on malformed input and
/// 4 when a computation budget is exceeded.
pub fn dispatch(args: &[String], input: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    configure_threads(err);
    let mut ctx = commands::Context { seed: cli.seed, input, err };
    let result = match &cli.command {
        Command::Make(a) => commands::make(&mut ctx, a),
        Command::Rank(a) => commands::rank(&mut ctx, a),
        Command::Genrank(a) => commands::genrank(&mut ctx, a),
        Command::Pencil(a) => commands::pencil(&mut ctx, a),
        Command::Norms(a) => commands::norms(&mut ctx, a),
        Command::Domset(a) => commands::domset(&mut ctx, a),
        Command::Tables(a) => commands::tables(&mut ctx, a),
    };
    match result {
        Ok(o) => match out.write_all(o.render(cli.format).as_bytes()) {
            Ok(()) => 0,
            Err(_) => 1,
        },
        Err(e) => {
            let _ = writeln!(err, "{}", e.diagnostic());
            e.exit_code()
        }
    }
}
