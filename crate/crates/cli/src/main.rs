use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

/// Compare and align weighted networks with optimal transition couplings.
#[derive(Debug, Parser)]
#[command(name = "netotc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cost between two networks with solver diagnostics.
    Compare(PairArgs),
    /// Vertex and edge alignments between two networks.
    Align {
        #[command(flatten)]
        pair: PairArgs,
        /// Also emit the hard alignment ψ(u) = argmax_v π_v(u, v).
        #[arg(long)]
        hard: bool,
    },
    /// Isomorphism recovery rates on random network classes.
    Isomorph {
        /// Network class; repeat for several. Defaults to every class.
        #[arg(long = "class", value_enum)]
        classes: Vec<IsoClass>,
        #[arg(long, default_value_t = 30)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Block alignment between SBMs of different sizes.
    SbmBench {
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Alignment accuracy between random networks and their factors.
    FactorBench {
        /// Spread of the factor's vertex embedding.
        #[arg(long = "sigma", value_delimiter = ',', default_values_t = [2.5, 2.0, 1.5, 1.0])]
        sigmas: Vec<f64>,
        /// Relative slack of the factor condition; 0 for exact factors.
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Redraw pairs whose cost is not compatible with the factor map.
        #[arg(long)]
        compatible_only: bool,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// k-nearest-neighbour graph classification on a TU dataset.
    Classify {
        /// Directory holding the dataset files.
        #[arg(long)]
        dir: PathBuf,
        /// Dataset prefix, e.g. MUTAG.
        #[arg(long)]
        name: String,
        #[arg(long, value_enum, default_value = "attr")]
        cost: CostKind,
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long, default_value_t = 0.8)]
        train_fraction: f64,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// ExactOTC against the LP oracle on random tiny instances.
    OracleCheck {
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Args)]
struct PairArgs {
    /// First network (JSON).
    g1: PathBuf,
    /// Second network (JSON).
    g2: PathBuf,
    #[arg(long, value_enum)]
    cost: CostKind,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Copy, Args)]
struct SolverArgs {
    #[arg(long, value_enum, default_value = "exact")]
    solver: SolverKind,
    /// Entropic outer iterations.
    #[arg(long = "L", default_value_t = 10)]
    outer: usize,
    /// Entropic evaluation horizon.
    #[arg(long = "T", default_value_t = 50)]
    horizon: usize,
    #[arg(long, default_value_t = 100.0)]
    xi: f64,
    #[arg(long, default_value_t = 50)]
    sinkhorn_iters: usize,
}

#[derive(Debug, Clone, Args)]
struct OutputArgs {
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolverKind {
    Exact,
    Entropic,
    Onestep,
    Ot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CostKind {
    Identity,
    Attr,
    Degree,
    Sdegree,
    Eucl,
    Sqeucl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum IsoClass {
    ErSmallThird,
    ErSmallTwoThirds,
    ErLargeQuarter,
    ErLargeThreeQuarters,
    #[value(name = "sbm-7-7-7-7")]
    Sbm7777,
    #[value(name = "sbm-10-8-6")]
    Sbm1086,
    #[value(name = "sbm-7-7-7")]
    Sbm777,
    #[value(name = "weighted-012")]
    Weighted012,
    Lollipop,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            let doc = serde_json::json!({ "error": err.kind, "message": err.message });
            eprintln!("{doc}");
            ExitCode::from(1)
        }
    }
}
