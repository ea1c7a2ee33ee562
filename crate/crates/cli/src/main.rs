mod commands;
mod recipes;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gapwidth::Fraction;
use num_rational::Ratio;

use report::Format;

/// Gap instances, reductions, pebble games and exact oracles.
#[derive(Parser, Debug)]
#[command(name = "gapwidth", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Size cap for the exact oracles (variables or vertices).
    #[arg(long, global = true)]
    pub cap: Option<usize>,

    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Work budget for game solvers and reductions.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Random instances.
    #[command(subcommand)]
    Gen(GenCommand),

    /// The parity gadget G(S), or G(S^0) with `--homogeneous`.
    Gadget {
        input: PathBuf,
        #[arg(long)]
        homogeneous: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },

    /// Reductions between instance types.
    #[command(subcommand)]
    Reduce(ReduceCommand),

    /// Pebble games on two structures or graphs.
    Game {
        kind: GameKind,
        #[arg(long)]
        k: usize,
        a: PathBuf,
        b: PathBuf,
        /// Writes the Spoiler certificate as JSON.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },

    /// Colour refinement of a graph.
    Refine { graph: PathBuf },

    /// C2-equivalence of two graphs.
    C2eq { g: PathBuf, h: PathBuf },

    /// Exact optimum by brute force.
    Oracle {
        kind: OracleKind,
        input: PathBuf,
        /// Clique size for `hisfree`.
        #[arg(long, default_value_t = 2)]
        h: usize,
    },

    /// The refinement invariant v_G and, when small, the exact cover number.
    Vcapprox { graph: PathBuf },

    /// Runs a checked experiment and reports every assertion.
    Verify(VerifyArgs),
}

#[derive(Subcommand, Debug)]
pub enum GenCommand {
    /// Uniform random 3XOR system.
    Xor {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// System `Ax = b` over a random incidence with `r·n` rows and random `b`.
    Incidence {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        r: usize,
        /// Rejection-sample until unique-neighbour expansion holds up to this size.
        #[arg(long)]
        s_max: Option<usize>,
        #[arg(long, value_parser = parse_fraction, default_value = "1")]
        beta: Fraction,
        #[arg(long, default_value_t = 1000)]
        retries: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Seed system S with its gadget pair G(S^0), G(S).
    GapPair {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long, value_parser = parse_fraction, default_value = "1/10")]
        epsilon: Fraction,
        #[arg(long, default_value_t = 0)]
        k_check: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Random d-regular graph.
    Regular {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Random d-regular bipartite graph with parts of size m.
    Bipartite {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum ReduceCommand {
    /// 3XOR to 3SAT, four clauses per equation (DIMACS).
    Xor2sat(IoArgs),
    /// 3XOR to label cover (JSON).
    Bipartite(IoArgs),
    /// Parallel repetition of a label-cover instance.
    Repeat {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long)]
        t: usize,
    },
    /// Long-code test to 3XOR.
    LcXor {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, value_parser = parse_ratio)]
        epsilon: Ratio<u64>,
        #[command(flatten)]
        side: LongCodeSidecars,
    },
    /// Layered long-code test to 3SAT (DIMACS).
    LcSat {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, value_parser = parse_ratio)]
        delta: Ratio<u64>,
        #[command(flatten)]
        side: LongCodeSidecars,
    },
    /// 3XOR to the FGLSS graph.
    Fglss {
        #[command(flatten)]
        io: IoArgs,
        /// Writes the vertex labels.
        #[arg(long)]
        labels: Option<PathBuf>,
    },
    /// Label cover to its co-partite graph.
    LcGraph(IoArgs),
    /// Weighted long-code graph over a co-partite graph whose parts are
    /// consecutive blocks of size `r`.
    DinurSafra {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        ds: DsArgs,
    },
    /// Replaces weighted vertices by independent copies.
    Unweight(IoArgs),
    /// 3XOR, repetition, long code (3XOR).
    PipelineXor {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, default_value_t = 1)]
        t: usize,
        #[arg(long, value_parser = parse_ratio)]
        epsilon: Ratio<u64>,
        #[command(flatten)]
        side: LongCodeSidecars,
    },
    /// 3XOR, repetition, layered long code (3SAT).
    PipelineSat {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, default_value_t = 1)]
        t: usize,
        #[arg(long, value_parser = parse_ratio)]
        delta: Ratio<u64>,
        #[command(flatten)]
        side: LongCodeSidecars,
    },
    /// 3XOR, repetition, co-partite graph, long-code graph, unweighted graph.
    PipelineVc {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, default_value_t = 1)]
        t: usize,
        #[command(flatten)]
        ds: DsArgs,
    },
}

#[derive(Args, Debug, Clone)]
pub struct IoArgs {
    /// Input file, `-` for stdin.
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct LongCodeSidecars {
    /// Writes the variable layout.
    #[arg(long)]
    pub layout: Option<PathBuf>,
    /// Writes the queries that collapsed to fewer than three variables.
    #[arg(long)]
    pub collapsed: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct DsArgs {
    #[arg(long)]
    pub r: usize,
    #[arg(long, value_parser = parse_ratio, default_value = "1/3")]
    pub p: Ratio<u64>,
    #[arg(long, default_value_t = 1)]
    pub l1: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GameKind {
    /// Existential k-pebble game, A into B.
    Exist,
    /// Bijective k-pebble game.
    Bij,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OracleKind {
    Maxxor,
    Maxcnf,
    Lcopt,
    Vc,
    Is,
    Hisfree,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Recipe {
    /// vc(FGLSS(I)) = 4m - m* on random systems.
    FglssIdentity,
    /// Lift inequalities and homogeneous satisfiability of gadget pairs.
    GadgetGap,
    /// C2-equivalent cubic graphs with different cover numbers.
    C2Witness,
    /// Dictators pass the long-code tests.
    LongcodeCompleteness,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    pub recipe: Recipe,
    /// Number of instances.
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    /// Variables of each seed system.
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// Equations (fglss-identity) or half the vertex count (c2-witness).
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub r: usize,
    #[arg(long, value_parser = parse_ratio, default_value = "1/4")]
    pub epsilon: Ratio<u64>,
    #[arg(long, default_value_t = 0)]
    pub k_check: usize,
    /// Resampling attempts for c2-witness.
    #[arg(long, default_value_t = 500)]
    pub retries: usize,
    /// System to encode (longcode-completeness).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Directory for instances and the report.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_ratio(s: &str) -> Result<Ratio<u64>, String> {
    s.parse::<Ratio<u64>>().map_err(|e| format!("`{s}`: {e}; expected a/b"))
}

fn parse_fraction(s: &str) -> Result<Fraction, String> {
    s.parse::<Fraction>().map_err(|e| format!("`{s}`: {e}; expected a/b"))
}

/// Check failure, budget refusal and invalid input map to distinct codes.
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.global.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(e) => {
            eprintln!("error: {e:#}");
            let budget = e
                .chain()
                .any(|c| c.downcast_ref::<gapwidth::Error>().is_some_and(|g| g.is_budget()));
            ExitCode::from(if budget { EXIT_BUDGET } else { EXIT_USAGE })
        }
    }
}
