use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "fgel", version, about = "Weights, block models and good-model counts for free-group actions")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct Global {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Output format (csv is available for `growth` only, which defaults to it).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Limit on |A|^|T| for atom enumeration.
    #[arg(long, global = true)]
    pub budget_atoms: Option<u64>,
    /// Limit on brute-force enumerations.
    #[arg(long, global = true)]
    pub budget_enum: Option<u64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a weight file against the weight axioms.
    Validate {
        #[arg(long)]
        weight: PathBuf,
        /// Also require every entry to be a multiple of 1/n.
        #[arg(long)]
        n: Option<u64>,
    },
    /// F of a weight, or of the radius-k ball weight of its Markov measure.
    Fw {
        #[arg(long)]
        weight: PathBuf,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Denominator-n approximation of a weight.
    Round {
        #[arg(long)]
        weight: PathBuf,
        #[arg(long)]
        n: u64,
    },
    /// Denominator-n approximation of an A×B weight with a prescribed B marginal.
    RoundMarginal {
        #[arg(long)]
        weight: PathBuf,
        #[arg(long)]
        marginal: PathBuf,
        #[arg(long)]
        n: u64,
    },
    /// A homomorphism and labeling whose empirical weight is the given one.
    Realize {
        #[arg(long)]
        weight: PathBuf,
        /// Uniformly random block choices instead of first-fit.
        #[arg(long)]
        random: bool,
    },
    /// Uniform homomorphisms into Sym(n).
    SampleUniform {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        rank: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Samples from a stochastic block model.
    SampleSbm {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 1_000_000)]
        max_attempts: u64,
        #[arg(long, default_value_t = 1000)]
        burn_in: u64,
        #[arg(long, default_value_t = 100)]
        stride: u64,
    },
    /// (D, δ)-soficity of a given homomorphism, or of uniform samples.
    Sofic {
        #[arg(long, conflicts_with_all = ["n", "trials"])]
        hom: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        /// Comma-separated reduced words, e.g. "s1,S2,s1s2".
        #[arg(long, conflicts_with = "ball")]
        words: Option<String>,
        /// Use D = B(e, radius) minus the identity.
        #[arg(long)]
        ball: Option<usize>,
        #[arg(long)]
        delta: f64,
    },
    /// Exact number of pairs (σ, y) with W_{σ,y} = W.
    Zn {
        #[arg(long)]
        weight: PathBuf,
        /// Count by literal enumeration instead of the closed form.
        #[arg(long)]
        brute_force: bool,
    },
    /// Two-sided bounds on Z_n(W), evaluated in log space.
    Zbounds {
        #[arg(long)]
        weight: PathBuf,
    },
    /// Expected number of planted labelings for a joint denominator-n weight.
    ExpectedCount {
        #[arg(long)]
        weight: PathBuf,
        /// Reference homomorphism certifying a nonempty fiber (needed above level 0).
        #[arg(long, requires = "witness_labeling")]
        witness_hom: Option<PathBuf>,
        #[arg(long)]
        witness_labeling: Option<PathBuf>,
        #[arg(long)]
        brute_force: bool,
    },
    /// Exact good-model count for one homomorphism.
    GoodModels {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        hom: PathBuf,
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[arg(long)]
        eps: String,
        /// Planted labeling over the B factor of a joint measure.
        #[arg(long)]
        planted: Option<PathBuf>,
        /// Also list the good models.
        #[arg(long)]
        list: bool,
    },
    /// Monte-Carlo growth of expected good-model counts over a grid of n.
    Growth {
        #[arg(long)]
        measure: PathBuf,
        /// Treat the measure as a joint measure on A×B and plant its B marginal.
        #[arg(long)]
        planted: bool,
        /// "6..12", "6..12:2" or "6,8,10,12".
        #[arg(long, default_value = "6,8,10,12")]
        n: String,
        #[arg(long)]
        eps: String,
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// uniform, sbm, sbm:auto, sbm:enumerate, sbm:reject or sbm:mcmc.
        #[arg(long, default_value = "uniform")]
        sampler: String,
        #[arg(long, default_value_t = 1)]
        bracket_depth: usize,
    },
    /// Lower bound on the supremum over Markov joinings.
    JoinSearch {
        #[arg(long)]
        measure_a: PathBuf,
        #[arg(long)]
        measure_b: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 200)]
        iterations: usize,
    },
    /// Runs the exact-oracle checks on small random instances.
    Selftest {
        #[arg(long, default_value_t = 25)]
        instances: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodArg {
    Auto,
    Enumerate,
    Reject,
    Mcmc,
}
