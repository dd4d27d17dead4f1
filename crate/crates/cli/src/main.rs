//! Batch command-line front door for the neighbourhood featurization
//! pipeline: parameter tables, neighbourhood selection, featurization,
//! simulation, classification and the validation experiments.

mod ops;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "nbhd",
    version,
    about = "Featurize and classify binary dynamics on a digraph via vertex neighbourhoods",
    after_help = ops::registry_help()
)]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute per-vertex parameter tables, or list the registry.
    Params(ParamsArgs),
    /// Rank vertices by a selection parameter and keep the top (or bottom) M.
    Select(SelectArgs),
    /// Turn a spike file into per-trial feature vectors.
    Featurize(FeaturizeArgs),
    /// Generate an Erdős–Rényi graph and simulate labelled stimuli on it.
    Simulate(SimulateArgs),
    /// Train and evaluate the SVM on a feature CSV.
    Classify(ClassifyArgs),
    /// End-to-end run: select, featurize, split, train, test, cross-validate.
    Experiment(ExperimentArgs),
    /// Count how many top-ranked neighbourhoods cover a fraction of the graph.
    Cover(CoverArgs),
    /// Run a control experiment and compare it against the standard pipeline.
    Validate(ValidateArgs),
}

#[derive(Args, serde::Serialize)]
struct ParamsArgs {
    /// Print the parameter registry and exit.
    #[arg(long, default_value_t = false)]
    list: bool,
    /// Edge list file.
    #[arg(long, required_unless_present = "list")]
    graph: Option<String>,
    /// Vertex count override (default: max id + 1).
    #[arg(long)]
    n_vertices: Option<usize>,
    /// Comma-separated parameter codes.
    #[arg(long, required_unless_present = "list")]
    codes: Option<String>,
    /// Output CSV path.
    #[arg(long, required_unless_present = "list")]
    out: Option<String>,
    /// Restrict to a vertex range `start:end` (half-open) for sharding;
    /// shards can be computed independently and concatenated.
    #[arg(long)]
    vertex_range: Option<String>,
}

#[derive(Args, serde::Serialize)]
struct SelectArgs {
    #[arg(long)]
    graph: String,
    #[arg(long)]
    n_vertices: Option<usize>,
    /// Selection parameter code.
    #[arg(long)]
    code: String,
    /// Number of neighbourhoods to keep.
    #[arg(long, default_value_t = 50)]
    m: usize,
    /// Which end of the ranking: top or bottom.
    #[arg(long, default_value = "top")]
    end: String,
    #[arg(long)]
    out: String,
}

#[derive(Args, serde::Serialize)]
struct FeaturizeArgs {
    #[arg(long)]
    graph: String,
    #[arg(long)]
    n_vertices: Option<usize>,
    /// Spike CSV (`trial,label,vertex,time_ms`).
    #[arg(long)]
    spikes: String,
    #[arg(long)]
    selection_code: String,
    #[arg(long)]
    feature_code: String,
    #[arg(long, default_value_t = 50)]
    m: usize,
    #[arg(long, default_value = "top")]
    end: String,
    /// Binning interval start, ms.
    #[arg(long, default_value_t = 10.0)]
    bin_start: f64,
    /// Binning interval end, ms.
    #[arg(long, default_value_t = 60.0)]
    bin_end: f64,
    /// Number of time bins.
    #[arg(long, default_value_t = 2)]
    bins: usize,
    #[arg(long)]
    out: String,
}

#[derive(Args, serde::Serialize, Clone)]
struct SimulateArgs {
    /// Vertex count.
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Edge probability.
    #[arg(long, default_value_t = 0.01)]
    p: f64,
    #[arg(long, default_value_t = 8)]
    classes: usize,
    /// Stimulus windows per class.
    #[arg(long, default_value_t = 100)]
    repeats: usize,
    #[arg(long, default_value_t = 100)]
    receptors_per_class: usize,
    #[arg(long, default_value_t = 200.0)]
    window_ms: f64,
    #[arg(long, default_value_t = 5.0)]
    stim_duration_ms: f64,
    #[arg(long, default_value_t = 10.0)]
    onset_jitter_ms: f64,
    #[arg(long, default_value_t = 3.0)]
    noise_strength: f64,
    #[arg(long, default_value_t = 10.0)]
    exclusion_ms: f64,
    #[arg(long, default_value_t = 1.0)]
    strength_min: f64,
    #[arg(long, default_value_t = 2.0)]
    strength_max: f64,
    /// RNG seed (graph, receptors and dynamics derive from it).
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out_dir: String,
}

#[derive(Args, serde::Serialize)]
struct ClassifyArgs {
    /// Feature CSV (`label,v_1,...`).
    #[arg(long)]
    features: String,
    #[arg(long, default_value_t = 0.6)]
    train_fraction: f64,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: String,
}

#[derive(Args, serde::Serialize)]
struct ExperimentArgs {
    /// Edge list file; omit when `--simulate` generates one.
    #[arg(long, required_unless_present = "simulate")]
    graph: Option<String>,
    #[arg(long)]
    n_vertices: Option<usize>,
    /// Spike CSV; omit when `--simulate` generates one.
    #[arg(long, required_unless_present = "simulate")]
    spikes: Option<String>,
    /// Generate graph and dynamics instead of reading them.
    #[arg(long, default_value_t = false)]
    simulate: bool,
    #[command(flatten)]
    sim: SimDefaults,
    /// Comma-separated selection parameter codes.
    #[arg(long)]
    selection_codes: String,
    /// Comma-separated feature parameter codes.
    #[arg(long)]
    feature_codes: String,
    #[arg(long, default_value_t = 50)]
    m: usize,
    /// top, bottom, or both.
    #[arg(long, default_value = "top")]
    end: String,
    #[arg(long, default_value_t = 10.0)]
    bin_start: f64,
    #[arg(long, default_value_t = 200.0)]
    bin_end: f64,
    #[arg(long, default_value_t = 2)]
    bins: usize,
    #[arg(long, default_value_t = 0.6)]
    train_fraction: f64,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    /// Validation mode: random-selection, centres-only, degree-matched,
    /// fake-neighbourhoods or shuffled-activity.
    #[arg(long)]
    validation: Option<String>,
    /// Iterations for the random-selection mode.
    #[arg(long, default_value_t = 20)]
    iterations: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out_dir: String,
}

/// Simulation knobs reused by `experiment --simulate`.
#[derive(Args, serde::Serialize, Clone)]
struct SimDefaults {
    #[arg(long, default_value_t = 1000)]
    sim_n: usize,
    #[arg(long, default_value_t = 0.01)]
    sim_p: f64,
    #[arg(long, default_value_t = 8)]
    sim_classes: usize,
    #[arg(long, default_value_t = 100)]
    sim_repeats: usize,
    #[arg(long, default_value_t = 100)]
    sim_receptors: usize,
}

#[derive(Args, serde::Serialize)]
struct CoverArgs {
    #[arg(long)]
    graph: String,
    #[arg(long)]
    n_vertices: Option<usize>,
    /// Ranking parameter code.
    #[arg(long)]
    code: String,
    #[arg(long, default_value = "top")]
    end: String,
    /// Coverage fraction in (0, 1].
    #[arg(long, default_value_t = 0.9)]
    fraction: f64,
    /// Optional JSON output path; the result always prints to stdout.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, serde::Serialize)]
struct ValidateArgs {
    #[arg(long)]
    graph: String,
    #[arg(long)]
    n_vertices: Option<usize>,
    #[arg(long)]
    spikes: String,
    /// Control mode to compare against the standard pipeline.
    #[arg(long)]
    mode: String,
    #[arg(long)]
    selection_code: String,
    #[arg(long)]
    feature_code: String,
    #[arg(long, default_value_t = 50)]
    m: usize,
    #[arg(long, default_value = "top")]
    end: String,
    #[arg(long, default_value_t = 10.0)]
    bin_start: f64,
    #[arg(long, default_value_t = 200.0)]
    bin_end: f64,
    #[arg(long, default_value_t = 2)]
    bins: usize,
    #[arg(long, default_value_t = 0.6)]
    train_fraction: f64,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[arg(long, default_value_t = 20)]
    iterations: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out_dir: String,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()?;
    }
    match cli.command {
        Command::Params(args) => ops::cmd_params(args),
        Command::Select(args) => ops::cmd_select(args),
        Command::Featurize(args) => ops::cmd_featurize(args),
        Command::Simulate(args) => ops::cmd_simulate(args),
        Command::Classify(args) => ops::cmd_classify(args),
        Command::Experiment(args) => ops::cmd_experiment(args),
        Command::Cover(args) => ops::cmd_cover(args),
        Command::Validate(args) => ops::cmd_validate(args),
    }
}
