//! `pgap`: generate synthetic character datasets, train a perceptron with the
//! scheduled extremal rule, compare its perceived geometry against ground
//! truth, and run the Hamming-similarity score demonstration.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use perception_gap::dataset::{self, GenerationParams};
use perception_gap::geometry::{geometry_report, GeometryReport};
use perception_gap::iris;
use perception_gap::report::{self, ExperimentReport, RunConfig};
use perception_gap::training::{self, TrainingConfig, TrainingOutcome};
use perception_gap::Error;

/// Everything succeeded (for `train`: the memory converged).
const EXIT_OK: u8 = 0;
/// Bad parameters or malformed input data.
const EXIT_VALIDATION: u8 = 2;
/// The filesystem got in the way.
const EXIT_IO: u8 = 3;
/// Training stopped at the epoch cap without converging.
const EXIT_EPOCH_LIMIT: u8 = 4;
/// A weight or threshold became non-finite during training.
const EXIT_DIVERGED: u8 = 5;

#[derive(Parser)]
#[command(
    name = "pgap",
    version,
    about = "Perceptron perception-gap toolkit",
    after_help = "Every flag can also be set through an environment variable with the \
                  PGAP_ prefix (for example PGAP_SEED=7). Exit codes: 0 success/converged, \
                  2 validation failure, 3 I/O failure, 4 epoch limit reached, 5 numeric \
                  divergence."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic character raster dataset as CSV.
    Generate(GenerateArgs),
    /// Train a one-vs-rest perceptron on a dataset CSV and report its
    /// perceived geometry.
    Train(TrainArgs),
    /// Recompute the geometry report for a previously saved memory.
    Geometry(GeometryArgs),
    /// Synthesize genuine/imposter similarity scores and report crispness.
    Iris(IrisArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Destination CSV path.
    #[arg(long, env = "PGAP_OUT")]
    out: PathBuf,
    /// Characters to render, one class per character.
    #[arg(long, env = "PGAP_CHARSET", default_value = "ABCDEFGHIJKLMNOPQRSTUVWXYZ")]
    charset: String,
    /// Instances per character class.
    #[arg(long, env = "PGAP_INSTANCES", default_value_t = 34)]
    instances: u32,
    #[arg(long, env = "PGAP_SEED", default_value_t = 42)]
    seed: u64,
    /// Per-pixel uniform noise amplitude (0-255).
    #[arg(long, env = "PGAP_NOISE", default_value_t = 32)]
    noise: u8,
    /// Maximum per-axis translation in pixels (0-3).
    #[arg(long, env = "PGAP_MAX_SHIFT", default_value_t = 1)]
    max_shift: u8,
    #[arg(long, env = "PGAP_INK", default_value_t = 255)]
    ink: u8,
    #[arg(long, env = "PGAP_BACKGROUND", default_value_t = 0)]
    background: u8,
}

#[derive(Args)]
struct TrainArgs {
    /// Dataset CSV produced by `generate` (or matching its format).
    dataset: PathBuf,
    /// Target character for the positive class.
    #[arg(long, env = "PGAP_TARGET", default_value_t = 'A')]
    target: char,
    #[arg(long, env = "PGAP_SEED", default_value_t = 42)]
    seed: u64,
    #[arg(long, env = "PGAP_MAX_EPOCHS", default_value_t = 1000)]
    max_epochs: u32,
    /// First epoch index fed to the rate schedule.
    #[arg(long, env = "PGAP_START_INDEX", default_value_t = 2)]
    start_index: u32,
    /// Tolerance around 1 for the ratio verdict.
    #[arg(long, env = "PGAP_TOL", default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, env = "PGAP_INIT_LOW", default_value_t = -1.0)]
    init_low: f64,
    #[arg(long, env = "PGAP_INIT_HIGH", default_value_t = 1.0)]
    init_high: f64,
    #[arg(long, env = "PGAP_INIT_THRESHOLD", default_value_t = 0.0)]
    init_threshold: f64,
    /// Write the per-epoch trace CSV here.
    #[arg(long, env = "PGAP_TRACE")]
    trace: Option<PathBuf>,
    /// Write the experiment report (JSON) here.
    #[arg(long, env = "PGAP_OUT")]
    out: Option<PathBuf>,
    /// Write the final memory here.
    #[arg(long, env = "PGAP_MEMORY")]
    memory: Option<PathBuf>,
}

#[derive(Args)]
struct GeometryArgs {
    /// Dataset CSV the memory was trained against.
    dataset: PathBuf,
    /// Memory file written by `train --memory`.
    #[arg(long, env = "PGAP_MEMORY")]
    memory: PathBuf,
    #[arg(long, env = "PGAP_TARGET", default_value_t = 'A')]
    target: char,
    #[arg(long, env = "PGAP_TOL", default_value_t = 1e-9)]
    tol: f64,
    /// Write the geometry report (JSON) here.
    #[arg(long, env = "PGAP_OUT")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct IrisArgs {
    /// Code length in bits.
    #[arg(long, env = "PGAP_LENGTH", default_value_t = 2048)]
    length: usize,
    /// Number of genuine pairs.
    #[arg(long, env = "PGAP_GENUINE", default_value_t = 500)]
    genuine: usize,
    /// Number of imposter pairs.
    #[arg(long, env = "PGAP_IMPOSTER", default_value_t = 500)]
    imposter: usize,
    /// Per-bit flip probability for genuine pairs, in [0, 0.5).
    #[arg(long, env = "PGAP_FLIP_RATE", default_value_t = 0.1)]
    flip_rate: f64,
    #[arg(long, env = "PGAP_SEED", default_value_t = 42)]
    seed: u64,
    /// Histogram bin count for the crispness report.
    #[arg(long, env = "PGAP_BINS", default_value_t = iris::DEFAULT_HISTOGRAM_BINS)]
    bins: usize,
    /// Write the `kind,score` CSV here.
    #[arg(long, env = "PGAP_OUT")]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Train(args) => cmd_train(args),
        Command::Geometry(args) => cmd_geometry(args),
        Command::Iris(args) => cmd_iris(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Io(_) => EXIT_IO,
        Error::NonFinite { .. } => EXIT_DIVERGED,
        _ => EXIT_VALIDATION,
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<u8, Error> {
    let params = GenerationParams {
        charset: args.charset.chars().collect(),
        instances_per_class: args.instances,
        seed: args.seed,
        noise_amplitude: args.noise,
        max_shift: args.max_shift,
        ink_level: args.ink,
        background_level: args.background,
    };
    let examples = dataset::generate(&params)?;
    dataset::save_csv(&examples, &args.out)?;
    println!(
        "wrote {} examples ({} classes x {} instances) to {}",
        examples.len(),
        params.charset.len(),
        params.instances_per_class,
        args.out.display()
    );
    Ok(EXIT_OK)
}

fn cmd_train(args: TrainArgs) -> Result<u8, Error> {
    let started = Instant::now();
    let examples = dataset::load_csv(&args.dataset)?;
    let task = dataset::make_binary_task(&examples, args.target)?;
    let config = TrainingConfig {
        max_epochs: args.max_epochs,
        seed: args.seed,
        init_low: args.init_low,
        init_high: args.init_high,
        initial_threshold: args.init_threshold,
        start_index: args.start_index,
    };

    let (memory, trace) = training::train(&task, &config)?;
    let geometry = geometry_report(&task, &memory, args.tol)?;

    if let Some(path) = &args.trace {
        training::save_trace_csv(&trace, path)?;
    }
    if let Some(path) = &args.memory {
        report::save_memory(&memory, path)?;
    }
    if let Some(path) = &args.out {
        let experiment = ExperimentReport::new(
            RunConfig {
                dataset_path: args.dataset.display().to_string(),
                target: args.target,
                training: config.clone(),
                tolerance: args.tol,
            },
            &trace,
            geometry.clone(),
        );
        report::save_experiment_report(&experiment, path)?;
    }

    println!(
        "classes: {} positive, {} negative ({} dimensions)",
        task.positives().len(),
        task.negatives().len(),
        task.dim()
    );
    match trace.outcome {
        TrainingOutcome::Converged(epoch) => println!("converged at epoch {epoch}"),
        TrainingOutcome::EpochLimitReached => {
            println!("epoch limit ({}) reached without convergence", config.max_epochs)
        }
    }
    print_geometry_summary(&geometry);
    eprintln!("elapsed: {:.3}s", started.elapsed().as_secs_f64());

    Ok(match trace.outcome {
        TrainingOutcome::Converged(_) => EXIT_OK,
        TrainingOutcome::EpochLimitReached => EXIT_EPOCH_LIMIT,
    })
}

fn cmd_geometry(args: GeometryArgs) -> Result<u8, Error> {
    let examples = dataset::load_csv(&args.dataset)?;
    let task = dataset::make_binary_task(&examples, args.target)?;
    let memory = report::load_memory(&args.memory)?;
    if memory.dim() != task.dim() {
        return Err(Error::DimensionMismatch { expected: task.dim(), actual: memory.dim() });
    }
    let geometry = geometry_report(&task, &memory, args.tol)?;
    if let Some(path) = &args.out {
        report::save_geometry_report(&geometry, path)?;
    }
    print_geometry_summary(&geometry);
    Ok(EXIT_OK)
}

fn cmd_iris(args: IrisArgs) -> Result<u8, Error> {
    let partition =
        iris::synthesize_scores(args.length, args.genuine, args.imposter, args.flip_rate, args.seed)?;
    let band = iris::safety_band(&partition)?;
    let crispness = iris::crispness_report(&partition, args.bins)?;
    if let Some(path) = &args.out {
        iris::save_scores_csv(&partition, path)?;
    }

    println!(
        "scores: {} genuine, {} imposter over {}-bit codes",
        partition.genuine_scores().len(),
        partition.imposter_scores().len(),
        args.length
    );
    println!("safety band: {band}");
    if band > 0.0 {
        println!("score classes are separated");
    } else {
        println!("score classes overlap");
    }
    println!("fraction of scores strictly inside (0,1): {}", crispness.fraction_interior);
    println!("histogram over [0,1] in {} bins:", args.bins);
    for (i, count) in crispness.histogram.iter().enumerate() {
        let lo = i as f64 / args.bins as f64;
        let hi = (i + 1) as f64 / args.bins as f64;
        println!("  [{lo:.3},{hi:.3}{} {count}", if i + 1 == args.bins { "]" } else { ")" });
    }
    Ok(EXIT_OK)
}

fn print_geometry_summary(geometry: &GeometryReport) {
    println!("activation gap D: {}", geometry.activation_gap);
    println!("perceived separation d*: {}", geometry.perceived_separation);
    println!("actual separation d: {}", geometry.actual_separation);
    println!("ratio d*/d: {}", geometry.separation_ratio);
    println!("verdict: {:?}", geometry.verdict);
    println!(
        "perceived diameters: positive {}, negative {}",
        geometry.perceived_diameter_positive, geometry.perceived_diameter_negative
    );
    println!(
        "actual diameters: positive {}, negative {}",
        geometry.actual_diameter_positive, geometry.actual_diameter_negative
    );
    if !geometry.trained {
        println!("memory is NOT trained on this dataset; the verdict is not meaningful");
    }
}
