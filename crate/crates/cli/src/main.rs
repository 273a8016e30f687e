//! `ipm-fs`: generate synthetic data and run feature selection on CSV files.

mod report;

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ipm_fs::csv_io::{read_csv, write_csv, LabelColumn};
use ipm_fs::evaluate::{evaluate_subset, train_test_split};
use ipm_fs::synthetic::{gen_synthetic, SyntheticSpec};
use ipm_fs::{
    select, standardize, Epsilon, EstimatorChoice, Execution, Method, SelectionConfig,
    SinkhornConfig, Standardizer,
};

use crate::report::{Evaluation, RunReport};

#[derive(Parser)]
#[command(name = "ipm-fs", version, about = "Distribution-distance feature selection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic dataset as CSV.
    Synth(SynthArgs),
    /// Select features from a labelled CSV and print a JSON report.
    Select(SelectArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// JSON file with n_per_class, n_classes, n_features, informative,
    /// shift, noise_sigma (optional) and seed.
    #[arg(long)]
    spec: PathBuf,
    /// Output file; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Twd,
    Fawd,
    Bewd,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum EstimatorArg {
    Exact1d,
    Sinkhorn,
    Mmd,
}

#[derive(Args)]
struct SelectArgs {
    /// Input CSV; stdin if absent or "-".
    #[arg(long)]
    input: Option<PathBuf>,
    /// Label column: header name or zero-based index. Defaults to the last column.
    #[arg(long)]
    label_col: Option<String>,
    /// The first line is a header (default).
    #[arg(long, overrides_with = "no_header")]
    header: bool,
    /// The first line is data.
    #[arg(long, overrides_with = "header")]
    no_header: bool,
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Number of features to select.
    #[arg(short = 'm', long, value_parser = clap::value_parser!(u64).range(1..))]
    num_features: u64,
    /// Distance estimator. Defaults to exact1d for twd and sinkhorn otherwise.
    #[arg(long, value_enum)]
    estimator: Option<EstimatorArg>,
    /// Sinkhorn regularization as a multiple of the mean ground cost.
    #[arg(long, default_value_t = 0.05, conflicts_with = "epsilon_absolute")]
    epsilon: f64,
    /// Sinkhorn regularization in cost units.
    #[arg(long)]
    epsilon_absolute: Option<f64>,
    #[arg(long, default_value_t = 1e-6)]
    sinkhorn_tol: f64,
    #[arg(long, default_value_t = 10_000)]
    sinkhorn_max_iters: usize,
    /// Fixed MMD bandwidth; the median heuristic if absent.
    #[arg(long)]
    mmd_bandwidth: Option<f64>,
    /// Features added or removed per greedy step.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    group_size: u64,
    /// Z-score every feature before selection (default).
    #[arg(long, overrides_with = "no_standardize")]
    standardize: bool,
    /// Use raw feature values.
    #[arg(long, overrides_with = "standardize")]
    no_standardize: bool,
    /// Hold out this fraction of each class and report 1-NN accuracy.
    #[arg(long, requires = "split_seed")]
    test_frac: Option<f64>,
    #[arg(long)]
    split_seed: Option<u64>,
    /// Evaluate candidates on one thread.
    #[arg(long)]
    sequential: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

type BoxError = Box<dyn std::error::Error>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth(args) => synth(&args),
        Command::Select(args) => run_select(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        // Library messages already include their underlying cause.
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, BoxError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| format!("cannot create {}: {e}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn synth(args: &SynthArgs) -> Result<(), BoxError> {
    let file = File::open(&args.spec)
        .map_err(|e| format!("cannot open {}: {e}", args.spec.display()))?;
    let spec: SyntheticSpec = serde_json::from_reader(io::BufReader::new(file))
        .map_err(|e| format!("invalid spec {}: {e}", args.spec.display()))?;
    let ds = gen_synthetic(&spec)?;
    let mut out = output(args.out.as_deref())?;
    write_csv(&ds, &mut out)?;
    out.flush()?;
    Ok(())
}

fn read_input(path: Option<&Path>) -> Result<(String, Vec<u8>), BoxError> {
    let mut bytes = Vec::new();
    match path {
        Some(p) if p != Path::new("-") => {
            File::open(p)
                .and_then(|mut f| f.read_to_end(&mut bytes))
                .map_err(|e| format!("cannot read {}: {e}", p.display()))?;
            Ok((p.display().to_string(), bytes))
        }
        _ => {
            io::stdin().lock().read_to_end(&mut bytes)?;
            Ok(("-".into(), bytes))
        }
    }
}

fn estimator(args: &SelectArgs) -> EstimatorChoice {
    let choice = args.estimator.unwrap_or(match args.method {
        MethodArg::Twd => EstimatorArg::Exact1d,
        MethodArg::Fawd | MethodArg::Bewd => EstimatorArg::Sinkhorn,
    });
    match choice {
        EstimatorArg::Exact1d => EstimatorChoice::Exact1d,
        EstimatorArg::Sinkhorn => EstimatorChoice::Sinkhorn(SinkhornConfig {
            epsilon: match args.epsilon_absolute {
                Some(e) => Epsilon::Absolute(e),
                None => Epsilon::RelativeToMeanCost(args.epsilon),
            },
            max_iters: args.sinkhorn_max_iters,
            tol: args.sinkhorn_tol,
        }),
        EstimatorArg::Mmd => EstimatorChoice::MmdGaussian {
            bandwidth: args.mmd_bandwidth,
        },
    }
}

fn run_select(args: &SelectArgs) -> Result<(), BoxError> {
    let (source, bytes) = read_input(args.input.as_deref())?;
    let label = args
        .label_col
        .as_deref()
        .map_or(LabelColumn::Last, LabelColumn::parse);
    let raw = read_csv(bytes.as_slice(), &label, !args.no_header)?;

    let method = match args.method {
        MethodArg::Twd => Method::Twd,
        MethodArg::Fawd => Method::Fawd,
        MethodArg::Bewd => Method::Bewd,
    };
    let execution = if args.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let cfg = SelectionConfig::new(args.num_features as usize, estimator(args))
        .with_group_size(args.group_size as usize)
        .with_execution(execution);

    // With a split, scaling is fitted on the training rows only.
    let (fit_on, test) = match (args.test_frac, args.split_seed) {
        (Some(frac), Some(seed)) => {
            let (train, test) = train_test_split(&raw, frac, seed)?;
            if args.no_standardize {
                (train, Some(test))
            } else {
                let scaler = Standardizer::fit(&train);
                (scaler.transform(&train)?, Some(scaler.transform(&test)?))
            }
        }
        _ if args.no_standardize => (raw.clone(), None),
        _ => (standardize(&raw)?, None),
    };

    let start = Instant::now();
    let result = select(&fit_on, method, &cfg)?;
    let wall_time = start.elapsed();

    let evaluation = match (&test, args.test_frac, args.split_seed) {
        (Some(test), Some(test_frac), Some(split_seed)) => Some(Evaluation {
            accuracy: evaluate_subset(&fit_on, test, &result.subset())?,
            test_frac,
            split_seed,
            train_rows: fit_on.n_samples(),
            test_rows: test.n_samples(),
        }),
        _ => None,
    };

    let report = RunReport {
        source: &source,
        bytes: &bytes,
        dataset: &raw,
        result: &result,
        standardized: !args.no_standardize,
        wall_time,
        evaluation,
    };
    eprint!("{}", report.summary());
    let mut out = output(args.out.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &report.to_json())?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}
