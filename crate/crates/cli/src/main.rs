use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand, ValueEnum};

use splitgain::{ColumnSelector, TableFormat, TaxonomyRegime};
use splitgain_cli::{
    analyze_file, exit_code, report_csv, synth_files, AnalysisOutcome, AnalyzeOptions, SortOrder,
    SynthOptions, TvChoice,
};

#[derive(Parser)]
#[command(
    name = "splitgain",
    version,
    about = "Measures how much per-group classifiers beat one shared model, with finite-sample bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze datasets and emit one JSON report row each
    Analyze(AnalyzeArgs),
    /// Generate a synthetic two-group dataset plus a JSON sidecar
    Synth(SynthArgs),
    /// Fold a directory of analysis rows into one sorted CSV
    Report(ReportArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Input dataset file; repeat the flag for a batch
    #[arg(long, required = true)]
    input: Vec<PathBuf>,
    /// Table format; inferred from the file extension when omitted
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Sensitive column by name, or by zero-based index when numeric
    #[arg(long)]
    sensitive_col: Option<String>,
    /// Label column by name, or by zero-based index when numeric
    #[arg(long)]
    label_col: Option<String>,
    /// Cap on samples kept per group
    #[arg(long, default_value_t = 10_000)]
    max_per_group: usize,
    /// Bound confidence level
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Capacity override for the complexity term
    #[arg(long)]
    vc: Option<usize>,
    /// Drop the loosest bound terms
    #[arg(long)]
    practical_mode: bool,
    /// Fraction of each group held out for the gap estimate
    #[arg(long, default_value_t = 0.3)]
    holdout: f64,
    /// Seed for every randomized step
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Concurrent dataset analyses in a batch
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Total-variation estimator
    #[arg(long, value_enum, default_value_t = TvArg::Auto)]
    tv: TvArg,
    /// Rescale features using training-portion statistics
    #[arg(long)]
    standardize: bool,
    /// Output file for one input, output directory for a batch; one input
    /// with no --out prints to stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Generator regime
    #[arg(long, value_enum)]
    regime: RegimeArg,
    /// Group separation
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    /// Samples per group
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Dataset CSV path; the sidecar lands next to it as .json
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// Directory holding analysis JSON rows
    #[arg(long)]
    input: PathBuf,
    /// Row ordering
    #[arg(long, value_enum, default_value_t = SortArg::MinGroup)]
    sort: SortArg,
    /// Output CSV path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Arff,
}

#[derive(Clone, Copy, ValueEnum)]
enum TvArg {
    Auto,
    Exact,
    Variational,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegimeArg {
    /// One shared rule, shifted marginals
    SimilarClassifiers,
    /// Opposite rules on one shared marginal
    DifferentClassifiers,
    /// Opposite rules and shifted marginals
    BothDifferent,
}

#[derive(Clone, Copy, ValueEnum)]
enum SortArg {
    /// Ascending by the smaller training group
    MinGroup,
    /// By dataset name
    Name,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let code = match cli.command {
        Command::Analyze(args) => run_analyze(args),
        Command::Synth(args) => run_synth(args),
        Command::Report(args) => run_report(args),
    };
    ExitCode::from(code)
}

fn run_analyze(args: AnalyzeArgs) -> u8 {
    let opts = analyze_options(&args);
    let batch = args.input.len() > 1;
    if batch {
        let Some(dir) = &args.out else {
            eprintln!("error: --out must name a directory when analyzing several inputs");
            return 2;
        };
        if let Err(e) = std::fs::create_dir_all(dir) {
            eprintln!("error: cannot create {}: {e}", dir.display());
            return 2;
        }
    }

    let jobs = args.jobs.clamp(1, args.input.len());
    let results = run_parallel(&args.input, jobs, &opts);

    let mut worst = 0u8;
    for (path, result) in args.input.iter().zip(results) {
        let outcome = match result {
            Ok(outcome) => outcome,
            Err(err) => {
                eprintln!("error: {}: {err}", path.display());
                worst = worst.max(exit_code(&err));
                continue;
            }
        };
        for warning in &outcome.warnings {
            eprintln!("warning: {}: {warning}", path.display());
        }
        let mut json = serde_json::to_string_pretty(&outcome.row)
            .expect("report row serializes");
        json.push('\n');
        let target = match &args.out {
            None => {
                print!("{json}");
                continue;
            }
            Some(out) if batch || out.is_dir() => {
                out.join(format!("{}.json", outcome.row.name))
            }
            Some(out) => out.clone(),
        };
        if let Err(e) = std::fs::write(&target, json) {
            eprintln!("error: cannot write {}: {e}", target.display());
            worst = worst.max(2);
        }
    }
    worst
}

/// Runs the per-file analyses on a small worker pool, keeping results in
/// input order.
fn run_parallel(
    inputs: &[PathBuf],
    jobs: usize,
    opts: &AnalyzeOptions,
) -> Vec<splitgain_cli::Result<AnalysisOutcome>> {
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<splitgain_cli::Result<AnalysisOutcome>>>> =
        inputs.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= inputs.len() {
                    break;
                }
                let result = analyze_file(&inputs[i], opts);
                *slots[i].lock().expect("no panics hold this lock") = Some(result);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| {
            slot.into_inner()
                .expect("no panics hold this lock")
                .expect("every input index was visited")
        })
        .collect()
}

fn analyze_options(args: &AnalyzeArgs) -> AnalyzeOptions {
    let mut opts = AnalyzeOptions {
        format: args.format.map(|f| match f {
            FormatArg::Csv => TableFormat::Csv,
            FormatArg::Arff => TableFormat::Arff,
        }),
        holdout_fraction: args.holdout,
        delta: args.delta,
        vc_override: args.vc,
        practical_mode: args.practical_mode,
        tv: match args.tv {
            TvArg::Auto => TvChoice::Auto,
            TvArg::Exact => TvChoice::Exact,
            TvArg::Variational => TvChoice::Variational,
        },
        standardize: args.standardize,
        seed: args.seed,
        ..AnalyzeOptions::default()
    };
    opts.preprocess.sensitive_column = args.sensitive_col.as_deref().map(selector);
    opts.preprocess.label_column = args.label_col.as_deref().map(selector);
    opts.preprocess.max_per_group = args.max_per_group;
    opts.preprocess.seed = args.seed;
    opts.train.seed = args.seed;
    opts.witness.seed = args.seed;
    opts
}

/// A numeric flag value selects a column by position, anything else by
/// name.
fn selector(s: &str) -> ColumnSelector {
    s.parse::<usize>()
        .map(ColumnSelector::Index)
        .unwrap_or_else(|_| ColumnSelector::Name(s.to_string()))
}

fn run_synth(args: SynthArgs) -> u8 {
    let opts = SynthOptions {
        regime: match args.regime {
            RegimeArg::SimilarClassifiers => TaxonomyRegime::SimilarClassifiers,
            RegimeArg::DifferentClassifiers => {
                TaxonomyRegime::DifferentClassifiersSimilarMarginals
            }
            RegimeArg::BothDifferent => TaxonomyRegime::BothDifferent,
        },
        mu: args.mu,
        n_per_group: args.n,
        seed: args.seed,
    };
    match synth_files(&opts, &args.out) {
        Ok(outcome) => {
            for warning in &outcome.warnings {
                eprintln!("warning: {warning}");
            }
            0
        }
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

fn run_report(args: ReportArgs) -> u8 {
    let sort = match args.sort {
        SortArg::MinGroup => SortOrder::MinGroupSize,
        SortArg::Name => SortOrder::Name,
    };
    match report_csv(&args.input, sort) {
        Ok(outcome) => {
            for warning in &outcome.warnings {
                eprintln!("warning: {warning}");
            }
            match &args.out {
                None => print!("{}", outcome.csv),
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &outcome.csv) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return 2;
                    }
                }
            }
            0
        }
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}
