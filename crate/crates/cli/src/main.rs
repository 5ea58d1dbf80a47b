//! `cilearn`: online, distributed and SVDD experiments over LIBSVM files.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cilearn::distributed::{
    cilsd_train, dscil_train, partition_rows, write_history_csv, CilsdConfig, DscilConfig, Subsolver,
    TrainingTimeReport,
};
use cilearn::libsvm::{read_file, stream_minibatches};
use cilearn::losses::{ClassWeights, CostPair};
use cilearn::metrics::ConfusionCounts;
use cilearn::normalize::fit_normalizer;
use cilearn::online::{build_learner, predict, run_stream, Algorithm, LearnerParams};
use cilearn::optim::{lambda_max, SolveReport};
use cilearn::sparse::dimension_of;
use cilearn::svdd::{detect_per_feature, fit_per_feature, svdd_fit, DEFAULT_DELTA, DEFAULT_SIGMA};
use cilearn::{Label, LabeledInstance, SparseVector};

const SUMMARY_HEADER: &str = "algo,dataset,accuracy,sensitivity,specificity,gmean,sum,mistake_rate";

#[derive(Parser)]
#[command(
    name = "cilearn",
    version,
    about = "Cost-sensitive class-imbalance learning experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single pass of an online learner over a LIBSVM stream.
    Online(OnlineArgs),
    /// Train an L1-regularized model with simulated workers and score a test set.
    Distributed(DistributedArgs),
    /// Fit an SVDD detector on the leading rows and score the rest.
    Svdd(SvddArgs),
}

#[derive(Args)]
struct OnlineArgs {
    /// pa, pa1, pa2, pagmean, pagmean1, pagmean2, aspgd or aspgdnoacc.
    #[arg(long)]
    algo: String,
    #[arg(long)]
    data: PathBuf,
    /// L1 strength (ASPGD).
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    /// Fixed step size (ASPGD); defaults to 1/(mu+1).
    #[arg(long)]
    eta: Option<f64>,
    /// Fixed strong-convexity parameter (ASPGD); defaults to the online penalty.
    #[arg(long)]
    mu: Option<f64>,
    /// Aggressiveness (PA-1, PA-2 and their cost-sensitive forms).
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 100)]
    trace_every: usize,
    #[arg(long, default_value_t = 1024)]
    batch_size: usize,
    /// Metric trace CSV; written to stdout when absent.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Summary CSV (header plus one row).
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Recorded for uniform experiment configs; the online learners draw no
    /// random numbers.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum DistributedAlgo {
    DscilLbfgs,
    DscilRcd,
    Cilsd,
}

impl DistributedAlgo {
    fn name(self) -> &'static str {
        match self {
            Self::DscilLbfgs => "dscil-lbfgs",
            Self::DscilRcd => "dscil-rcd",
            Self::Cilsd => "cilsd",
        }
    }
}

#[derive(Args)]
struct DistributedArgs {
    #[arg(long, value_enum)]
    algo: DistributedAlgo,
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    test: PathBuf,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// L1 strength; defaults to 0.1 * lambda_max of the normalized train set.
    #[arg(long)]
    lambda: Option<f64>,
    /// Comma-separated lambdas to sweep instead of a single run.
    #[arg(long, value_delimiter = ',', conflicts_with = "lambda")]
    grid: Option<Vec<f64>>,
    /// Positive and negative class costs, e.g. `0.9,0.1`; must sum to 1.
    #[arg(long, default_value = "0.9,0.1")]
    costs: String,
    #[arg(long, default_value_t = 1.0)]
    rho_admm: f64,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Shuffle train rows before partitioning them across workers.
    #[arg(long)]
    shuffle: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-iteration history CSV (last run of a sweep).
    #[arg(long)]
    history: Option<PathBuf>,
    /// Per-worker timing CSV (last run of a sweep).
    #[arg(long)]
    timing: Option<PathBuf>,
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct SvddArgs {
    #[arg(long)]
    data: PathBuf,
    /// Number of leading rows used for fitting.
    #[arg(long)]
    train_size: usize,
    #[arg(long, default_value_t = DEFAULT_SIGMA)]
    sigma: f64,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    delta: f64,
    /// Detection CSV; written to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// One detector per feature instead of one over all features.
    #[arg(long)]
    per_feature: bool,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Online(a) => cmd_online(a),
        Command::Distributed(a) => cmd_distributed(a),
        Command::Svdd(a) => cmd_svdd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

type CliResult<T = ()> = Result<T, Box<dyn std::error::Error>>;

fn output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| format!("cannot create {}: {e}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn open(path: &Path) -> CliResult<File> {
    File::open(path).map_err(|e| format!("cannot open {}: {e}", path.display()).into())
}

fn load(path: &Path) -> CliResult<Vec<LabeledInstance>> {
    read_file(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn dataset_name(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn summary_row(algo: &str, dataset: &str, c: &ConfusionCounts) -> CliResult<String> {
    Ok(format!(
        "{algo},{dataset},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
        c.accuracy()?,
        c.sensitivity(),
        c.specificity(),
        c.gmean(),
        c.sum_metric(),
        c.mistake_rate()?
    ))
}

/// Echoes summary rows (to stderr when stdout carries other output) and
/// optionally writes them as a CSV file.
fn write_summary(path: Option<&Path>, rows: &[String], stdout_busy: bool) -> CliResult {
    for r in rows {
        if stdout_busy {
            eprintln!("{r}");
        } else {
            println!("{r}");
        }
    }
    if let Some(p) = path {
        let mut out = output(Some(p))?;
        writeln!(out, "{SUMMARY_HEADER}")?;
        for r in rows {
            writeln!(out, "{r}")?;
        }
        out.flush()?;
    }
    Ok(())
}

fn cmd_online(a: OnlineArgs) -> CliResult {
    let algo: Algorithm = a.algo.parse()?;
    let params = LearnerParams {
        c: a.c,
        lambda: a.lambda,
        eta: a.eta,
        mu: a.mu,
    };
    let mut learner = build_learner(algo, &params)?;
    let batches = stream_minibatches(BufReader::new(open(&a.data)?), a.batch_size)?;
    let rows = batches.flat_map(|b| match b {
        Ok(batch) => batch.into_iter().map(Ok).collect::<Vec<_>>(),
        Err(e) => vec![Err(e)],
    });
    let report = run_stream(&mut learner, rows, a.trace_every).map_err(|e| format!("{}: {e}", a.data.display()))?;
    if report.counts.total() == 0 {
        return Err(format!("{}: no instances", a.data.display()).into());
    }

    let mut trace = output(a.trace.as_deref())?;
    report.trace.write_csv(&mut trace)?;
    trace.flush()?;
    drop(trace);

    let row = summary_row(algo.name(), &dataset_name(&a.data), &report.counts)?;
    write_summary(a.summary.as_deref(), &[row], a.trace.is_none())
}

fn parse_costs(s: &str) -> CliResult<CostPair> {
    let parts: Vec<&str> = s.split(',').collect();
    let [pos, neg] = parts.as_slice() else {
        return Err(format!("--costs expects two comma-separated values, got {s:?}").into());
    };
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("--costs value {v:?}: {e}"));
    Ok(CostPair::new(parse(pos)?, parse(neg)?)?)
}

struct Trained {
    w: Vec<f64>,
    history: History,
    timing: TrainingTimeReport,
}

enum History {
    Consensus(Vec<cilearn::distributed::ConsensusState>),
    Fista(SolveReport),
}

fn write_history(path: &Path, h: &History) -> CliResult {
    let mut out = output(Some(path))?;
    match h {
        History::Consensus(states) => write_history_csv(&mut out, states)?,
        History::Fista(report) => {
            writeln!(out, "iteration,objective,step")?;
            for (i, (f, s)) in report
                .objective_history
                .iter()
                .zip(&report.residual_history)
                .enumerate()
                .skip(1)
            {
                writeln!(out, "{i},{f:.12e},{s:.12e}")?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn train_once(
    a: &DistributedArgs,
    train: &[LabeledInstance],
    dim: usize,
    lambda: f64,
    costs: ClassWeights,
) -> CliResult<Trained> {
    let shuffle = a.shuffle.then_some(a.seed);
    let mut parts = partition_rows(train, a.workers, shuffle)?;
    Ok(match a.algo {
        DistributedAlgo::Cilsd => {
            let mut cfg = CilsdConfig {
                lambda,
                costs,
                ..Default::default()
            };
            if let Some(m) = a.max_iter {
                cfg.max_iter = m;
            }
            let r = cilsd_train(&parts, dim, &cfg)?;
            if !r.report.converged {
                eprintln!(
                    "warning: cilsd stopped after {} iterations without converging",
                    r.report.iterations
                );
            }
            Trained {
                w: r.w,
                history: History::Fista(r.report),
                timing: r.timing,
            }
        }
        DistributedAlgo::DscilLbfgs | DistributedAlgo::DscilRcd => {
            let subsolver = match a.algo {
                DistributedAlgo::DscilLbfgs => Subsolver::Lbfgs,
                _ => Subsolver::Rcd,
            };
            let mut cfg = DscilConfig {
                lambda,
                costs,
                rho_admm: a.rho_admm,
                subsolver,
                seed: a.seed,
                ..Default::default()
            };
            if let Some(m) = a.max_iter {
                cfg.max_iter = m;
            }
            let r = dscil_train(&mut parts, dim, &cfg)?;
            if !r.converged {
                eprintln!(
                    "warning: dscil stopped after {} iterations without converging",
                    r.iterations()
                );
            }
            Trained {
                w: r.w,
                history: History::Consensus(r.history),
                timing: r.timing,
            }
        }
    })
}

fn cmd_distributed(a: DistributedArgs) -> CliResult {
    let costs = parse_costs(&a.costs)?;
    let raw_train = load(&a.train)?;
    let raw_test = load(&a.test)?;
    let stats = fit_normalizer(&raw_train)?;
    let train = stats.apply_all(&raw_train);
    let test = stats.apply_all(&raw_test);
    if test.is_empty() {
        return Err(format!("{}: no test instances", a.test.display()).into());
    }
    let dim = dimension_of(&train).max(dimension_of(&test));
    let weights: ClassWeights = costs.into();

    let lambdas = match (&a.grid, a.lambda) {
        (Some(g), _) => g.clone(),
        (None, Some(l)) => vec![l],
        (None, None) => {
            let l = 0.1 * lambda_max(&train);
            eprintln!("lambda = {l:.6e} (0.1 * lambda_max)");
            vec![l]
        }
    };

    let dataset = dataset_name(&a.train);
    let mut rows = Vec::new();
    let mut last = None;
    for &lambda in &lambdas {
        let trained = train_once(&a, &train, dim, lambda, weights)?;
        let mut counts = ConfusionCounts::new();
        for r in &test {
            counts.update(r.label, predict(&trained.w, &r.features));
        }
        let algo = if a.grid.is_some() {
            format!("{}[lambda={lambda}]", a.algo.name())
        } else {
            a.algo.name().to_string()
        };
        rows.push(summary_row(&algo, &dataset, &counts)?);
        last = Some(trained);
    }
    let last = last.ok_or("empty --grid")?;
    if let Some(p) = &a.history {
        write_history(p, &last.history)?;
    }
    if let Some(p) = &a.timing {
        let mut out = output(Some(p))?;
        last.timing.write_csv(&mut out)?;
        out.flush()?;
    }
    write_summary(a.summary.as_deref(), &rows, false)
}

fn cmd_svdd(a: SvddArgs) -> CliResult {
    let rows = load(&a.data)?;
    if a.train_size == 0 || a.train_size > rows.len() {
        return Err(format!(
            "--train-size {} must lie in 1..={} (rows in {})",
            a.train_size,
            rows.len(),
            a.data.display()
        )
        .into());
    }
    let (train, test) = rows.split_at(a.train_size);
    let features = |r: &[LabeledInstance]| -> Vec<SparseVector> { r.iter().map(|x| x.features.clone()).collect() };
    let (train_x, test_x) = (features(train), features(test));
    let mut out = output(a.out.as_deref())?;

    let mut counts = ConfusionCounts::new();
    if a.per_feature {
        let dim = dimension_of(&rows);
        let models = fit_per_feature(&train_x, dim, a.sigma, a.delta)?;
        let results = detect_per_feature(&models, &test_x);
        writeln!(out, "feature,row_index,distance_sq,flagged")?;
        for (j, r) in results.iter().enumerate() {
            for (i, d) in r.distances_sq.iter().enumerate() {
                writeln!(out, "{j},{i},{d:.12e},{}", u8::from(r.is_flagged(i)))?;
            }
        }
        for (i, row) in test.iter().enumerate() {
            let flagged = results.iter().any(|r| r.is_flagged(i));
            counts.update(row.label, if flagged { Label::Positive } else { Label::Negative });
        }
    } else {
        let model = svdd_fit(train_x, a.sigma, a.delta)?;
        eprintln!("threshold = {:.12e}", model.threshold());
        let result = model.detect_parallel(&test_x, a.threads);
        result.write_csv(&mut out)?;
        for (i, row) in test.iter().enumerate() {
            counts.update(
                row.label,
                if result.is_flagged(i) {
                    Label::Positive
                } else {
                    Label::Negative
                },
            );
        }
    }
    out.flush()?;
    if counts.total() > 0 {
        // Flagged rows count as positive (anomalous) predictions.
        eprintln!("{}", summary_row("svdd", &dataset_name(&a.data), &counts)?);
    }
    Ok(())
}
