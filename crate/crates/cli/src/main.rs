use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use ned_core::baselines::KnnMetric;
use ned_core::bounds::{bound_appendix, bound_corollary1, report_theorem1, BoundReport};
use ned_core::datagen::sample_training;
use ned_core::harness::{
    emit_csv, exact_error_oracle, run_experiment, write_csv, Execution, ExperimentConfig, Family, Regeneration,
};
use ned_core::{
    Alphabet, ClassifierKind, ClassifierSpec, Error, FeatureVector, LabelSet, Result, SourceModel, TrainingSet,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(
    name = "ned",
    version,
    about = "Nearest-empirical-distribution classification experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo error sweep and write the result rows as CSV.
    Simulate(SimulateArgs),
    /// Print the error bounds for a source model.
    Bound(BoundArgs),
    /// Classify the vectors of a test CSV against a training CSV.
    Classify(ClassifyArgs),
    /// Exact error probability of a classifier on a small source model.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON experiment configuration; flags given alongside override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// iid, overlap, nonoverlap or from-file.
    #[arg(long)]
    family: Option<Family>,
    /// Source model JSON (implies --family from-file).
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long, default_value_t = 1)]
    n_step: usize,
    /// Training vectors per label.
    #[arg(long)]
    t: Option<usize>,
    /// Minkowski order of the NED distance.
    #[arg(long)]
    r: Option<f64>,
    /// Number of labels (iid family).
    #[arg(long)]
    labels: Option<usize>,
    /// Alphabet size (iid family).
    #[arg(long)]
    alphabet_size: Option<usize>,
    #[arg(long)]
    tests_per_label: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    /// Comma-separated subset of ned,nb,knn.
    #[arg(long, value_delimiter = ',')]
    classifiers: Option<Vec<ClassifierKind>>,
    #[arg(long)]
    knn_k: Option<usize>,
    /// euclidean or hamming.
    #[arg(long)]
    knn_metric: Option<KnnMetric>,
    /// Add-one smoothing for naive Bayes.
    #[arg(long)]
    nb_smoothing: bool,
    /// once, per-n or per-rep (iid family).
    #[arg(long)]
    regeneration: Option<Regeneration>,
    #[arg(long)]
    seed: Option<u64>,
    /// Run replications on the calling thread only.
    #[arg(long)]
    sequential: bool,
    /// Output CSV; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    model: PathBuf,
    /// Feature length used in the bounds (defaults to the model's).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 1)]
    t: usize,
    #[arg(long, default_value_t = 2.0)]
    r: f64,
    /// Training CSV for the data-dependent bound; sampled from the model when absent.
    #[arg(long)]
    train: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Rows of `label,code,code,...`.
    #[arg(long)]
    train: PathBuf,
    /// Rows of `code,code,...`.
    #[arg(long)]
    test: PathBuf,
    #[arg(long, default_value = "ned")]
    classifier: ClassifierKind,
    #[arg(long, default_value_t = 2.0)]
    r: f64,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value = "euclidean")]
    knn_metric: KnnMetric,
    #[arg(long)]
    nb_smoothing: bool,
    /// Model JSON whose alphabet to use; otherwise the symbols seen in the inputs.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Seed for random tie-breaks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = 1)]
    t: usize,
    #[arg(long, default_value = "ned")]
    classifier: ClassifierKind,
    #[arg(long, default_value_t = 2.0)]
    r: f64,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value = "euclidean")]
    knn_metric: KnnMetric,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Bound(a) => bound(a),
        Command::Classify(a) => classify(a),
        Command::Oracle(a) => oracle(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ned: {e}");
            ExitCode::from(if e.is_io() { 1 } else { 2 })
        }
    }
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let mut cfg = match &a.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(f) = a.family {
        cfg.family = f;
    }
    if let Some(m) = a.model {
        cfg.family = Family::FromFile;
        cfg.model_path = Some(m);
    }
    match (a.n_min, a.n_max) {
        (Some(lo), Some(hi)) => cfg.n_grid = ExperimentConfig::grid(lo, hi, a.n_step)?,
        (Some(lo), None) => cfg.n_grid = vec![lo],
        (None, Some(hi)) => cfg.n_grid = ExperimentConfig::grid(1, hi, a.n_step)?,
        (None, None) if cfg.family == Family::FromFile && a.config.is_none() => cfg.n_grid.clear(),
        (None, None) => {}
    }
    macro_rules! set {
        ($($field:ident = $value:expr),* $(,)?) => { $(if let Some(v) = $value { cfg.$field = v; })* };
    }
    set!(
        t = a.t,
        r = a.r,
        num_labels = a.labels,
        alphabet_size = a.alphabet_size,
        tests_per_label = a.tests_per_label,
        reps = a.reps,
        classifiers = a.classifiers,
        knn_k = a.knn_k,
        knn_metric = a.knn_metric,
        iid_regeneration = a.regeneration,
        seed = a.seed,
    );
    if a.nb_smoothing {
        cfg.nb_smoothing = true;
    }
    if a.sequential {
        cfg.execution = Execution::Sequential;
    }
    if a.out.is_some() {
        cfg.out_path = a.out;
    }

    let rows = run_experiment(&cfg)?;
    match &cfg.out_path {
        Some(path) => emit_csv(&rows, path),
        None => write_csv(&rows, std::io::stdout().lock()),
    }
}

fn print_report(out: &mut impl Write, name: &str, rep: &BoundReport) -> Result<()> {
    writeln!(out, "{name:<10} epsilon={:.6e} bound={:.6e}", rep.epsilon, rep.bound)?;
    Ok(())
}

fn bound(a: BoundArgs) -> Result<()> {
    let model = SourceModel::load(&a.model)?;
    let n = a.n.unwrap_or(model.n());
    let ts = match &a.train {
        Some(path) => {
            let (labels, rows) = read_training(path)?;
            training_set(&model.alphabet().clone(), &labels, rows, Some(&model))?
        }
        None => sample_training(&model, a.t, &mut ChaCha8Rng::seed_from_u64(a.seed))?,
    };
    let mut out = std::io::stdout().lock();
    print_report(&mut out, "theorem1", &report_theorem1(&model, &ts, a.r, n)?)?;
    print_report(&mut out, "corollary1", &bound_corollary1(&model, a.r, n)?)?;
    print_report(&mut out, "appendix", &bound_appendix(&model, a.r, n, ts.t())?)?;
    Ok(())
}

fn read_rows(path: &Path) -> Result<Vec<Vec<String>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        rows.push(record.iter().map(str::to_string).collect());
    }
    Ok(rows)
}

fn parse_codes(fields: &[String], path: &Path, line: usize) -> Result<Vec<i64>> {
    fields
        .iter()
        .map(|f| {
            f.parse()
                .map_err(|_| Error::InvalidConfig(format!("{}:{line}: {f:?} is not an integer symbol", path.display())))
        })
        .collect()
}

type TrainingRows = Vec<(usize, Vec<i64>)>;

/// Label names in order of first appearance and `(label index, codes)` rows.
fn read_training(path: &Path) -> Result<(Vec<String>, TrainingRows)> {
    let mut names: Vec<String> = Vec::new();
    let mut rows = Vec::new();
    for (i, fields) in read_rows(path)?.into_iter().enumerate() {
        if fields.len() < 2 {
            return Err(Error::InvalidConfig(format!(
                "{}:{}: expected a label and symbols",
                path.display(),
                i + 1
            )));
        }
        let label = match names.iter().position(|n| *n == fields[0]) {
            Some(x) => x,
            None => {
                names.push(fields[0].clone());
                names.len() - 1
            }
        };
        rows.push((label, parse_codes(&fields[1..], path, i + 1)?));
    }
    Ok((names, rows))
}

fn training_set(
    alphabet: &Arc<Alphabet>,
    names: &[String],
    rows: TrainingRows,
    model: Option<&SourceModel>,
) -> Result<TrainingSet> {
    let labels = match model {
        Some(m) => {
            let ordered = m.labels().clone();
            for name in names {
                ordered.index_of(name)?;
            }
            ordered
        }
        None => Arc::new(LabelSet::new(names.to_vec())?),
    };
    let mut groups = vec![Vec::new(); labels.len()];
    for (x, codes) in rows {
        let x = labels.index_of(&names[x])?;
        groups[x].push(alphabet.encode(&codes)?);
    }
    TrainingSet::new(alphabet.clone(), labels, groups)
}

fn classify(a: ClassifyArgs) -> Result<()> {
    let (names, train) = read_training(&a.train)?;
    let test = read_rows(&a.test)?
        .iter()
        .enumerate()
        .map(|(i, f)| parse_codes(f, &a.test, i + 1))
        .collect::<Result<Vec<_>>>()?;
    let model = a.model.as_deref().map(SourceModel::load).transpose()?;
    let alphabet = match &model {
        Some(m) => m.alphabet().clone(),
        None => {
            let mut symbols: Vec<i64> = train
                .iter()
                .flat_map(|r| r.1.iter())
                .chain(test.iter().flatten())
                .copied()
                .collect();
            symbols.sort_unstable();
            symbols.dedup();
            Arc::new(Alphabet::new(symbols)?)
        }
    };
    let ts = training_set(&alphabet, &names, train, model.as_ref())?;
    let spec = ClassifierSpec {
        kind: a.classifier,
        r: a.r,
        knn_k: a.k,
        knn_metric: a.knn_metric,
        nb_smoothing: a.nb_smoothing,
    };
    let clf = spec.fit(&ts)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let vectors: Vec<FeatureVector> = test.iter().map(|c| alphabet.encode(c)).collect::<Result<_>>()?;
    let mut out = std::io::stdout().lock();
    for v in &vectors {
        writeln!(out, "{}", ts.labels().name(clf.classify(v, &mut rng)?))?;
    }
    Ok(())
}

fn oracle(a: OracleArgs) -> Result<()> {
    let model = SourceModel::load(&a.model)?;
    let spec = ClassifierSpec {
        kind: a.classifier,
        r: a.r,
        knn_k: a.k,
        knn_metric: a.knn_metric,
        nb_smoothing: false,
    };
    println!("{:.12}", exact_error_oracle(&model, a.t, &spec)?);
    Ok(())
}
