//! `metricstat`: Fréchet means, medians and variability from the command line.
//!
//! Exit status is 0 on success, 2 on bad input (unreadable or malformed
//! files, invalid flag combinations), 1 on internal failure.

mod output;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use metricstat::circular::{self, Angle, CircularMinimum, Direction};
use metricstat::datasets;
use metricstat::editdist::{self, Levenshtein, WordForm};
use metricstat::frechet::{distance_matrix, FrechetOptions};
use metricstat::groups::{self, GroupKind, GroupSpec};
use metricstat::inference::{self, Minimizer, PermMode, PermTestConfig};
use output::{Field, Record};

#[derive(Debug, Parser)]
#[command(name = "metricstat", version, about = "Generalized means, medians and variability over a metric")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fréchet mean/median of angles on the circle
    Circular(CircularArgs),
    /// Fréchet mean/median of spellings under edit distance
    Strings(StringsArgs),
    /// Variability of a finite group under the word metric
    Group(GroupArgs),
    /// Permutation test comparing the variability of two samples
    Permtest(PermtestArgs),
    /// Pairwise distance matrix of a dataset, as TSV
    Distances(DistancesArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Debug, Args)]
struct Common {
    /// Exponent p of the functional Σ d(x, c)^p (1 = median, 2 = mean)
    #[arg(long = "p", value_name = "P", default_value = "2", value_parser = parse_exponent)]
    p: f64,
    /// Divide the functional by the sample size
    #[arg(long)]
    normalized: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Args)]
struct CircularArgs {
    /// `builtin:pennec6` or a file with one radian value per line
    #[arg(long)]
    data: String,
    #[command(flatten)]
    common: Common,
    /// Grid points over the full circle
    #[arg(long, default_value_t = circular::DEFAULT_RESOLUTION)]
    resolution: usize,
    /// Write the grid profile as `angle<TAB>value` lines
    #[arg(long, value_name = "FILE")]
    emit_profile: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StringsArgs {
    /// `builtin:lalme_old`, `builtin:chaucer_old`, or a word-list file
    #[arg(long)]
    data: String,
    #[command(flatten)]
    common: Common,
    /// Minimize over these forms instead of the distinct observed forms
    #[arg(long, value_name = "SOURCE")]
    candidates: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Cyclic,
    Product,
    Dihedral,
    Table,
}

#[derive(Debug, Args)]
struct GroupArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Order n for cyclic groups, or the n-gon size for dihedral groups
    #[arg(long, conflicts_with_all = ["orders", "table"])]
    order: Option<usize>,
    /// Comma-separated factor orders for a product of cyclic groups
    #[arg(long, value_delimiter = ',', conflicts_with = "table")]
    orders: Option<Vec<usize>>,
    /// Cayley table as CSV, first row and column holding element labels
    #[arg(long, value_name = "FILE")]
    table: Option<PathBuf>,
    /// Comma-separated generator labels; inverses are added when missing
    #[arg(long, value_delimiter = ',', conflicts_with = "complete")]
    generators: Option<Vec<String>>,
    /// Use every non-identity element as a generator
    #[arg(long)]
    complete: bool,
    #[command(flatten)]
    common: Common,
    /// Write the Cayley graph edge list as `label<TAB>label` lines
    #[arg(long, value_name = "FILE")]
    emit_edges: Option<PathBuf>,
    /// Write the word-metric distance matrix as TSV
    #[arg(long, value_name = "FILE")]
    emit_matrix: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MetricKind {
    Edit,
    Circular,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Auto,
    Exact,
    Mc,
}

#[derive(Debug, Args)]
struct PermtestArgs {
    #[arg(long)]
    x: String,
    #[arg(long)]
    y: String,
    #[arg(long, value_enum, default_value = "edit")]
    metric: MetricKind,
    #[arg(long, default_value_t = 10_000)]
    resamples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "auto")]
    mode: Mode,
    /// Experimental: share the pooled sample's minimizer between both sides
    #[arg(long)]
    pooled_minimizer: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Args)]
struct DistancesArgs {
    #[arg(long)]
    data: String,
    #[arg(long, value_enum, default_value = "edit")]
    metric: MetricKind,
}

fn parse_exponent(s: &str) -> Result<f64, String> {
    let p: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if p.is_finite() && p >= 1.0 {
        Ok(p)
    } else {
        Err(format!("exponent must be a finite number >= 1, got {s}"))
    }
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Internal(String),
}

impl From<metricstat::Error> for CliError {
    fn from(e: metricstat::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_words(source: &str) -> CliResult<Vec<WordForm>> {
    let words = match source.strip_prefix("builtin:") {
        Some(name) => datasets::word_forms(name)?,
        None => editdist::parse_word_list(&read_file(Path::new(source))?)
            .map_err(|e| CliError::Input(format!("{source}: {e}")))?,
    };
    if words.is_empty() {
        return Err(CliError::Input(format!("{source}: no word forms")));
    }
    Ok(words)
}

fn load_angles(source: &str) -> CliResult<Vec<Angle>> {
    let angles = match source.strip_prefix("builtin:") {
        Some(name) => datasets::angles(name)?,
        None => circular::parse_angles(&read_file(Path::new(source))?)
            .map_err(|e| CliError::Input(format!("{source}: {e}")))?,
    };
    if angles.is_empty() {
        return Err(CliError::Input(format!("{source}: no angles")));
    }
    Ok(angles)
}

fn render(record: &Record, format: Format) -> String {
    match format {
        Format::Json => record.to_json(),
        Format::Tsv => record.to_tsv(),
    }
}

fn strs<S: ToString>(xs: impl IntoIterator<Item = S>) -> Field {
    Field::List(xs.into_iter().map(|s| Field::Str(s.to_string())).collect())
}

fn nums(xs: impl IntoIterator<Item = f64>) -> Field {
    Field::List(xs.into_iter().map(Field::Num).collect())
}

fn opts(common: &Common) -> FrechetOptions {
    FrechetOptions::new(common.p).normalized(common.normalized)
}

fn run_circular(args: &CircularArgs) -> CliResult<String> {
    let sample = load_angles(&args.data)?;
    let r = circular::circular_frechet_with(&sample, opts(&args.common), args.resolution)?;
    if let Some(path) = &args.emit_profile {
        write_file(path, &r.profile.to_tsv())?;
    }
    let resultant = circular::resultant(&sample)?;
    let direction = match circular::resultant_mean(&sample)? {
        Direction::Angle(a) => Field::Num(a.radians()),
        Direction::NoDirection => Field::Null,
    };
    let raw: Vec<f64> = sample.iter().map(|a| a.radians()).collect();
    let kinds = r.minima.iter().map(|m| match m {
        CircularMinimum::Point { .. } => "point",
        CircularMinimum::Arc { .. } => "arc",
    });
    let mut rec = Record::new();
    rec.push("n", Field::Int(sample.len() as u64))
        .push("kind", strs(kinds))
        .push("minimizers", nums(r.result.minimizers.iter().map(|a| a.radians())))
        .push("value", Field::Num(r.result.value))
        .push("exponent", Field::Num(r.result.exponent))
        .push("normalized", Field::Bool(r.result.normalized))
        .push("resolution", Field::Int(args.resolution as u64))
        .push("resultant_x", Field::Num(resultant.x))
        .push("resultant_y", Field::Num(resultant.y))
        .push("direction", direction)
        .push("naive_mean", Field::Num(circular::naive_mean(&raw)?));
    Ok(render(&rec, args.common.format))
}

fn run_strings(args: &StringsArgs) -> CliResult<String> {
    let forms = load_words(&args.data)?;
    let candidates = args.candidates.as_deref().map(load_words).transpose()?;
    let r = editdist::spelling_variability_with(&forms, candidates.as_deref(), opts(&args.common))?;
    let n_candidates = candidates.map_or_else(|| editdist::distinct_forms(&forms).len(), |c| c.len());
    let mut rec = Record::new();
    rec.push("n", Field::Int(forms.len() as u64))
        .push("candidates", Field::Int(n_candidates as u64))
        .push("minimizers", strs(&r.minimizers))
        .push("value", Field::Num(r.value))
        .push("exponent", Field::Num(r.exponent))
        .push("normalized", Field::Bool(r.normalized));
    Ok(render(&rec, args.common.format))
}

fn build_group(args: &GroupArgs) -> CliResult<GroupSpec> {
    let need = |what: &str| CliError::Input(format!("--kind {what} requires --{}", match what {
        "product" => "orders",
        "table" => "table",
        _ => "order",
    }));
    let mismatch = |flag: &str, kind: &str| CliError::Input(format!("--{flag} cannot be used with --kind {kind}"));
    let group = match args.kind {
        Kind::Cyclic | Kind::Dihedral => {
            let kind = if matches!(args.kind, Kind::Cyclic) { "cyclic" } else { "dihedral" };
            if args.orders.is_some() {
                return Err(mismatch("orders", kind));
            }
            if args.table.is_some() {
                return Err(mismatch("table", kind));
            }
            let n = args.order.ok_or_else(|| need(kind))?;
            let spec = if kind == "cyclic" { GroupKind::Cyclic(n) } else { GroupKind::Dihedral(n) };
            groups::make_group(&spec)?
        }
        Kind::Product => {
            if args.order.is_some() {
                return Err(mismatch("order", "product"));
            }
            let orders = args.orders.clone().ok_or_else(|| need("product"))?;
            groups::make_group(&GroupKind::Product(orders))?
        }
        Kind::Table => {
            if args.order.is_some() || args.orders.is_some() {
                return Err(mismatch("order/--orders", "table"));
            }
            let path = args.table.as_ref().ok_or_else(|| need("table"))?;
            groups::parse_cayley_csv(&read_file(path)?)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
        }
    };
    let group = match (&args.generators, args.complete) {
        (Some(gens), _) => group.with_generators(gens)?,
        (None, true) => group.with_complete_generators(),
        (None, false) => group,
    };
    Ok(group)
}

fn run_group(args: &GroupArgs) -> CliResult<String> {
    let g = build_group(args)?;
    for notice in g.notices() {
        eprintln!("notice: {notice}");
    }
    if let groups::Validation::Sampled { triples } = g.validation() {
        eprintln!("notice: associativity validation: sampled ({triples} triples)");
    }
    if let Some(path) = &args.emit_edges {
        write_file(path, &g.cayley_graph().to_edge_tsv(g.labels()))?;
    }
    if let Some(path) = &args.emit_matrix {
        write_file(path, &g.distance_matrix().to_tsv())?;
    }
    let r = groups::group_variability_with(&g, opts(&args.common))?;
    let mut rec = Record::new();
    rec.push("order", Field::Int(g.order() as u64))
        .push("generators", strs(g.generator_labels()))
        .push("minimizers", strs(&r.minimizers))
        .push("value", Field::Num(r.value))
        .push("exponent", Field::Num(r.exponent))
        .push("normalized", Field::Bool(r.normalized));
    Ok(render(&rec, args.common.format))
}

fn run_permtest(args: &PermtestArgs) -> CliResult<String> {
    let mode = match args.mode {
        Mode::Auto => PermMode::Auto,
        Mode::Exact => PermMode::Exact,
        Mode::Mc => PermMode::MonteCarlo,
    };
    let minimizer = if args.pooled_minimizer { Minimizer::Pooled } else { Minimizer::PerSample };
    let r = match args.metric {
        MetricKind::Edit => {
            let (x, y) = (load_words(&args.x)?, load_words(&args.y)?);
            let cfg = PermTestConfig::new(args.resamples, args.seed).mode(mode).minimizer(minimizer);
            inference::permutation_test_with(&x, &y, &Levenshtein, &cfg)?
        }
        MetricKind::Circular => {
            let (x, y) = (load_angles(&args.x)?, load_angles(&args.y)?);
            let cfg = PermTestConfig::new(args.resamples, args.seed).mode(mode).minimizer(minimizer);
            inference::permutation_test_with(&x, &y, &circular::Circular, &cfg)?
        }
    };
    let mut rec = Record::new();
    rec.push("observed", Field::Num(r.observed))
        .push("resamples", Field::Int(r.resamples as u64))
        .push("skipped", Field::Int(r.skipped as u64))
        .push("p_value", Field::Num(r.p_value))
        .push("seed", Field::Int(r.seed))
        .push("exact", Field::Bool(r.exact));
    Ok(render(&rec, args.format))
}

fn run_distances(args: &DistancesArgs) -> CliResult<String> {
    Ok(match args.metric {
        MetricKind::Edit => {
            let words = editdist::distinct_forms(&load_words(&args.data)?);
            distance_matrix(&words, &Levenshtein)?.to_tsv()
        }
        MetricKind::Circular => distance_matrix(&load_angles(&args.data)?, &circular::Circular)?.to_tsv(),
    })
}

fn run(cli: &Cli) -> CliResult<String> {
    match &cli.command {
        Command::Circular(a) => run_circular(a),
        Command::Strings(a) => run_strings(a),
        Command::Group(a) => run_group(a),
        Command::Permtest(a) => run_permtest(a),
        Command::Distances(a) => run_distances(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|out| {
        std::io::stdout()
            .lock()
            .write_all(out.as_bytes())
            .map_err(|e| CliError::Internal(format!("writing output: {e}")))
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(1)
        }
    }
}
