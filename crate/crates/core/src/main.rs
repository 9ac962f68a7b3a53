use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use spectralwl::canonicalize::{
    canonicalization_report, column_flags, equi_canonicalize, simple_spectral_pair, CanonConfig, DEFAULT_CANON_ROUNDS,
    DEFAULT_CANON_RULE, DEFAULT_SUM_TOL,
};
use spectralwl::color::DEFAULT_QUANTIZER_SCALE;
use spectralwl::counterexamples::{gen_epnn_counterexample, gen_oge_pair, gen_orthonormal_counterexample};
use spectralwl::eigen::{eigendecompose, truncate, SpectralPair, TruncateOrder, DEFAULT_EIG_TOL};
use spectralwl::epnn::{epnn_distinguish, DEFAULT_ZERO_TOL};
use spectralwl::equi::{equi_distinguish, UpdateRule};
use spectralwl::graph::{laplacian, parse_input, Graph, GraphFormat, GraphInput, SymmetricMatrix};
use spectralwl::oracle::{
    find_signed_isomorphism_capped, perm_isomorphic_matrices_capped, DEFAULT_MATRIX_CAP, DEFAULT_ORACLE_TOL,
    DEFAULT_SIGNED_CAP,
};
use spectralwl::stats::{corpus_stats, DatasetStatsReport, GraphSpectralStats};
use spectralwl::wl::wl1_distinguish;
use spectralwl::{Error, Quantizer};

#[derive(Parser)]
#[command(name = "spectralwl", version, about = "Spectral color refinement and eigenvector analysis for graphs")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct RunConfig {
    /// Eigenvalues closer than this are treated as equal.
    #[arg(long, global = true, default_value_t = DEFAULT_EIG_TOL)]
    eig_tol: f64,
    /// Eigenvector entries at most this large in magnitude count as zero.
    #[arg(long, global = true, default_value_t = DEFAULT_ZERO_TOL)]
    zero_tol: f64,
    /// Column sums at most this large in magnitude leave the sign undecided.
    #[arg(long, global = true, default_value_t = DEFAULT_SUM_TOL)]
    sum_tol: f64,
    /// Entry tolerance of the isomorphism search.
    #[arg(long, global = true, default_value_t = DEFAULT_ORACLE_TOL)]
    oracle_tol: f64,
    #[arg(long, global = true, default_value_t = DEFAULT_QUANTIZER_SCALE)]
    quantizer_scale: f64,
    #[arg(long, global = true, default_value_t = 20)]
    max_rounds: usize,
    /// Seeds of the random update tables tried after the proof rule.
    #[arg(long, global = true, value_delimiter = ',', default_value = "1,2,3")]
    seeds: Vec<u64>,
    #[arg(long, global = true, env = "SPECTRALWL_WORKERS")]
    workers: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Wl1,
    Epnn,
    Equi,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Builtin {
    EpnnCounterexample,
    OrthonormalCounterexample,
    Oge,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum FixtureName {
    Epnn,
    Orthonormal,
    Oge,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Order {
    Largest,
    SmallestNonzero,
}

#[derive(Args, Debug, Clone)]
struct PairInput {
    /// Two input files: graphs, matrices or spectral pairs.
    #[arg(num_args = 0..=2)]
    files: Vec<PathBuf>,
    #[arg(long, value_enum, conflicts_with = "files")]
    builtin: Option<Builtin>,
    /// Eigenvectors kept per graph or matrix input (default: all).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum, default_value_t = Order::Largest)]
    order: Order,
}

#[derive(Subcommand)]
enum Command {
    /// Spectral statistics over graph files or directories.
    Stats {
        paths: Vec<PathBuf>,
        #[arg(long)]
        per_graph: bool,
        /// Report over the readable graphs instead of failing.
        #[arg(long)]
        skip_errors: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether a refinement test separates two inputs.
    Separate {
        #[command(flatten)]
        input: PairInput,
        #[arg(long, value_enum, default_value_t = Mode::Epnn)]
        mode: Mode,
        /// Update rules for the equivariant mode, e.g. `proof_rule,random_table(7)`.
        #[arg(long, value_delimiter = ',')]
        rules: Vec<String>,
    },
    /// Canonicalize eigenvector signs of one input, or report over a directory.
    Canonicalize {
        path: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CANON_RULE.to_string())]
        rule: String,
        #[arg(long, default_value_t = DEFAULT_CANON_ROUNDS)]
        rounds: usize,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value_t = Order::Largest)]
        order: Order,
        #[arg(long)]
        skip_errors: bool,
    },
    /// Write a built-in counterexample to JSON files.
    Counterexample {
        #[arg(value_enum)]
        name: FixtureName,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Search for a sign-permutation isomorphism between two inputs.
    Iso {
        #[command(flatten)]
        input: PairInput,
        #[arg(long, default_value_t = DEFAULT_SIGNED_CAP)]
        cap: usize,
    },
}

type CliResult<T> = std::result::Result<T, CliError>;

enum CliError {
    Lib(Error),
    Usage(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Lib(e.into())
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl RunConfig {
    fn validate(&self) -> CliResult<()> {
        for (name, v) in [
            ("--eig-tol", self.eig_tol),
            ("--zero-tol", self.zero_tol),
            ("--sum-tol", self.sum_tol),
            ("--oracle-tol", self.oracle_tol),
        ] {
            if !(v > 0.0) {
                return Err(usage(format!("{name} must be positive")));
            }
        }
        if self.workers == Some(0) {
            return Err(usage("--workers must be at least 1"));
        }
        if self.max_rounds == 0 {
            return Err(usage("--max-rounds must be at least 1"));
        }
        Ok(())
    }

    fn quantizer(&self) -> CliResult<Quantizer> {
        Ok(Quantizer::new(self.quantizer_scale)?)
    }

    fn pool(&self) -> CliResult<rayon::ThreadPool> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(w) = self.workers {
            builder = builder.num_threads(w);
        }
        builder.build().map_err(|e| usage(format!("cannot start worker pool: {e}")))
    }
}

/// Any file a subcommand can read.
enum Loaded {
    Graphs(Vec<Graph>),
    Matrix(SymmetricMatrix),
    Pair(SpectralPair),
}

fn load(path: &Path) -> CliResult<Loaded> {
    let text = fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e == "json") {
        let value: Value = serde_json::from_str(&text).map_err(Error::from)?;
        if let Value::Array(items) = &value {
            let graphs = items
                .iter()
                .map(|item| match parse_input(&item.to_string(), GraphFormat::JsonGraph)? {
                    GraphInput::Graph(g) => Ok(g),
                    GraphInput::Matrix(_) => Err(usage("graph arrays may not contain matrices")),
                })
                .collect::<CliResult<_>>()?;
            return Ok(Loaded::Graphs(graphs));
        }
        if value.get("V").is_some() {
            return Ok(Loaded::Pair(SpectralPair::from_json(&text)?));
        }
    }
    let format = if path.extension().is_some_and(|e| e == "json") {
        GraphFormat::JsonGraph
    } else {
        GraphFormat::EdgeList
    };
    Ok(match parse_input(&text, format)? {
        GraphInput::Graph(g) => Loaded::Graphs(vec![g]),
        GraphInput::Matrix(m) => Loaded::Matrix(m),
    })
}

fn single(path: &Path) -> CliResult<Loaded> {
    match load(path)? {
        Loaded::Graphs(mut gs) if gs.len() == 1 => Ok(Loaded::Graphs(vec![gs.remove(0)])),
        Loaded::Graphs(_) => Err(usage(format!("{} must contain exactly one graph", path.display()))),
        other => Ok(other),
    }
}

fn spectral_pair(m: &SymmetricMatrix, k: Option<usize>, order: Order, cfg: &RunConfig) -> CliResult<SpectralPair> {
    let ed = eigendecompose(m)?;
    let order = match order {
        Order::Largest => TruncateOrder::Largest,
        Order::SmallestNonzero => TruncateOrder::SmallestNonzero,
    };
    Ok(truncate(&ed, k.unwrap_or(m.n()), cfg.eig_tol, order)?)
}

fn to_pair(loaded: &Loaded, k: Option<usize>, order: Order, cfg: &RunConfig) -> CliResult<SpectralPair> {
    match loaded {
        Loaded::Pair(sp) => Ok(sp.clone()),
        Loaded::Matrix(m) => spectral_pair(m, k, order, cfg),
        Loaded::Graphs(gs) => spectral_pair(&laplacian(&gs[0]), k, order, cfg),
    }
}

fn builtin_inputs(b: Builtin) -> CliResult<(Loaded, Loaded)> {
    Ok(match b {
        Builtin::EpnnCounterexample => {
            let (u, v) = gen_epnn_counterexample(None)?;
            (Loaded::Pair(u), Loaded::Pair(v))
        }
        Builtin::OrthonormalCounterexample => {
            let (u, v) = gen_orthonormal_counterexample(None)?;
            (Loaded::Pair(u), Loaded::Pair(v))
        }
        Builtin::Oge => {
            let oge = gen_oge_pair();
            (Loaded::Matrix(oge.l1), Loaded::Matrix(oge.l2))
        }
    })
}

fn pair_inputs(input: &PairInput) -> CliResult<(Loaded, Loaded)> {
    match (input.builtin, input.files.as_slice()) {
        (Some(b), []) => builtin_inputs(b),
        (None, [a, b]) => Ok((single(a)?, single(b)?)),
        _ => Err(usage("give two input files or --builtin")),
    }
}

fn print_json<T: Serialize>(value: &T) -> CliResult<()> {
    println!("{}", serde_json::to_string(value).map_err(Error::from)?);
    Ok(())
}

fn cmd_separate(input: &PairInput, mode: Mode, rules: &[String], cfg: &RunConfig) -> CliResult<ExitCode> {
    let (a, b) = pair_inputs(input)?;
    let q = cfg.quantizer()?;
    let separated = match mode {
        Mode::Wl1 => {
            let (Loaded::Graphs(ga), Loaded::Graphs(gb)) = (&a, &b) else {
                return Err(usage("wl1 mode needs graph inputs"));
            };
            let v = wl1_distinguish(&ga[0], &gb[0], cfg.max_rounds)?;
            print_json(&v)?;
            v.is_separated()
        }
        Mode::Epnn => {
            let (sa, sb) = (to_pair(&a, input.k, input.order, cfg)?, to_pair(&b, input.k, input.order, cfg)?);
            let v = epnn_distinguish(&sa, &sb, cfg.max_rounds, &q)?;
            print_json(&v)?;
            v.is_separated()
        }
        Mode::Equi => {
            let (sa, sb) = (to_pair(&a, input.k, input.order, cfg)?, to_pair(&b, input.k, input.order, cfg)?);
            let rules = if rules.is_empty() {
                UpdateRule::default_set(&cfg.seeds)
            } else {
                rules.iter().map(|r| r.parse()).collect::<spectralwl::Result<_>>()?
            };
            let v = equi_distinguish(&sa, &sb, &rules, cfg.max_rounds, &q)?;
            print_json(&v)?;
            v.verdict.is_separated()
        }
    };
    Ok(ExitCode::from(if separated { 0 } else { 1 }))
}

fn cmd_iso(input: &PairInput, cap: usize, cfg: &RunConfig) -> CliResult<ExitCode> {
    let (a, b) = pair_inputs(input)?;
    let found = match (&a, &b) {
        (Loaded::Matrix(ma), Loaded::Matrix(mb)) => {
            let perm = perm_isomorphic_matrices_capped(ma, mb, cfg.oracle_tol, cap.min(DEFAULT_MATRIX_CAP))?;
            print_json(&json!({ "witness": perm }))?;
            perm.is_some()
        }
        _ => {
            let (sa, sb) = (to_pair(&a, input.k, input.order, cfg)?, to_pair(&b, input.k, input.order, cfg)?);
            let g = find_signed_isomorphism_capped(&sa, &sb, cfg.oracle_tol, cap)?;
            print_json(&json!({ "witness": g }))?;
            g.is_some()
        }
    };
    Ok(ExitCode::from(if found { 0 } else { 1 }))
}

fn cmd_counterexample(name: FixtureName, out: &Path) -> CliResult<ExitCode> {
    fs::create_dir_all(out)?;
    let files: Vec<(&str, String)> = match name {
        FixtureName::Epnn => {
            let (u, v) = gen_epnn_counterexample(None)?;
            vec![("U.json", u.to_json()), ("V.json", v.to_json())]
        }
        FixtureName::Orthonormal => {
            let (u, v) = gen_orthonormal_counterexample(None)?;
            vec![("U_tilde.json", u.to_json()), ("V_tilde.json", v.to_json())]
        }
        FixtureName::Oge => {
            let oge = gen_oge_pair();
            vec![("L1.json", oge.l1.to_json()), ("L2.json", oge.l2.to_json())]
        }
    };
    for (file, body) in files {
        let path = out.join(file);
        fs::write(&path, body + "\n")?;
        println!("{}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

/// Graph files under `paths`, directories expanded one level in name order.
fn graph_files(paths: &[PathBuf]) -> CliResult<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut entries: Vec<PathBuf> = fs::read_dir(p)?
                .map(|e| e.map(|e| e.path()))
                .collect::<std::io::Result<_>>()?;
            entries.retain(|e| e.is_file() && !e.file_name().is_some_and(|n| n.to_string_lossy().starts_with('.')));
            entries.sort();
            files.extend(entries);
        } else {
            files.push(p.clone());
        }
    }
    Ok(files)
}

/// Graphs from every file with a source label. Unreadable files are
/// reported to stderr; they abort the run unless `skip_errors` is set.
fn load_corpus(paths: &[PathBuf], skip_errors: bool) -> CliResult<Vec<(String, Graph)>> {
    let mut corpus = Vec::new();
    let mut failures = 0;
    for file in graph_files(paths)? {
        let label = file.display().to_string();
        match load(&file) {
            Ok(Loaded::Graphs(gs)) if gs.len() == 1 => corpus.extend(gs.into_iter().map(|g| (label.clone(), g))),
            Ok(Loaded::Graphs(gs)) => {
                corpus.extend(gs.into_iter().enumerate().map(|(i, g)| (format!("{label}[{i}]"), g)))
            }
            Ok(_) => {
                failures += 1;
                eprintln!("error: {label}: not a graph");
            }
            Err(CliError::Lib(e)) => {
                failures += 1;
                eprintln!("error: {label}: {e}");
            }
            Err(CliError::Usage(e)) => {
                failures += 1;
                eprintln!("error: {label}: {e}");
            }
        }
    }
    if failures > 0 {
        if !skip_errors {
            return Err(usage(format!("{failures} file(s) could not be read")));
        }
        eprintln!("warning: skipped {failures} unreadable file(s)");
    }
    if corpus.is_empty() {
        return Err(usage("no graphs found"));
    }
    Ok(corpus)
}

#[derive(Serialize)]
struct GraphRow<'a> {
    source: &'a str,
    #[serde(flatten)]
    stats: &'a GraphSpectralStats,
}

fn cmd_stats(
    paths: &[PathBuf],
    per_graph: bool,
    skip_errors: bool,
    out: Option<&Path>,
    cfg: &RunConfig,
) -> CliResult<ExitCode> {
    let corpus = load_corpus(paths, skip_errors)?;
    let graphs: Vec<Graph> = corpus.iter().map(|(_, g)| g.clone()).collect();
    let results = cfg.pool()?.install(|| corpus_stats(&graphs, cfg.eig_tol, cfg.zero_tol));
    let mut rows = Vec::new();
    let mut failures = 0;
    for ((label, _), r) in corpus.iter().zip(results) {
        match r {
            Ok(s) => rows.push((label.as_str(), s)),
            Err(e) => {
                failures += 1;
                eprintln!("error: {label}: {e}");
            }
        }
    }
    if failures > 0 {
        if !skip_errors {
            return Err(usage(format!("{failures} graph(s) failed")));
        }
        eprintln!("warning: skipped {failures} failed graph(s)");
    }
    let stats: Vec<GraphSpectralStats> = rows.iter().map(|(_, s)| s.clone()).collect();
    let report = DatasetStatsReport::from_stats(&stats).map_err(|_| usage("no graphs found"))?;
    let per_graph_rows: Vec<GraphRow<'_>> = rows.iter().map(|(source, stats)| GraphRow { source, stats }).collect();
    let body = match cfg.format {
        Format::Json if per_graph => {
            let mut v = serde_json::to_value(&report).map_err(Error::from)?;
            v["per_graph"] = serde_json::to_value(&per_graph_rows).map_err(Error::from)?;
            serde_json::to_string_pretty(&v).map_err(Error::from)?
        }
        Format::Json => serde_json::to_string_pretty(&report).map_err(Error::from)?,
        Format::Csv if per_graph => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in &per_graph_rows {
                w.serialize(row).map_err(Error::from)?;
            }
            String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?).expect("UTF-8")
        }
        Format::Csv => report.to_csv()?,
    };
    write_output(&body, out)?;
    Ok(ExitCode::SUCCESS)
}

fn write_output(body: &str, out: Option<&Path>) -> CliResult<()> {
    let body = if body.ends_with('\n') { body.to_string() } else { format!("{body}\n") };
    match out {
        Some(p) => fs::write(p, body)?,
        None => print!("{body}"),
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_canonicalize(
    path: &Path,
    rule: &str,
    rounds: usize,
    k: Option<usize>,
    order: Order,
    skip_errors: bool,
    cfg: &RunConfig,
) -> CliResult<ExitCode> {
    let rule: UpdateRule = rule.parse()?;
    let q = cfg.quantizer()?;
    if path.is_dir() {
        let corpus: Vec<Graph> = load_corpus(&[path.to_path_buf()], skip_errors)?.into_iter().map(|(_, g)| g).collect();
        let canon = CanonConfig { rule, rounds, eig_tol: cfg.eig_tol, sum_tol: cfg.sum_tol, quantizer: q };
        let report = cfg.pool()?.install(|| canonicalization_report(&corpus, &canon))?;
        if let Some(w) = &report.warning {
            eprintln!("warning: {w}");
        }
        let body = match cfg.format {
            Format::Json => serde_json::to_string_pretty(&report).map_err(Error::from)?,
            Format::Csv => {
                let pct = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
                format!(
                    "statistic,value\ninput_sum_zero_pct,{}\ninput_uncanonicalizable_pct,{}\n\
                     output_sum_zero_pct,{}\noutput_uncanonicalizable_pct,{}\nn_simple_eigenvectors,{}\n",
                    pct(report.input_sum_zero_pct),
                    pct(report.input_uncanonicalizable_pct),
                    pct(report.output_sum_zero_pct),
                    pct(report.output_uncanonicalizable_pct),
                    report.n_simple_eigenvectors
                )
            }
        };
        write_output(&body, None)?;
        return Ok(ExitCode::SUCCESS);
    }
    let loaded = single(path)?;
    let sp = match (&loaded, k) {
        (Loaded::Graphs(gs), None) => simple_spectral_pair(&gs[0], cfg.eig_tol)?
            .ok_or_else(|| usage("graph has no simple eigenvectors"))?,
        _ => to_pair(&loaded, k, order, cfg)?,
    };
    let result = equi_canonicalize(&sp, rule, rounds, cfg.sum_tol, &q)?;
    let mut v = serde_json::to_value(&result).map_err(Error::from)?;
    v["lambdas"] = json!(sp.lambdas());
    v["input_flags"] = json!(column_flags(sp.vectors(), cfg.sum_tol));
    v["output_flags"] = json!(column_flags(&result.features, cfg.sum_tol));
    print_json(&v)?;
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    let cfg = &cli.config;
    cfg.validate()?;
    match &cli.command {
        Command::Stats { paths, per_graph, skip_errors, out } => {
            cmd_stats(paths, *per_graph, *skip_errors, out.as_deref(), cfg)
        }
        Command::Separate { input, mode, rules } => cmd_separate(input, *mode, rules, cfg),
        Command::Canonicalize { path, rule, rounds, k, order, skip_errors } => {
            cmd_canonicalize(path, rule, *rounds, *k, *order, *skip_errors, cfg)
        }
        Command::Counterexample { name, out } => cmd_counterexample(*name, out),
        Command::Iso { input, cap } => cmd_iso(input, *cap, cfg),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::KMismatch { .. } => 3,
                Error::ResourceLimit { .. } => 4,
                _ => 2,
            })
        }
    }
}
