//! The `walkbound` command line.
//!
//! Exit codes: 0 on success, 1 when input or arguments are rejected, 2 when
//! a bound or flow law is found violated.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::bounds::{self, BoundReport, TheoremConfig};
use crate::error::{Error, Result};
use crate::exact;
use crate::flows;
use crate::generators::{self, GeneratorSpec, RandomSpec, DEFAULT_MAX_VERTICES};
use crate::graph::{self, WeightedGraph};
use crate::montecarlo::{self, Estimator, GraphWalker, SimConfig};
use crate::report::extended_f64;

/// Exact hitting times, their lower bounds, and loss-flow decompositions
/// for random walks on weighted graphs.
#[derive(Debug, Parser)]
#[command(name = "walkbound", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact hitting statistics and every bound, as JSON.
    Analyze(AnalyzeArgs),
    /// Loss flow, its path decomposition and law residuals, as JSON.
    Decompose(DecomposeArgs),
    /// Write a generated graph file.
    Generate(GenerateArgs),
    /// Simulate hitting times or escape ratios, as CSV.
    Simulate(SimulateArgs),
    /// Closed-form and exact times against the bounds over a list of n, as CSV.
    Sweep(SweepArgs),
    /// Run every property check over a seeded random corpus.
    CorpusCheck(CorpusArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct AnalyzeArgs {
    pub graph: PathBuf,
    #[arg(long, value_delimiter = ',')]
    pub beta_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub a_grid: Option<Vec<f64>>,
    /// Largest pmf horizon.
    #[arg(long)]
    pub horizon: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct DecomposeArgs {
    pub graph: PathBuf,
    #[arg(long)]
    pub beta: f64,
    /// Seed for the sampled cycles of the reversibility check.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct GenerateArgs {
    #[command(subcommand)]
    pub family: Family,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    UnitPath {
        #[arg(long)]
        n: usize,
    },
    BiasedLine {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        g: f64,
        #[arg(long, default_value_t = 0)]
        tail: usize,
    },
    FastPath {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        g: f64,
    },
    /// Fast path with odds chosen for polynomial boundary growth `n^p`.
    PolyFastPath {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
    },
    RecurrentTreeLine {
        #[arg(long, default_value_t = 2)]
        arity: usize,
        #[arg(long, value_delimiter = ',')]
        depths: Vec<u32>,
        #[arg(long)]
        length: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_VERTICES)]
        max_vertices: usize,
    },
    ConcatenatedFast {
        /// Cut points; defaults to 16,256,65536.
        #[arg(long, value_delimiter = ',')]
        cuts: Option<Vec<usize>>,
        #[arg(long, default_value_t = 0.0)]
        p: f64,
    },
    Random {
        #[arg(long)]
        seed: u64,
    },
}

impl Family {
    pub fn spec(&self) -> GeneratorSpec {
        match *self {
            Self::UnitPath { n } => GeneratorSpec::UnitPath { n },
            Self::BiasedLine { n, g, tail } => GeneratorSpec::BiasedLine { n, g, tail },
            Self::FastPath { n, g } => GeneratorSpec::FastPath { n, g },
            Self::PolyFastPath { n, p } => GeneratorSpec::PolyFastPath { n, p },
            Self::RecurrentTreeLine {
                arity,
                ref depths,
                length,
                max_vertices,
            } => GeneratorSpec::RecurrentTreeLine {
                arity,
                depths: depths.clone(),
                length,
                max_vertices,
            },
            Self::ConcatenatedFast { ref cuts, p } => GeneratorSpec::ConcatenatedFast {
                cuts: cuts
                    .clone()
                    .unwrap_or_else(|| generators::default_cut_points(16, 3)),
                p,
            },
            Self::Random { seed } => GeneratorSpec::Random(RandomSpec::corpus(seed)),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimStatistic {
    HittingTime,
    Speed,
    SingleLog,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    pub graph: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000)]
    pub reps: u64,
    /// Step budget; hitting times beyond it are censored.
    #[arg(long, default_value_t = 10_000_000)]
    pub horizon: u64,
    #[arg(long, value_enum, default_value_t = SimStatistic::HittingTime)]
    pub statistic: SimStatistic,
    /// Steps at which distances are recorded (escape statistics).
    #[arg(long, value_delimiter = ',')]
    pub record: Vec<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepFamily {
    UnitPath,
    FastPath,
    PolyFastPath,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub family: SweepFamily,
    #[arg(long, value_delimiter = ',', required = true)]
    pub n_list: Vec<usize>,
    /// Odds for `fast-path`.
    #[arg(long)]
    pub g: Option<f64>,
    /// Growth power for `poly-fast-path`.
    #[arg(long, default_value_t = 0.0)]
    pub p: f64,
    /// Largest graph solved exactly; bigger rows leave `exact_et` empty.
    #[arg(long, default_value_t = 1_000_001)]
    pub max_vertices: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CorpusArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub count: usize,
    #[arg(long, value_delimiter = ',')]
    pub beta_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub a_grid: Option<Vec<f64>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Provenance attached to every output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Value,
    /// SHA-256 of each input file, keyed by path.
    pub inputs: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub version: String,
    pub outputs: Vec<String>,
}

impl RunManifest {
    fn new(command: &str, parameters: &impl Serialize, seed: Option<u64>) -> Result<Self> {
        Ok(Self {
            command: command.to_string(),
            parameters: serde_json::to_value(parameters)?,
            inputs: BTreeMap::new(),
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: Vec::new(),
        })
    }

    fn input(&mut self, path: &Path, bytes: &[u8]) {
        self.inputs.insert(
            path.display().to_string(),
            hex::encode(Sha256::digest(bytes)),
        );
    }

    fn output(&mut self, path: &Option<PathBuf>) {
        if let Some(p) = path {
            self.outputs.push(p.display().to_string());
        }
    }
}

/// What a command decided, before it becomes an exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    Violation,
}

/// Parses `args` (program name first), runs the command and maps the result
/// to an exit code, reporting errors on stderr.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli.command) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Violation) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

pub fn run(command: &Command) -> Result<Outcome> {
    match command {
        Command::Analyze(args) => analyze(args),
        Command::Decompose(args) => decompose(args),
        Command::Generate(args) => generate(args),
        Command::Simulate(args) => simulate(args),
        Command::Sweep(args) => sweep(args),
        Command::CorpusCheck(args) => corpus_check(args),
    }
}

fn load(path: &Path, manifest: &mut RunManifest) -> Result<WeightedGraph> {
    let bytes = std::fs::read(path)?;
    manifest.input(path, &bytes);
    graph::parse(&bytes)
}

/// Writes `bytes` to `out` through a temporary file in the same directory,
/// or to stdout.
pub fn write_atomic(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(bytes)?;
            tmp.as_file().sync_all()?;
            tmp.persist(path).map_err(|e| Error::Io(e.error))?;
        }
    }
    Ok(())
}

fn emit_json(out: &Option<PathBuf>, manifest: &RunManifest, result: impl Serialize) -> Result<()> {
    let doc = json!({ "manifest": manifest, "result": result });
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    write_atomic(out.as_deref(), text.as_bytes())
}

/// CSV goes to `out` with the manifest beside it in `<out>.manifest.json`.
fn emit_csv(out: &Option<PathBuf>, manifest: &RunManifest, csv: &[u8]) -> Result<()> {
    write_atomic(out.as_deref(), csv)?;
    if let Some(path) = out {
        let mut sidecar = path.clone().into_os_string();
        sidecar.push(".manifest.json");
        let mut text = serde_json::to_string_pretty(manifest)?;
        text.push('\n');
        write_atomic(Some(Path::new(&sidecar)), text.as_bytes())?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct PmfSummary {
    horizon: usize,
    survival_mass: f64,
    /// Smallest `k` with `P(T <= k) >= q`, for `q` = 0.1, 0.5, 0.9.
    quantiles: Vec<(f64, Option<usize>)>,
}

fn pmf_summary(stats: &exact::HittingStats) -> PmfSummary {
    let mut cdf = 0.0;
    let mut quantiles: Vec<(f64, Option<usize>)> =
        [0.1, 0.5, 0.9].iter().map(|&q| (q, None)).collect();
    for (k, p) in stats.pmf.iter().enumerate() {
        cdf += p;
        for (q, at) in quantiles.iter_mut() {
            if at.is_none() && cdf >= *q {
                *at = Some(k);
            }
        }
    }
    PmfSummary {
        horizon: stats.horizon(),
        survival_mass: stats.survival_mass,
        quantiles,
    }
}

#[derive(Debug, Serialize)]
struct AnalyzeResult {
    vertices: usize,
    distance: Option<usize>,
    #[serde(with = "extended_f64")]
    expected_t: f64,
    #[serde(with = "extended_f64")]
    resistance: f64,
    pmf: Option<PmfSummary>,
    bounds: Option<BoundReport>,
    /// Why `bounds` is absent.
    vacuous: Option<String>,
}

fn theorem_config(
    beta: &Option<Vec<f64>>,
    a: &Option<Vec<f64>>,
    horizon: Option<usize>,
) -> Result<TheoremConfig> {
    let mut config = TheoremConfig::default();
    if let Some(b) = beta {
        if let Some(bad) = b.iter().find(|&&x| !(x > 0.0 && x < 1.0)) {
            return crate::error::domain(format!("beta grid value {bad} is outside (0, 1)"));
        }
        config.beta_grid = b.clone();
    }
    config.a_grid = a.clone();
    if let Some(h) = horizon {
        config.max_horizon = h;
    }
    Ok(config)
}

/// The analysis behind the `analyze` command.
pub fn analyze_graph(g: &WeightedGraph, config: &TheoremConfig) -> Result<(Value, Outcome)> {
    let reduced = bounds::reduce(g);
    let expected_t = exact::expected_hitting_time(&reduced)?;
    let resistance = exact::effective_resistance(&reduced)?;
    let mut result = AnalyzeResult {
        vertices: g.num_vertices(),
        distance: g.origin_target_distance(),
        expected_t,
        resistance,
        pmf: None,
        bounds: None,
        vacuous: None,
    };
    if expected_t.is_finite() {
        let horizon = exact::default_horizon(&reduced)?.min(config.max_horizon);
        result.pmf = Some(pmf_summary(&exact::hitting_time_pmf(&reduced, horizon)?));
    }
    let mut outcome = Outcome::Ok;
    match bounds::check_theorem1(g, config) {
        Ok(report) => {
            if !report.passed() {
                outcome = Outcome::Violation;
            }
            result.bounds = Some(report);
        }
        Err(e @ (Error::InfiniteExpectation(_) | Error::DegenerateDistance(_))) => {
            result.vacuous = Some(e.to_string());
        }
        Err(e) => return Err(e),
    }
    Ok((serde_json::to_value(result)?, outcome))
}

fn analyze(args: &AnalyzeArgs) -> Result<Outcome> {
    let mut manifest = RunManifest::new("analyze", args, None)?;
    let g = load(&args.graph, &mut manifest)?;
    let config = theorem_config(&args.beta_grid, &args.a_grid, args.horizon)?;
    let (result, outcome) = analyze_graph(&g, &config)?;
    manifest.output(&args.out);
    emit_json(&args.out, &manifest, result)?;
    Ok(outcome)
}

/// Largest residual allowed in a decomposition before it counts as a
/// violation.
pub const DECOMPOSITION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Serialize)]
pub struct Residuals {
    pub node_law: f64,
    pub cycle_gap: f64,
    pub reconstruction: f64,
    /// Largest gap between the parameters of the flow and the convex
    /// combination of the components.
    pub parameters: f64,
}

/// Flow, decomposition and residuals for the contracted graph.
pub fn decompose_graph(g: &WeightedGraph, beta: f64, seed: u64) -> Result<(Value, Residuals)> {
    if !(beta > 0.0 && beta < 1.0) {
        return crate::error::domain(format!("beta = {beta} is outside (0, 1)"));
    }
    let reduced = bounds::reduce(g);
    let flow = flows::build_flow(&reduced, beta)?;
    let decomposition = flows::decompose(&flow)?;
    let cycles = flows::sample_cycles(&flow, 64, seed);
    let whole = flows::flow_parameters(&flow)?;
    let combined = decomposition.combined_parameters()?;
    let residuals = Residuals {
        node_law: flows::verify_node_law(&flow),
        cycle_gap: flows::verify_reversibility(&flow, &cycles),
        reconstruction: decomposition.reconstruction_error(&flow),
        parameters: [
            (whole.s - combined.s).abs(),
            (whole.r - combined.r).abs(),
            (whole.gamma - combined.gamma).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max),
    };
    let value = json!({
        "labels": reduced.labels(),
        "parameters": whole,
        "decomposition": decomposition,
        "residuals": residuals,
    });
    Ok((value, residuals))
}

fn decompose(args: &DecomposeArgs) -> Result<Outcome> {
    let mut manifest = RunManifest::new("decompose", args, Some(args.seed))?;
    let g = load(&args.graph, &mut manifest)?;
    let (value, residuals) = decompose_graph(&g, args.beta, args.seed)?;
    manifest.output(&args.out);
    emit_json(&args.out, &manifest, value)?;
    Ok(if residuals.reconstruction > DECOMPOSITION_TOLERANCE {
        Outcome::Violation
    } else {
        Outcome::Ok
    })
}

fn generate(args: &GenerateArgs) -> Result<Outcome> {
    let spec = args.family.spec();
    let g = spec.build()?;
    let text = graph::serialize(&g);
    write_atomic(args.out.as_deref(), text.as_bytes())?;
    Ok(Outcome::Ok)
}

fn simulate(args: &SimulateArgs) -> Result<Outcome> {
    let mut manifest = RunManifest::new("simulate", args, Some(args.seed))?;
    let g = load(&args.graph, &mut manifest)?;
    let walker = GraphWalker::new(&g)?;
    let mut csv = Vec::new();
    match args.statistic {
        SimStatistic::HittingTime => {
            let config = SimConfig::hitting(args.seed, args.reps, args.horizon);
            let samples = montecarlo::simulate_hitting(&walker, &config);
            montecarlo::write_hitting_csv(&mut csv, &samples)?;
        }
        SimStatistic::Speed | SimStatistic::SingleLog => {
            let estimator = match args.statistic {
                SimStatistic::Speed => Estimator::SpeedRatio,
                _ => Estimator::SingleLogRatio,
            };
            if args.record.is_empty() {
                return crate::error::domain("escape statistics need --record");
            }
            let config = SimConfig::escape(args.seed, args.reps, args.record.clone(), estimator);
            let samples = montecarlo::escape_ratios(&walker, &config)?;
            montecarlo::write_escape_csv(&mut csv, &samples, estimator)?;
        }
    }
    manifest.output(&args.out);
    emit_csv(&args.out, &manifest, &csv)?;
    Ok(Outcome::Ok)
}

/// One row of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub g: f64,
    pub closed_form_et: f64,
    pub exact_et: Option<f64>,
    /// Largest of the mean bounds of both odds choices.
    pub mean_bound: f64,
    pub asymptotic: Option<f64>,
    /// `closed_form_et / asymptotic`.
    pub ratio: Option<f64>,
}

/// Rows of the sweep over `n_list`.
pub fn sweep_rows(args: &SweepArgs) -> Result<Vec<SweepRow>> {
    args.n_list
        .iter()
        .map(|&n| {
            let (graph, g, closed, asymptotic) = match args.family {
                SweepFamily::UnitPath => (None, 1.0, (n * n) as f64, None),
                SweepFamily::FastPath | SweepFamily::PolyFastPath => {
                    let (g, asymptotic) = match (args.family, args.g) {
                        (SweepFamily::FastPath, Some(g)) => (g, None),
                        (SweepFamily::FastPath, None) => {
                            return crate::error::domain("fast-path sweeps need --g")
                        }
                        _ => (
                            generators::polyg_g(n as f64, args.p)?,
                            Some(bounds::poly_mean_asymptotic(n as f64, args.p)?),
                        ),
                    };
                    let graph = (n < args.max_vertices)
                        .then(|| generators::fast_path(n, g))
                        .transpose()?;
                    (
                        graph,
                        g,
                        generators::fast_path_expected_time(n, g),
                        asymptotic,
                    )
                }
            };
            let graph = match (graph, args.family) {
                (None, SweepFamily::UnitPath) if n < args.max_vertices => {
                    Some(generators::unit_path(n)?)
                }
                (graph, _) => graph,
            };
            let (exact_et, mean_bound) = match &graph {
                Some(graph) => {
                    let reduced = bounds::reduce(graph);
                    let admissible = n.saturating_sub(1);
                    let ga = bounds::solve_g_a(admissible, reduced.weight_ratio())?;
                    let gb = bounds::g_b(&reduced)?;
                    (
                        Some(exact::expected_hitting_time(&reduced)?),
                        bounds::mean_lower_bound(admissible, ga)
                            .max(bounds::mean_lower_bound(admissible, gb)),
                    )
                }
                None => {
                    let ratio = match args.family {
                        SweepFamily::UnitPath => 1.0,
                        _ => generators::fast_path_ratio(n, g),
                    };
                    let admissible = n.saturating_sub(1);
                    (
                        None,
                        bounds::mean_lower_bound(admissible, bounds::solve_g_a(admissible, ratio)?),
                    )
                }
            };
            Ok(SweepRow {
                n,
                g,
                closed_form_et: closed,
                exact_et,
                mean_bound,
                asymptotic,
                ratio: asymptotic.map(|a| closed / a),
            })
        })
        .collect()
}

fn sweep(args: &SweepArgs) -> Result<Outcome> {
    let manifest = {
        let mut m = RunManifest::new("sweep", args, None)?;
        m.output(&args.out);
        m
    };
    let rows = sweep_rows(args)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &rows {
        w.serialize(row)
            .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    emit_csv(&args.out, &manifest, &bytes)?;
    Ok(
        if rows
            .iter()
            .any(|r| r.closed_form_et < r.mean_bound * (1.0 - bounds::RELATIVE_SLACK))
        {
            Outcome::Violation
        } else {
            Outcome::Ok
        },
    )
}

/// Counts over a corpus run.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CorpusSummary {
    pub graphs: usize,
    pub verdicts: usize,
    pub bound_violations: usize,
    pub vacuous: usize,
    pub unchecked: usize,
    pub flow_violations: usize,
    pub commute_violations: usize,
    /// `(graph index, message)` for each failure.
    pub failures: Vec<(usize, String)>,
}

/// Largest relative commute-identity error tolerated.
pub const COMMUTE_TOLERANCE: f64 = 1e-9;

/// Runs the theorem, flow and commute-time checks over `graphs`.
pub fn check_corpus(graphs: &[WeightedGraph], config: &TheoremConfig) -> Result<CorpusSummary> {
    use rayon::prelude::*;
    let parts: Vec<Result<CorpusSummary>> = graphs
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let mut s = CorpusSummary {
                graphs: 1,
                ..Default::default()
            };
            let report = bounds::check_theorem1(g, config)?;
            s.verdicts = report.verdicts.len();
            for v in &report.verdicts {
                match v.status {
                    bounds::Status::Fail => {
                        s.bound_violations += 1;
                        s.failures.push((i, format!("{v:?}")));
                    }
                    bounds::Status::VacuousPass => s.vacuous += 1,
                    bounds::Status::Unchecked => s.unchecked += 1,
                    bounds::Status::Pass => {}
                }
            }
            for &beta in &[0.3, 0.9] {
                let (_, r) = decompose_graph(g, beta, i as u64)?;
                if r.node_law > 1e-10
                    || r.cycle_gap > 1e-9
                    || r.reconstruction > DECOMPOSITION_TOLERANCE
                    || r.parameters > DECOMPOSITION_TOLERANCE
                {
                    s.flow_violations += 1;
                    s.failures
                        .push((i, format!("flow residuals at beta {beta}: {r:?}")));
                }
            }
            let err = commute_error(g)?;
            if err > COMMUTE_TOLERANCE {
                s.commute_violations += 1;
                s.failures
                    .push((i, format!("commute identity off by {err:e}")));
            }
            Ok(s)
        })
        .collect();
    let mut total = CorpusSummary::default();
    for part in parts {
        let p = part?;
        total.graphs += p.graphs;
        total.verdicts += p.verdicts;
        total.bound_violations += p.bound_violations;
        total.vacuous += p.vacuous;
        total.unchecked += p.unchecked;
        total.flow_violations += p.flow_violations;
        total.commute_violations += p.commute_violations;
        total.failures.extend(p.failures);
    }
    Ok(total)
}

/// Relative error of `E T_oz + E T_zo = w_V r_oz` for a single target.
pub fn commute_error(g: &WeightedGraph) -> Result<f64> {
    let reduced = bounds::reduce(g);
    let z = reduced.targets()[0];
    let back = reduced.with_endpoints(reduced.label(z), &[reduced.label(reduced.origin())])?;
    let commute = exact::expected_hitting_time(&reduced)? + exact::expected_hitting_time(&back)?;
    let expected = reduced.total_weight() * exact::effective_resistance(&reduced)?;
    Ok((commute - expected).abs() / expected)
}

fn corpus_check(args: &CorpusArgs) -> Result<Outcome> {
    let mut manifest = RunManifest::new("corpus-check", args, Some(args.seed))?;
    manifest.output(&args.out);
    let config = theorem_config(&args.beta_grid, &args.a_grid, None)?;
    let graphs = generators::corpus(args.seed, args.count)?;
    let summary = check_corpus(&graphs, &config)?;
    let clean =
        summary.bound_violations + summary.flow_violations + summary.commute_violations == 0;
    emit_json(&args.out, &manifest, &summary)?;
    Ok(if clean {
        Outcome::Ok
    } else {
        Outcome::Violation
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("walkbound").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn unit_path_analysis() {
        let g = generators::unit_path(5).unwrap();
        let (v, outcome) = analyze_graph(&g, &TheoremConfig::default()).unwrap();
        assert_eq!(outcome, Outcome::Ok);
        assert!((v["expected_t"].as_f64().unwrap() - 25.0).abs() < 1e-9);
        assert!(v["bounds"]["verdicts"].as_array().unwrap().len() > 10);
    }

    #[test]
    fn unreachable_is_vacuous() {
        let g = graph::GraphBuilder::new()
            .edge("o", "a", 1.0)
            .edge("b", "z", 1.0)
            .origin("o")
            .target("z")
            .build()
            .unwrap();
        let (v, outcome) = analyze_graph(&g, &TheoremConfig::default()).unwrap();
        assert_eq!(outcome, Outcome::Ok);
        assert_eq!(v["expected_t"], "inf");
        assert!(v["bounds"].is_null() && v["vacuous"].is_string());
    }

    #[test]
    fn path_decomposes_into_one_component() {
        let g = generators::unit_path(6).unwrap();
        let (v, r) = decompose_graph(&g, 0.7, 0).unwrap();
        assert_eq!(
            v["decomposition"]["components"].as_array().unwrap().len(),
            1
        );
        assert!(r.reconstruction < 1e-12);
        assert!(decompose_graph(&g, 1.0, 0).is_err());
    }

    #[test]
    fn flags_parse() {
        let cli = parse(&[
            "analyze",
            "g.json",
            "--beta-grid",
            "0.1,0.5",
            "--horizon",
            "100",
        ]);
        match cli.command {
            Command::Analyze(a) => {
                assert_eq!(a.beta_grid, Some(vec![0.1, 0.5]));
                assert_eq!(a.horizon, Some(100));
            }
            _ => panic!(),
        }
        let cli = parse(&["generate", "fast-path", "--n", "3", "--g", "2"]);
        match cli.command {
            Command::Generate(a) => assert!(a.family.spec().build().is_err()),
            _ => panic!(),
        }
    }

    #[test]
    fn sweep_ratio_decreases() {
        let args = SweepArgs {
            family: SweepFamily::PolyFastPath,
            n_list: vec![100, 1000, 10_000, 100_000],
            g: None,
            p: 0.0,
            max_vertices: 20_000,
            out: None,
        };
        let rows = sweep_rows(&args).unwrap();
        assert!(rows.windows(2).all(|w| w[1].ratio < w[0].ratio));
        assert!(rows.iter().all(|r| r.mean_bound <= r.closed_form_et));
        assert!(rows[3].exact_et.is_none());
        let e = rows[2].exact_et.unwrap();
        assert!((e - rows[2].closed_form_et).abs() < 1e-9 * e);
    }

    #[test]
    fn atomic_write_and_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let out = Some(dir.path().join("s.csv"));
        let m = RunManifest::new("simulate", &json!({"x": 1}), Some(3)).unwrap();
        emit_csv(&out, &m, b"a,b\n").unwrap();
        assert_eq!(std::fs::read(dir.path().join("s.csv")).unwrap(), b"a,b\n");
        let side: RunManifest =
            serde_json::from_slice(&std::fs::read(dir.path().join("s.csv.manifest.json")).unwrap())
                .unwrap();
        assert_eq!(side, m);
    }

    #[test]
    fn small_corpus_is_clean() {
        let graphs = generators::corpus(100, 5).unwrap();
        let s = check_corpus(&graphs, &TheoremConfig::default()).unwrap();
        assert_eq!(s.graphs, 5);
        assert!(s.failures.is_empty(), "{:?}", s.failures);
    }
}
