//! Command-line front end for `hypan-core`.
//!
//! Every command is a pure function of its arguments and input bytes; the
//! JSON report it writes contains no timestamps, so repeated runs produce
//! byte-identical files.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use hypan_core::hyperbolicity::{self, BolicityResult, HyperbolicityRecord, Mode};
use hypan_core::metric::{self, AxiomReport, Lemma22Report, PtolemyReport};
use hypan_core::moebius::{self, DistortionReport, OrthogonalSource};
use hypan_core::transforms::{self, BoundarySet, TransformKind, TransformSpec};
use hypan_core::{generate, io, FiniteMetricSpace, PointCloud};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const TOOL_VERSION: &str = concat!("hypan ", env!("CARGO_PKG_VERSION"));

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "HYPAN_THREADS";

#[derive(Debug, Parser)]
#[command(name = "hypan", version, about = "Ptolemy, hyperbolicity and Moebius-distortion checks on finite metric spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a seeded random ball sample or tree metric.
    Gen(GenArgs),
    /// Apply a metric transform and write the resulting distance matrix.
    Transform(TransformArgs),
    /// Run the selected checks and write a JSON report.
    Analyze(AnalyzeArgs),
    /// Check chi-metric distortion bounds for a Moebius map of the punctured ball.
    Moebius(MoebiusArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Gen(_) => "gen",
            Command::Transform(_) => "transform",
            Command::Analyze(_) => "analyze",
            Command::Moebius(_) => "moebius",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Ball,
    Tree,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: GenKind,
    #[arg(long)]
    pub n: usize,
    /// Ambient dimension (ball only).
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `.json` writes a point cloud (ball only); anything else a CSV distance matrix.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// One of log, sp, Sp, chi, tau, hdc (case-sensitive).
    #[arg(long, value_parser = parse_transform_kind)]
    pub kind: TransformKind,
    #[arg(long)]
    pub base: Option<usize>,
    #[arg(long)]
    pub c: Option<f64>,
    /// Point-cloud JSON sampling the domain boundary (hdc only).
    #[arg(long)]
    pub boundary: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_transform_kind(s: &str) -> Result<TransformKind, String> {
    s.parse().map_err(|e: hypan_core::Error| e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Check {
    Metric,
    Ptolemy,
    Lemma22,
    Delta,
    Epsilon,
    Bolicity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Comma-separated subset of metric, ptolemy, lemma22, delta, epsilon, bolicity.
    #[arg(long, value_enum, value_delimiter = ',', required = true)]
    pub checks: Vec<Check>,
    #[arg(long, value_enum, default_value = "exhaustive")]
    pub mode: ModeArg,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Relative tolerance for inequality checks.
    #[arg(long, default_value_t = metric::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = hyperbolicity::DEFAULT_ROOT_TOL)]
    pub root_tol: f64,
    /// Base point for lemma22; all bases when omitted.
    #[arg(long)]
    pub base: Option<usize>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub report: PathBuf,
    /// Exit 1 unless the metric axioms hold.
    #[arg(long)]
    pub expect_metric: bool,
    /// Exit 1 unless the space is Ptolemy.
    #[arg(long)]
    pub expect_ptolemy: bool,
    /// Exit 1 if the five-point weighted inequality fails by more than --tol.
    #[arg(long)]
    pub expect_lemma22: bool,
    /// Exit 1 unless ε* is at least this value.
    #[arg(long)]
    pub expect_epsilon_min: Option<f64>,
    /// Exit 1 unless δ* is at most this value.
    #[arg(long)]
    pub expect_delta_max: Option<f64>,
}

#[derive(Debug, Args)]
pub struct MoebiusArgs {
    /// Comma-separated coordinates of a = f(0), with 0 ≤ |a| < 1.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub a: Vec<f64>,
    /// Seed for a random orthogonal part; identity when omitted.
    #[arg(long)]
    pub q_seed: Option<u64>,
    #[arg(long)]
    pub pairs: usize,
    #[arg(long, default_value_t = 0)]
    pub pair_seed: u64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long)]
    pub report: PathBuf,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] hypan_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Usage(_) => "InvalidArgument",
            CliError::Write { .. } => "Io",
        }
    }

    /// `{"error": kind, "message": text}` for standard error.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self.kind(), "message": self.to_string() }).to_string()
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpaceSummary {
    pub n: usize,
    pub provenance: String,
    pub excluded_base: Option<usize>,
}

impl SpaceSummary {
    fn of(space: &FiniteMetricSpace) -> Self {
        Self {
            n: space.n(),
            provenance: space.provenance().to_owned(),
            excluded_base: space.excluded_base(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportDocument {
    pub tool_version: String,
    /// SHA-256 of the input file, or of the canonical argument string for `moebius`.
    pub input_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub space_summary: Option<SpaceSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axiom: Option<AxiomReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ptolemy: Option<PtolemyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lemma22: Option<Vec<Lemma22Report>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hyperbolicity: Option<HyperbolicityRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bolicity: Option<BolicityResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distortion: Option<DistortionReport>,
}

impl ReportDocument {
    fn new(input_digest: String) -> Self {
        Self {
            tool_version: TOOL_VERSION.to_owned(),
            input_digest,
            space_summary: None,
            axiom: None,
            ptolemy: None,
            lemma22: None,
            hyperbolicity: None,
            bolicity: None,
            distortion: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// What a successful run produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub report: Option<ReportDocument>,
    /// Reasons for exit code 1; empty when every check passed.
    pub failures: Vec<String>,
    /// Non-fatal remarks for standard error.
    pub warnings: Vec<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        if self.failures.is_empty() {
            0
        } else {
            1
        }
    }
}

/// Caps the global rayon pool from `HYPAN_THREADS` when set.
pub fn configure_threads(value: Option<&str>) -> Result<(), CliError> {
    let Some(raw) = value else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| usage(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| usage(format!("cannot configure thread pool: {e}")))
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Gen(args) => run_gen(args),
        Command::Transform(args) => run_transform(args),
        Command::Analyze(args) => run_analyze(args),
        Command::Moebius(args) => run_moebius(args),
    }
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// Writes via a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let wrap = |source| CliError::Write {
        path: path.to_owned(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(wrap)?;
    tmp.write_all(contents.as_bytes()).map_err(wrap)?;
    tmp.as_file().sync_all().map_err(wrap)?;
    tmp.persist(path).map_err(|e| wrap(e.error))?;
    Ok(())
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

enum Input {
    Cloud(PointCloud),
    Matrix(FiniteMetricSpace),
}

fn read_input(path: &Path) -> Result<(Input, String), CliError> {
    let bytes = fs::read(path).map_err(hypan_core::Error::from)?;
    let text = std::str::from_utf8(&bytes).map_err(|e| hypan_core::Error::Parse {
        line: 0,
        column: 0,
        message: format!("input is not UTF-8: {e}"),
    })?;
    let input = if is_json(path) {
        Input::Cloud(io::parse_point_cloud(text)?)
    } else {
        Input::Matrix(io::parse_distance_matrix(text)?)
    };
    Ok((input, digest(&bytes)))
}

fn into_space(input: Input) -> Result<FiniteMetricSpace, CliError> {
    Ok(match input {
        Input::Cloud(c) => metric::build_metric_from_points(&c)?,
        Input::Matrix(m) => m,
    })
}

fn run_gen(args: &GenArgs) -> Result<Outcome, CliError> {
    if args.n == 0 {
        return Err(usage("--n must be positive"));
    }
    let text = match args.kind {
        GenKind::Ball => {
            if args.dim == 0 {
                return Err(usage("--dim must be positive"));
            }
            let cloud = generate::gen_random_ball(args.n, args.dim, args.seed);
            if is_json(&args.out) {
                io::format_point_cloud(&cloud)
            } else {
                io::format_distance_matrix(&metric::build_metric_from_points(&cloud)?)
            }
        }
        GenKind::Tree => {
            if is_json(&args.out) {
                return Err(usage("tree metrics have no coordinates; write them to a .csv path"));
            }
            io::format_distance_matrix(&generate::gen_tree_metric(args.n, args.seed))
        }
    };
    write_atomic(&args.out, &text)?;
    Ok(Outcome::default())
}

fn run_transform(args: &TransformArgs) -> Result<Outcome, CliError> {
    let spec = TransformSpec::new(args.kind, args.base, args.c);
    let (input, _) = read_input(&args.input)?;
    let mut outcome = Outcome::default();
    let out = if args.kind == TransformKind::Hdc {
        outcome.warnings = spec.validate(None)?;
        let Input::Cloud(cloud) = input else {
            return Err(usage("hdc needs a point-cloud (.json) input"));
        };
        let path = args
            .boundary
            .as_ref()
            .ok_or_else(|| usage("hdc needs --boundary"))?;
        let b = io::load_point_cloud(path)?;
        let boundary = BoundarySet::new(b.dim(), b.points().to_vec())?;
        let h = transforms::hdc_metric(&cloud, &boundary, spec.c_or_default())?;
        outcome.warnings.push(format!(
            "boundary sampling resolution {}",
            h.diagnostics.sampling_resolution
        ));
        h.space
    } else {
        if args.boundary.is_some() {
            return Err(usage("--boundary applies to hdc only"));
        }
        let space = into_space(input)?;
        outcome.warnings = spec.validate(Some(space.n()))?;
        let out = spec.apply(&space)?;
        if let Some(b) = out.excluded_base() {
            outcome
                .warnings
                .push(format!("base point {b} removed; output row i is input point i + (i >= {b})"));
        }
        out
    };
    write_atomic(&args.out, &io::format_distance_matrix(&out))?;
    Ok(outcome)
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(usage(format!("{name} must be positive, got {v}")))
    }
}

fn analyze_mode(args: &AnalyzeArgs) -> Result<Mode, CliError> {
    match args.mode {
        ModeArg::Exhaustive => {
            if args.samples.is_some() || args.seed.is_some() {
                return Err(usage("--samples and --seed need --mode sampled"));
            }
            Ok(Mode::Exhaustive)
        }
        ModeArg::Sampled => {
            let count = args.samples.unwrap_or(hyperbolicity::DEFAULT_SAMPLE_COUNT);
            if count == 0 {
                return Err(usage("--samples must be positive"));
            }
            Ok(Mode::Sampled {
                count,
                seed: args.seed.unwrap_or(0),
            })
        }
    }
}

fn run_analyze(args: &AnalyzeArgs) -> Result<Outcome, CliError> {
    let tol = positive("--tol", args.tol)?;
    let root_tol = positive("--root-tol", args.root_tol)?;
    let mode = analyze_mode(args)?;
    let wants = |c| args.checks.contains(&c);
    let bolicity_params = if wants(Check::Bolicity) {
        let (Some(r), Some(eta)) = (args.r, args.eta) else {
            return Err(usage("bolicity needs --r and --eta"));
        };
        Some((r, eta))
    } else {
        None
    };
    let expectations = [
        (args.expect_metric, Check::Metric, "--expect-metric"),
        (args.expect_ptolemy, Check::Ptolemy, "--expect-ptolemy"),
        (args.expect_lemma22, Check::Lemma22, "--expect-lemma22"),
        (args.expect_epsilon_min.is_some(), Check::Epsilon, "--expect-epsilon-min"),
        (args.expect_delta_max.is_some(), Check::Delta, "--expect-delta-max"),
    ];
    for (given, check, flag) in expectations {
        if given && !wants(check) {
            let name = check.to_possible_value().expect("no skipped variants");
            return Err(usage(format!("{flag} needs {} in --checks", name.get_name())));
        }
    }

    let (input, input_digest) = read_input(&args.input)?;
    let space = into_space(input)?;
    let mut doc = ReportDocument::new(input_digest);
    doc.space_summary = Some(SpaceSummary::of(&space));
    let mut outcome = Outcome::default();

    if wants(Check::Metric) {
        let r = metric::check_metric_axioms(&space, tol);
        if args.expect_metric && !r.is_metric() {
            outcome.failures.push("metric axioms fail".into());
        }
        doc.axiom = Some(r);
    }
    if wants(Check::Ptolemy) {
        let r = metric::ptolemy_defect(&space, tol);
        if args.expect_ptolemy && !r.is_ptolemy {
            outcome
                .failures
                .push(format!("not Ptolemy: relative defect {}", r.max_relative_defect));
        }
        doc.ptolemy = Some(r);
    }
    if wants(Check::Lemma22) {
        let bases: Vec<usize> = match args.base {
            Some(b) => {
                space.check_index(b)?;
                vec![b]
            }
            None => (0..space.n()).collect(),
        };
        let reports = bases
            .into_iter()
            .map(|b| metric::lemma22_defect(&space, b))
            .collect::<hypan_core::Result<Vec<_>>>()?;
        if args.expect_lemma22 {
            for r in reports.iter().filter(|r| r.max_defect > tol) {
                outcome
                    .failures
                    .push(format!("five-point inequality fails at base {}: {}", r.base, r.max_defect));
            }
        }
        doc.lemma22 = Some(reports);
    }
    if wants(Check::Delta) || wants(Check::Epsilon) {
        let r = hyperbolicity::analyze_with_root_tol(&space, mode, tol, root_tol)?;
        if !r.consistency_ok {
            outcome
                .failures
                .push("δ* exceeds ln 2 / ε*".to_string());
        }
        if let Some(min) = args.expect_epsilon_min {
            if !r.epsilon_star.admits(min) {
                outcome
                    .failures
                    .push(format!("ε* = {:?} is below {min}", r.epsilon_star));
            }
        }
        if let Some(max) = args.expect_delta_max {
            if r.delta_star > max {
                outcome.failures.push(format!("δ* = {} exceeds {max}", r.delta_star));
            }
        }
        doc.hyperbolicity = Some(HyperbolicityRecord::from(&r));
    }
    if let Some((r, eta)) = bolicity_params {
        doc.bolicity = Some(hyperbolicity::bolicity_r_min(&space, r, eta)?);
    }

    write_atomic(&args.report, &doc.to_json())?;
    outcome.report = Some(doc);
    Ok(outcome)
}

struct MoebiusKey<'a>(&'a MoebiusArgs);

impl fmt::Display for MoebiusKey<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = &self.0;
        write!(f, "moebius a=")?;
        for (i, v) in a.a.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v:?}")?;
        }
        write!(
            f,
            " q_seed={:?} pairs={} pair_seed={} tol={:?}",
            a.q_seed, a.pairs, a.pair_seed, a.tol
        )
    }
}

fn run_moebius(args: &MoebiusArgs) -> Result<Outcome, CliError> {
    let tol = positive("--tol", args.tol)?;
    if args.pairs == 0 {
        return Err(usage("--pairs must be positive"));
    }
    let q = args.q_seed.map_or(OrthogonalSource::Identity, OrthogonalSource::Seed);
    let map = moebius::make_moebius(&args.a, q)?;
    let pairs = moebius::sample_pairs(args.pairs, map.dim(), args.pair_seed);
    let r = moebius::distortion_check(&map, &pairs, tol)?;

    let mut outcome = Outcome::default();
    if !r.bounds_hold {
        outcome.failures.push(format!(
            "distortion bounds fail: lower {}, upper {}",
            r.max_lower_violation, r.max_upper_violation
        ));
    }
    let mut doc = ReportDocument::new(digest(MoebiusKey(args).to_string().as_bytes()));
    doc.distortion = Some(r);
    write_atomic(&args.report, &doc.to_json())?;
    outcome.report = Some(doc);
    Ok(outcome)
}
