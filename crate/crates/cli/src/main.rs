//! `bandtsp`: estimate, bound and certify band-traversal tour constants.
//!
//! Exit codes: 0 success, 1 runtime or certification failure, 2 usage error.

mod manifest;

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use bandtsp::certifier::{self, CertParams, BASE_BOUND, TARGET_BOUND};
use bandtsp::concentration::{deviation_radius, interval_around, ConcentrationResult};
use bandtsp::estimator::{
    estimate_with, sweep_with, EstimateConfig, EstimateResult, Improvement, Method,
};
use bandtsp::exec::{with_threads, Execution};
use bandtsp::tour::{self, PointSet};
use bandtsp::verify::{self, VerifyReport};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use manifest::{RunManifest, WithManifest};

#[derive(Parser, Debug)]
#[command(
    name = "bandtsp",
    version,
    about = "Band-traversal bounds for the Euclidean TSP constant"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monte Carlo estimate of a band-heuristic constant
    Estimate(EstimateArgs),
    /// Tuple and crossover estimates over a grid of (k, h2), with paired improvements
    Sweep(SweepArgs),
    /// Closed-form deviation radius for an estimate
    Concentration(ConcentrationArgs),
    /// Certified upper bound from the crossover improvement
    Certify(CertifyArgs),
    /// Build a band tour on concrete points
    Tour(TourArgs),
    /// Run the numerical property suite
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone, Copy, Serialize)]
struct Threads {
    /// Cap on worker threads
    #[arg(long, env = "BANDTSP_THREADS")]
    threads: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum MethodArg {
    Tuple,
    Crossover,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Tuple => Method::Tuple,
            MethodArg::Crossover => Method::Crossover,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Serialize)]
struct EstimateArgs {
    #[arg(long, value_enum, default_value = "tuple")]
    method: MethodArg,
    #[arg(long)]
    k: usize,
    /// Band height squared; defaults to 3.75 (tuple) or 4.0 (crossover)
    #[arg(long)]
    h2: Option<f64>,
    /// Replicate count, scientific notation accepted
    #[arg(long, default_value = "1e6", value_parser = parse_count)]
    replicates: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 64)]
    chunks: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[command(flatten)]
    threads: Threads,
}

#[derive(Args, Debug, Serialize)]
struct SweepArgs {
    #[arg(long, value_delimiter = ',', default_value = "4")]
    k: Vec<usize>,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "3.0,3.25,3.5,3.75,4.0,4.25,4.5"
    )]
    h2: Vec<f64>,
    #[arg(long, default_value = "1e6", value_parser = parse_count)]
    replicates: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 64)]
    chunks: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    threads: Threads,
}

#[derive(Args, Debug, Serialize)]
struct ConcentrationArgs {
    #[arg(long)]
    k: usize,
    #[arg(long, value_parser = parse_count)]
    m: u64,
    #[arg(long)]
    h2: f64,
    #[arg(long)]
    delta: f64,
    /// Point estimate to centre the interval on
    #[arg(long)]
    mean: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct CertifyArgs {
    #[arg(long, default_value = "1e6", value_parser = parse_count)]
    grid_n: u64,
    #[arg(long, default_value_t = certifier::certificate::DEFAULT_H2)]
    h2: f64,
    #[arg(long, default_value_t = BASE_BOUND)]
    base_bound: f64,
    /// Certificate JSON
    #[arg(long)]
    out: Option<PathBuf>,
    /// Human-readable certificate (printed to stdout when omitted)
    #[arg(long)]
    text: Option<PathBuf>,
    #[command(flatten)]
    threads: Threads,
}

#[derive(Args, Debug, Serialize)]
struct TourArgs {
    /// Number of uniform points to generate (ignored with --points)
    #[arg(long, required_unless_present = "points", value_parser = parse_count)]
    n: Option<u64>,
    #[arg(long, default_value_t = 4.0)]
    h2: f64,
    #[arg(long, default_value_t = 4)]
    k: usize,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    crossover: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Input points: CSV `x,y` lines, or little-endian f64 pairs for `.bin`
    #[arg(long)]
    points: Option<PathBuf>,
    /// Tour file, one index per line
    #[arg(long)]
    out: Option<PathBuf>,
    /// Summary JSON (stdout when omitted)
    #[arg(long)]
    summary: Option<PathBuf>,
    #[command(flatten)]
    threads: Threads,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    #[arg(long, default_value = "1e6", value_parser = parse_count)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Report JSON
    #[arg(long)]
    out: Option<PathBuf>,
    /// Deliberately break a closed form to exercise the suite
    #[arg(long, value_enum, hide = true)]
    mutate: Option<Mutation>,
    #[command(flatten)]
    threads: Threads,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Mutation {
    FlipF,
}

fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a count"))?;
    if !(v.is_finite() && v >= 0.0 && v.fract() == 0.0 && v <= 2f64.powi(53)) {
        return Err(format!("{s:?} is not a nonnegative integer"));
    }
    Ok(v as u64)
}

enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
    /// The run completed but its result fails the requested criterion.
    Rejected,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<bandtsp::Error>() {
            Some(
                bandtsp::Error::InvalidArgument(_)
                | bandtsp::Error::IndexOutOfRange { .. }
                | bandtsp::Error::TooLarge { .. },
            ) => Failure::Usage(format!("{e:#}")),
            _ => Failure::Runtime(e),
        }
    }
}

impl From<bandtsp::Error> for Failure {
    fn from(e: bandtsp::Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Estimate(a) => cmd_estimate(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Concentration(a) => cmd_concentration(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Tour(a) => cmd_tour(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Rejected) => ExitCode::from(1),
    }
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

/// Pretty JSON to `path`, or stdout.
fn emit_json(value: &impl Serialize, path: Option<&Path>) -> anyhow::Result<()> {
    let mut w: Box<dyn Write> = match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(io::stdout().lock()),
    };
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn exec_for(threads: Threads) -> Execution {
    if threads.threads == Some(1) {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

#[derive(Serialize)]
struct CsvRow {
    method: Method,
    k: usize,
    h2: f64,
    #[serde(rename = "M")]
    replicates: u64,
    seed: u64,
    chunks: u64,
    mean: f64,
    std_err: f64,
    wall_seconds: f64,
}

impl From<&EstimateResult> for CsvRow {
    fn from(r: &EstimateResult) -> Self {
        Self {
            method: r.config.method,
            k: r.config.k,
            h2: r.config.h2,
            replicates: r.config.replicates,
            seed: r.config.seed,
            chunks: r.config.chunks,
            mean: r.mean,
            std_err: r.std_err,
            wall_seconds: r.wall_seconds,
        }
    }
}

fn cmd_estimate(a: EstimateArgs) -> CmdResult {
    let method = Method::from(a.method);
    let h2 = a.h2.unwrap_or(match method {
        Method::Tuple => 3.75,
        Method::Crossover => 4.0,
    });
    let config = EstimateConfig::new(method, a.k, h2, a.replicates, a.seed, a.chunks);
    config.validate()?;
    let manifest = RunManifest::new("estimate", &a, Some(a.seed), a.out.as_deref());
    let result = with_threads(a.threads.threads, || {
        estimate_with(&config, exec_for(a.threads))
    })?;
    match a.format {
        Format::Json => emit_json(
            &WithManifest {
                result: &result,
                manifest: &manifest,
            },
            a.out.as_deref(),
        )?,
        Format::Csv => {
            let mut w: Box<dyn Write> = match a.out.as_deref() {
                Some(p) => Box::new(create(p)?),
                None => Box::new(io::stdout().lock()),
            };
            writeln!(
                w,
                "# manifest: {}",
                serde_json::to_string(&manifest).map_err(anyhow::Error::from)?
            )?;
            let mut csv = csv::Writer::from_writer(w);
            csv.serialize(CsvRow::from(&result))
                .map_err(anyhow::Error::from)?;
            csv.flush()?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct SweepOutput {
    results: Vec<EstimateResult>,
    improvements: Vec<Improvement>,
}

fn cmd_sweep(a: SweepArgs) -> CmdResult {
    let mut configs = Vec::new();
    for &k in &a.k {
        for &h2 in &a.h2 {
            for method in [Method::Tuple, Method::Crossover] {
                let c = EstimateConfig::new(method, k, h2, a.replicates, a.seed, a.chunks);
                c.validate()?;
                configs.push(c);
            }
        }
    }
    let manifest = RunManifest::new("sweep", &a, Some(a.seed), a.out.as_deref());
    let report = with_threads(a.threads.threads, || {
        sweep_with(&configs, exec_for(a.threads))
    })?;
    let results = report
        .results
        .into_iter()
        .collect::<bandtsp::Result<Vec<_>>>()?;
    for imp in &report.improvements {
        eprintln!(
            "k={} h2={:<5} tuple {:.6} crossover {:.6} improvement {:.6}",
            imp.k, imp.h2, imp.tuple_mean, imp.crossover_mean, imp.delta
        );
    }
    let out = SweepOutput {
        results,
        improvements: report.improvements,
    };
    emit_json(
        &WithManifest {
            result: &out,
            manifest: &manifest,
        },
        a.out.as_deref(),
    )?;
    Ok(())
}

#[derive(Serialize)]
struct ConcentrationOutput {
    #[serde(flatten)]
    radius: ConcentrationResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hi: Option<f64>,
}

fn cmd_concentration(a: ConcentrationArgs) -> CmdResult {
    let radius = deviation_radius(a.k, a.m, a.h2, a.delta)?;
    let bounds = a.mean.map(|m| interval_around(m, radius.epsilon));
    let out = ConcentrationOutput {
        radius,
        mean: a.mean,
        lo: bounds.map(|b| b.0),
        hi: bounds.map(|b| b.1),
    };
    let manifest = RunManifest::new("concentration", &a, None, a.out.as_deref());
    emit_json(
        &WithManifest {
            result: &out,
            manifest: &manifest,
        },
        a.out.as_deref(),
    )?;
    Ok(())
}

fn cmd_certify(a: CertifyArgs) -> CmdResult {
    let params = CertParams {
        h2: a.h2,
        base_bound: a.base_bound,
        grid_n: usize::try_from(a.grid_n).map_err(|_| Failure::Usage("grid-n too large".into()))?,
        ..CertParams::default()
    };
    params.validate()?;
    let manifest = RunManifest::new("certify", &a, None, a.out.as_deref());
    let cert = with_threads(a.threads.threads, || {
        certifier::eta_lower_bound_with(&params, exec_for(a.threads))
    })?;
    let text = cert.render_text();
    match a.text.as_deref() {
        Some(p) => {
            let mut w = create(p)?;
            w.write_all(text.as_bytes())?;
            w.flush()?;
        }
        None => print!("{text}"),
    }
    if let Some(p) = a.out.as_deref() {
        emit_json(
            &WithManifest {
                result: &cert,
                manifest: &manifest,
            },
            Some(p),
        )?;
    }
    if cert.certifies(TARGET_BOUND) {
        Ok(())
    } else {
        eprintln!(
            "not certified: final bound {:.7} exceeds target {TARGET_BOUND}",
            cert.final_bound
        );
        Err(Failure::Rejected)
    }
}

#[derive(Serialize)]
struct TourSummary {
    n: usize,
    h2: f64,
    k: usize,
    use_crossover: bool,
    length: f64,
    length_over_sqrt_n: f64,
    seconds: f64,
    bands: usize,
    crossovers: usize,
}

fn load_points(path: &Path) -> Result<PointSet, Failure> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let ps = if path.extension().is_some_and(|e| e == "bin") {
        tour::read_points_binary(BufReader::new(f))
    } else {
        tour::read_points_csv(BufReader::new(f))
    };
    ps.map_err(|e| match e {
        bandtsp::Error::InvalidArgument(m) => Failure::Usage(format!("{}: {m}", path.display())),
        other => Failure::Runtime(anyhow::Error::from(other).context(path.display().to_string())),
    })
}

fn cmd_tour(a: TourArgs) -> CmdResult {
    let ps = match (&a.points, a.n) {
        (Some(p), _) => load_points(p)?,
        (None, Some(n)) => tour::generate_points(usize::try_from(n).unwrap_or(usize::MAX), a.seed)?,
        (None, None) => return Err(Failure::Usage("either --n or --points is required".into())),
    };
    let manifest = RunManifest::new("tour", &a, Some(a.seed), a.summary.as_deref());
    let start = Instant::now();
    let report = with_threads(a.threads.threads, || {
        tour::build_band_tour_report(&ps, a.h2, a.k, a.crossover, exec_for(a.threads))
    })?;
    let seconds = start.elapsed().as_secs_f64();
    tour::validate(&report.tour.order, ps.n()).map_err(|e| {
        Failure::Runtime(anyhow::Error::from(e).context("constructed tour is invalid"))
    })?;
    if let Some(p) = a.out.as_deref() {
        let mut w = create(p)?;
        tour::write_tour(&report.tour, &mut w)?;
        w.flush()?;
    }
    let n = ps.n();
    let summary = TourSummary {
        n,
        h2: a.h2,
        k: a.k,
        use_crossover: a.crossover,
        length: report.tour.length,
        length_over_sqrt_n: report.tour.length / (n as f64).sqrt(),
        seconds,
        bands: report.bands,
        crossovers: report.crossovers,
    };
    emit_json(
        &WithManifest {
            result: &summary,
            manifest: &manifest,
        },
        a.summary.as_deref(),
    )?;
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> CmdResult {
    let mut opts = verify::VerifyOptions::new(a.samples, a.seed);
    opts.exec = exec_for(a.threads);
    if a.mutate == Some(Mutation::FlipF) {
        opts.special.f = |x| -bandtsp::certifier::f_of(x).unwrap_or(f64::NAN);
    }
    let report: VerifyReport = with_threads(a.threads.threads, || verify::run_with(&opts))?;
    print!("{report}");
    if a.samples < verify::STATISTICAL_MIN_SAMPLES {
        eprintln!(
            "warning: statistical checks are inconclusive below {} samples",
            verify::STATISTICAL_MIN_SAMPLES
        );
    }
    if let Some(p) = a.out.as_deref() {
        let manifest = RunManifest::new("verify", &a, Some(a.seed), Some(p));
        emit_json(
            &WithManifest {
                result: &report,
                manifest: &manifest,
            },
            Some(p),
        )?;
    }
    if report.passed() {
        Ok(())
    } else {
        let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        eprintln!("failed oracles: {}", failed.join(", "));
        Err(Failure::Rejected)
    }
}
