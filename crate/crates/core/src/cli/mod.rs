//! Command-line front end.
//!
//! Exit codes: 0 success or Pass, 1 Fail verdict, 2 usage or configuration
//! error, 3 I/O or data error.

pub mod report;
pub mod surface;

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::gamma::{self, GammaError, GammaParams, SampleSummary};
use crate::harness::{
    self, Experiment, ExperimentConfig, HarnessError, ReferenceSummary, Source, Verdict,
};
use crate::sources::{self, GeneratorKind, SourceError, StreamFormat, StreamOrigin, StreamSpec};
use crate::spacing::GapConvention;

use report::{DocumentError, ReferenceDocument, ReportDocument};
use surface::{SurfaceError, SurfaceKind, SurfaceSpec};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_DATA: u8 = 3;

/// Caps replicate parallelism when set.
pub const THREADS_ENV: &str = "GEOMRAND_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{context}: {source}")]
    Io { context: String, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) => EXIT_USAGE,
            Self::Data(_) | Self::Io { .. } => EXIT_DATA,
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::InvalidConfig(_)
            | HarnessError::ReferenceMismatch(_)
            | HarnessError::ThreadPool(_) => Self::Usage(e.to_string()),
            HarnessError::Source(s) => s.into(),
            other => Self::Data(other.to_string()),
        }
    }
}

impl From<SourceError> for CliError {
    fn from(e: SourceError) -> Self {
        match e {
            SourceError::Io(source) => Self::Io {
                context: "reading stream".to_string(),
                source,
            },
            SourceError::MalformedToken { .. } | SourceError::TrailingBytes(_) => {
                Self::Data(e.to_string())
            }
            other => Self::Usage(other.to_string()),
        }
    }
}

impl From<GammaError> for CliError {
    fn from(e: GammaError) -> Self {
        match e {
            GammaError::InvalidParams { .. } => Self::Usage(e.to_string()),
            other => Self::Data(other.to_string()),
        }
    }
}

impl From<SurfaceError> for CliError {
    fn from(e: SurfaceError) -> Self {
        match e {
            SurfaceError::InvalidGrid(_) => Self::Usage(e.to_string()),
            SurfaceError::Io(source) => Self::Io {
                context: "writing surface".to_string(),
                source,
            },
        }
    }
}

fn document_error(path: &Path, e: DocumentError) -> CliError {
    CliError::Data(format!("{}: {e}", path.display()))
}

#[derive(Debug, Parser)]
#[command(
    name = "geomrand",
    version,
    about = "Gamma-manifold spacing tests for pseudorandom generators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the spacing experiment on a built-in generator.
    Simulate(SimulateArgs),
    /// Run the spacing experiment on an external symbol stream.
    Test(TestArgs),
    /// Fit a gamma distribution to whitespace-separated positive numbers.
    Fit(FitArgs),
    /// Both distance functionals between two (mu, kappa) points.
    Distance(DistanceArgs),
    /// Emit a distance surface over a (mu, kappa) grid as CSV.
    Surface(SurfaceArgs),
    /// Calibrate the reference distribution with the gold generator.
    Calibrate(CalibrateArgs),
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// Symbols per replicate sequence.
    #[arg(long, default_value_t = 100_000)]
    length: usize,
    /// Alphabet size; the target abundance is 1/alphabet.
    #[arg(long, default_value_t = 512)]
    alphabet: u32,
    /// Symbol whose separations are measured.
    #[arg(long, default_value_t = 0)]
    target: u32,
    /// Master seed; replicate seeds are derived from it.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Gap convention: index-difference or exclusive-jittered.
    #[arg(long, default_value_t = GapConvention::IndexDifference)]
    convention: GapConvention,
    /// Reference mean (default: the alphabet size, i.e. 1/p).
    #[arg(long)]
    reference_mu: Option<f64>,
    /// Reference shape (default: 1).
    #[arg(long)]
    reference_kappa: Option<f64>,
}

impl ExperimentArgs {
    fn config(&self, replicates: usize, source: Source) -> Result<ExperimentConfig, CliError> {
        let reference = match (self.reference_mu, self.reference_kappa) {
            (None, None) => None,
            (mu, kappa) => Some(GammaParams::new(
                mu.unwrap_or(f64::from(self.alphabet)),
                kappa.unwrap_or(1.0),
            )?),
        };
        Ok(ExperimentConfig {
            sequence_length: self.length,
            alphabet_size: self.alphabet,
            target: self.target,
            replicates,
            master_seed: self.seed,
            convention: self.convention,
            reference,
            source,
            threads: threads_from_env()?,
        })
    }
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Reference summary from `calibrate`; without one the verdict is Inconclusive.
    #[arg(long)]
    reference_summary: Option<PathBuf>,
    /// Report destination (JSON); standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the per-replicate table as CSV.
    #[arg(long)]
    records_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    #[arg(long, default_value_t = 500)]
    replicates: usize,
    /// gold64, weak-lcg16 or full-lcg64.
    #[arg(long, default_value_t = GeneratorKind::Gold64)]
    generator: GeneratorKind,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct TestArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    /// Input stream path, or `-` for standard input.
    #[arg(long)]
    input: String,
    /// raw-bytes, le32 or ascii.
    #[arg(long)]
    format: StreamFormat,
    /// Number of consecutive segments to test (default: every complete segment).
    #[arg(long)]
    replicates: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct FitArgs {
    /// Data file, or `-` for standard input.
    #[arg(default_value = "-")]
    input: String,
}

#[derive(Debug, Args)]
struct DistanceArgs {
    #[arg(long, num_args = 2, value_names = ["MU", "KAPPA"], required = true)]
    from: Vec<f64>,
    #[arg(long, num_args = 2, value_names = ["MU", "KAPPA"], required = true)]
    to: Vec<f64>,
}

#[derive(Debug, Args)]
struct SurfaceArgs {
    #[arg(long, default_value_t = 511.0)]
    reference_mu: f64,
    #[arg(long, default_value_t = 1.0)]
    reference_kappa: f64,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], default_values_t = [350.0, 700.0])]
    mu_range: Vec<f64>,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], default_values_t = [0.5, 2.0])]
    kappa_range: Vec<f64>,
    #[arg(long, default_value_t = 71)]
    grid_mu: usize,
    #[arg(long, default_value_t = 61)]
    grid_kappa: usize,
    /// eq5 or arclength.
    #[arg(long, default_value_t = SurfaceKind::Eq5)]
    which: SurfaceKind,
    /// Report whose fitted points are appended as scatter rows.
    #[arg(long)]
    report: Option<PathBuf>,
    /// CSV destination; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CalibrateArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    /// Summary destination (JSON); standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn main<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("geomrand: {e}");
            e.exit_code()
        }
    }
}

fn run(command: Command) -> Result<u8, CliError> {
    match command {
        Command::Simulate(args) => simulate(args),
        Command::Test(args) => test_stream(args),
        Command::Fit(args) => fit(args),
        Command::Distance(args) => distance(args),
        Command::Surface(args) => emit_surface(args),
        Command::Calibrate(args) => calibrate(args),
    }
}

fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!(
                "{THREADS_ENV} must be a positive integer, got `{v}`"
            ))),
        },
    }
}

fn read_input(origin: &str) -> Result<String, CliError> {
    let mut text = String::new();
    let result = if origin == "-" {
        io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        File::open(origin)
            .and_then(|mut f| f.read_to_string(&mut text))
            .map(|_| ())
    };
    result.map_err(|source| CliError::Io {
        context: format!("reading {origin}"),
        source,
    })?;
    Ok(text)
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        context: format!("reading {}", path.display()),
        source,
    })
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        None => Box::new(io::stdout().lock()),
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|source| {
            CliError::Io {
                context: format!("creating {}", p.display()),
                source,
            }
        })?)),
    })
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    let mut out = open_output(path)?;
    writeln!(out, "{text}")
        .and_then(|_| out.flush())
        .map_err(|source| CliError::Io {
            context: "writing output".to_string(),
            source,
        })
}

fn load_reference(path: Option<&Path>) -> Result<Option<ReferenceSummary>, CliError> {
    path.map(|p| {
        ReferenceDocument::from_json(&read_file(p)?)
            .map(|doc| doc.summary)
            .map_err(|e| document_error(p, e))
    })
    .transpose()
}

fn finish_experiment(experiment: &Experiment, output: &OutputArgs) -> Result<u8, CliError> {
    let reference = load_reference(output.reference_summary.as_deref())?;
    let report = experiment.run(reference.as_ref())?;
    if let Some(path) = &output.records_csv {
        let out = open_output(Some(path))?;
        report::write_records_csv(out, &report.records).map_err(|source| CliError::Io {
            context: format!("writing {}", path.display()),
            source,
        })?;
    }
    let agg = &report.aggregates;
    eprintln!(
        "verdict: {:?} ({} fitted, {} skipped; kappa_hat in [{:.4}, {:.4}], mean {:.4}; mu_hat in [{:.2}, {:.2}])",
        report.verdict, agg.fitted, agg.skipped, agg.kappa_hat.min, agg.kappa_hat.max, agg.kappa_hat.mean,
        agg.mu_hat.min, agg.mu_hat.max
    );
    let verdict = report.verdict;
    let doc = ReportDocument::new(report, report::timestamp());
    write_text(output.out.as_deref(), &doc.to_json())?;
    Ok(if verdict == Verdict::Fail {
        EXIT_FAIL
    } else {
        EXIT_OK
    })
}

fn simulate(args: SimulateArgs) -> Result<u8, CliError> {
    let source = Source::Builtin {
        generator: args.generator,
    };
    let config = args.experiment.config(args.replicates, source)?;
    let experiment = Experiment::new(config)?;
    finish_experiment(&experiment, &args.output)
}

fn test_stream(args: TestArgs) -> Result<u8, CliError> {
    let spec = StreamSpec {
        origin: StreamOrigin::from(args.input.clone()),
        format: args.format,
        alphabet_size: args.experiment.alphabet,
    };
    let symbols = sources::open_stream(&spec)?;
    let segments = symbols.len() / args.experiment.length.max(1);
    let replicates = args.replicates.unwrap_or(segments.max(1));
    let config = args
        .experiment
        .config(replicates, Source::External { stream: spec })?;
    let experiment = Experiment::with_symbols(config, symbols)?;
    finish_experiment(&experiment, &args.output)
}

fn fit(args: FitArgs) -> Result<u8, CliError> {
    let text = read_input(&args.input)?;
    let values = text
        .split_ascii_whitespace()
        .enumerate()
        .map(|(i, tok)| {
            tok.parse::<f64>()
                .map_err(|e| CliError::Data(format!("token {i} `{tok}`: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let summary = SampleSummary::from_values(&values)?;
    let result = gamma::fit_mle(&summary)?;
    let lines = [
        format!("n={}", summary.n),
        format!("mean={:?}", summary.mean),
        format!("mean_log={:?}", summary.mean_log),
        format!("s_stat={:?}", summary.s_stat),
        format!("mu_hat={:?}", result.params.mu()),
        format!("kappa_hat={:?}", result.params.kappa()),
        format!("iterations={}", result.iterations),
        format!("residual={:?}", result.residual),
    ];
    write_text(None, &lines.join("\n"))?;
    Ok(EXIT_OK)
}

fn point(values: &[f64]) -> Result<GammaParams, CliError> {
    Ok(GammaParams::new(values[0], values[1])?)
}

fn distance(args: DistanceArgs) -> Result<u8, CliError> {
    let from = point(&args.from)?;
    let to = point(&args.to)?;
    let text = format!(
        "eq5={:?}\narclength={:?}",
        gamma::distance_bound(&from, &to),
        gamma::arc_length_distance(&from, &to)
    );
    write_text(None, &text)?;
    Ok(EXIT_OK)
}

fn emit_surface(args: SurfaceArgs) -> Result<u8, CliError> {
    let spec = SurfaceSpec {
        reference: GammaParams::new(args.reference_mu, args.reference_kappa)?,
        mu_range: (args.mu_range[0], args.mu_range[1]),
        kappa_range: (args.kappa_range[0], args.kappa_range[1]),
        grid_mu: args.grid_mu,
        grid_kappa: args.grid_kappa,
        which: args.which,
    };
    let scatter = match &args.report {
        None => Vec::new(),
        Some(path) => {
            let doc = ReportDocument::from_json(&read_file(path)?)
                .map_err(|e| document_error(path, e))?;
            doc.records
                .iter()
                .map(|r| GammaParams::new(r.mu_hat, r.kappa_hat))
                .collect::<Result<Vec<_>, _>>()?
        }
    };
    let out = open_output(args.out.as_deref())?;
    surface::emit_surface(out, &spec, &scatter)?;
    Ok(EXIT_OK)
}

fn calibrate(args: CalibrateArgs) -> Result<u8, CliError> {
    let source = Source::Builtin {
        generator: GeneratorKind::Gold64,
    };
    let config = args.experiment.config(args.trials, source)?;
    let summary = harness::reference_distribution(&config, args.trials)?;
    eprintln!(
        "calibrated {} trials ({} fitted): distance_eq5 99% quantile {:.6}, kappa_hat 99.9% envelope {:?}",
        summary.trials,
        summary.fitted,
        summary.distance_quantile(0.99).unwrap_or(f64::NAN),
        summary.kappa_envelope()
    );
    let doc = ReferenceDocument::new(summary, report::timestamp());
    write_text(args.out.as_deref(), &doc.to_json())?;
    Ok(EXIT_OK)
}
