use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sim2real_gauge::catalog::load_catalog;
use sim2real_gauge::manifest::{load_dataset, read_manifest, DatasetManifest, ManifestError};
use sim2real_gauge::report::{build_report, format_float};
use sim2real_gauge::run::{created_at, evaluate_manifest, write_outputs, Format};
use sim2real_gauge::suite::write_suite;
use sim2real_gauge_core::probe::{DEFAULT_BATCH_SIZE, DEFAULT_EPOCHS, DEFAULT_LEARNING_RATE, DEFAULT_SEED, DEFAULT_SPLIT_RATIO};
use sim2real_gauge_core::preprocess::{DEFAULT_EPSILON, DEFAULT_TARGET_DIM};
use sim2real_gauge_core::{evaluate_as, evaluate_dis, Catalog, DomainFilter, EncoderDataset, EvalConfig, PcaConfig, ProbeConfig};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "sim2real-gauge", version, about = "Score frozen vision encoders for Sim2Real transfer from their embeddings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score every encoder in a manifest and write reports.
    Evaluate(EvaluateArgs),
    /// Domain Invariance Score of one encoder.
    Dis(DisArgs),
    /// Action Score of one encoder.
    As(AsArgs),
    /// Write the synthetic 23-encoder suite.
    Synth(SynthArgs),
}

#[derive(Args)]
struct PcaArgs {
    /// Shared PCA dimension d* (clamped to the data).
    #[arg(long, default_value_t = DEFAULT_TARGET_DIM)]
    pca_dim: usize,
    /// Floor for the min-max denominator.
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
}

impl PcaArgs {
    fn config(&self) -> PcaConfig {
        PcaConfig {
            target_dim: self.pca_dim,
            epsilon: self.epsilon,
        }
    }
}

#[derive(Args)]
struct ProbeArgs {
    #[arg(long, default_value_t = DEFAULT_EPOCHS)]
    epochs: usize,
    #[arg(long, default_value_t = DEFAULT_BATCH_SIZE)]
    batch: usize,
    #[arg(long, default_value_t = DEFAULT_LEARNING_RATE)]
    lr: f64,
    /// Fraction of rows used to train the probe.
    #[arg(long, default_value_t = DEFAULT_SPLIT_RATIO)]
    split: f64,
    #[arg(long, env = "SIM2REAL_GAUGE_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Rows the probe sees: all, sim-only or real-only.
    #[arg(long, default_value = "all", value_parser = parse_filter)]
    domain_filter: DomainFilter,
}

impl ProbeArgs {
    fn config(&self) -> ProbeConfig {
        ProbeConfig {
            epochs: self.epochs,
            batch_size: self.batch,
            learning_rate: self.lr,
            split_ratio: self.split,
            seed: self.seed,
            domain_filter: self.domain_filter,
        }
    }
}

fn parse_filter(s: &str) -> Result<DomainFilter, String> {
    s.parse().map_err(|e: sim2real_gauge_core::Error| e.to_string())
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Svg,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
            FormatArg::Svg => Format::Svg,
        }
    }
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    output_dir: PathBuf,
    #[command(flatten)]
    pca: PcaArgs,
    #[command(flatten)]
    probe: ProbeArgs,
    /// Comma-separated subset of json, csv, svg.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "json,csv,svg")]
    formats: Vec<FormatArg>,
    /// Maximum number of encoders evaluated at once (default: all cores).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,
    /// JSON catalog whose entries extend or replace the built-in encoder table.
    #[arg(long)]
    catalog: Option<PathBuf>,
}

#[derive(Args)]
struct DisArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    encoder: String,
    #[command(flatten)]
    pca: PcaArgs,
    #[arg(long)]
    catalog: Option<PathBuf>,
}

#[derive(Args)]
struct AsArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    encoder: String,
    #[command(flatten)]
    probe: ProbeArgs,
    #[arg(long)]
    catalog: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    output_dir: PathBuf,
    #[arg(long, env = "SIM2REAL_GAUGE_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
}

/// Error carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl ToString) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.to_string(),
        }
    }

    fn run(message: impl ToString) -> Self {
        Self {
            code: EXIT_FAILURE,
            message: message.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Dis(args) => cmd_dis(args),
        Command::As(args) => cmd_as(args),
        Command::Synth(args) => cmd_synth(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn setup(manifest: &PathBuf, catalog: Option<&PathBuf>) -> Result<(DatasetManifest, Catalog), Failure> {
    let manifest = read_manifest(manifest).map_err(Failure::usage)?;
    let catalog = load_catalog(catalog.map(PathBuf::as_path)).map_err(Failure::usage)?;
    Ok((manifest, catalog))
}

fn load_one(manifest: &DatasetManifest, catalog: &Catalog, encoder: &str) -> Result<EncoderDataset, Failure> {
    let ds = load_dataset(manifest, encoder).map_err(|e| match e {
        ManifestError::UnknownEncoder(_) => Failure::usage(e),
        other => Failure::run(other),
    })?;
    catalog.check_dataset(&ds).map_err(Failure::run)?;
    Ok(ds)
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<u8, Failure> {
    let cfg = EvalConfig {
        pca: args.pca.config(),
        probe: args.probe.config(),
    };
    cfg.pca.validate().map_err(Failure::usage)?;
    cfg.probe.validate().map_err(Failure::usage)?;
    let (manifest, catalog) = setup(&args.manifest, args.catalog.as_ref())?;
    let jobs = args
        .jobs
        .map_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()), |j| j as usize);

    let (results, failures) = evaluate_manifest(&manifest, &catalog, &cfg, jobs).map_err(Failure::run)?;
    for f in &failures {
        eprintln!("error: {}: {}", f.encoder_id, f.error);
    }
    let failed = !failures.is_empty();
    let report = build_report(results, failures, &manifest, &catalog, created_at(&args.manifest)).map_err(Failure::run)?;
    for r in &report.results {
        for w in &r.warnings {
            eprintln!("warning: {w}");
        }
    }
    let formats: Vec<Format> = args.formats.into_iter().map(Format::from).collect();
    for path in write_outputs(&report, &args.output_dir, &formats).map_err(|e| Failure::run(format!("{e:#}")))? {
        println!("wrote {}", path.display());
    }
    Ok(if failed { EXIT_FAILURE } else { 0 })
}

/// Prints aligned `name value` lines. A closed stdout is not an error.
fn print_fields(fields: &[(&str, String)]) {
    let mut text = String::new();
    for (name, value) in fields {
        text.push_str(&format!("{name:<16} {value}\n"));
    }
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| format_float(*v)).collect::<Vec<_>>().join(" ")
}

fn cmd_dis(args: DisArgs) -> Result<u8, Failure> {
    let cfg = args.pca.config();
    cfg.validate().map_err(Failure::usage)?;
    let (manifest, catalog) = setup(&args.manifest, args.catalog.as_ref())?;
    let ds = load_one(&manifest, &catalog, &args.encoder)?;
    let (dis, effective) = evaluate_dis(&ds, &cfg).map_err(Failure::run)?;
    print_fields(&[
        ("encoder", args.encoder.clone()),
        ("dis", format_float(dis.dis)),
        ("raw_gap", format_float(dis.raw_gap)),
        ("pca_dim", format!("{} (requested {})", effective.target_dim, cfg.target_dim)),
        ("epsilon", format_float(effective.epsilon)),
        ("n_sim", dis.n_sim.to_string()),
        ("n_real", dis.n_real.to_string()),
        ("centroid_sim", join(&dis.centroid_sim)),
        ("centroid_real", join(&dis.centroid_real)),
    ]);
    Ok(0)
}

fn cmd_as(args: AsArgs) -> Result<u8, Failure> {
    let base = args.probe.config();
    base.validate().map_err(Failure::usage)?;
    let (manifest, catalog) = setup(&args.manifest, args.catalog.as_ref())?;
    let ds = load_one(&manifest, &catalog, &args.encoder)?;
    let cfg = base.for_encoder(&args.encoder);
    let result = evaluate_as(&ds, &cfg).map_err(Failure::run)?;
    print_fields(&[
        ("encoder", args.encoder.clone()),
        ("action_score", format_float(result.action_score)),
        ("val_mse", format_float(result.val_mse)),
        ("n_train", result.n_train.to_string()),
        ("n_val", result.n_val.to_string()),
        ("final_train_mse", result.train_mse_curve.last().map_or(String::new(), |v| format_float(*v))),
        ("epochs", cfg.epochs.to_string()),
        ("batch_size", cfg.batch_size.to_string()),
        ("learning_rate", format_float(cfg.learning_rate)),
        ("domain_filter", cfg.domain_filter.as_str().to_owned()),
        ("seed", cfg.seed.to_string()),
    ]);
    Ok(0)
}

fn cmd_synth(args: SynthArgs) -> Result<u8, Failure> {
    let path = write_suite(&args.output_dir, args.seed).map_err(Failure::run)?;
    println!("wrote {}", path.display());
    Ok(0)
}
