use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use posentropy::error::{Error, Result};
use posentropy::ingest::InputFormat;
use posentropy::positional::Estimator;
use posentropy::report::{load_config, run_profile, Emit, RunConfig};
use posentropy::stattests::MedialMode;
use posentropy::synthgen::{
    generate_positional_corpus, staircase_specs, write_lines, PositionSpec,
};

#[derive(Parser)]
#[command(
    name = "posentropy",
    version,
    about = "Per-position word statistics for sentence corpora"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Profile corpus files and write tables, a summary and charts.
    Profile(ProfileArgs),
    /// Generate a synthetic corpus with known per-position distributions.
    Synth(SynthArgs),
}

#[derive(Args)]
struct ProfileArgs {
    /// Corpus files, read in the given order.
    #[arg(long = "input", num_args = 1.., required_unless_present = "config")]
    inputs: Vec<PathBuf>,
    /// Start from a config JSON (bare, or a previous summary.json).
    #[arg(long)]
    config: Option<PathBuf>,
    /// `lines` (one sentence per line) or `plain` (free text).
    #[arg(long)]
    format: Option<InputFormat>,
    #[arg(long)]
    min_len: Option<usize>,
    #[arg(long)]
    max_len: Option<usize>,
    #[arg(long)]
    high_cutoff: Option<usize>,
    #[arg(long)]
    low_cutoff: Option<usize>,
    #[arg(long, overrides_with = "no_lowercase")]
    lowercase: bool,
    #[arg(long)]
    no_lowercase: bool,
    /// Drop repeated sentences within each length.
    #[arg(long)]
    dedup: bool,
    /// `mle` or `miller-madow`.
    #[arg(long)]
    estimator: Option<Estimator>,
    /// `paper`, `strict` or `custom:LO:HI`.
    #[arg(long)]
    medial: Option<MedialMode>,
    /// Comma-separated subset of csv,json,svg.
    #[arg(long, value_delimiter = ',')]
    emit: Option<Vec<Emit>>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    workers: Option<usize>,
    /// Minimum sentences for a length to be profiled.
    #[arg(long)]
    min_bin: Option<usize>,
    /// Lengths to chart; all profiled lengths by default.
    #[arg(long, value_delimiter = ',')]
    svg_lengths: Option<Vec<usize>>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    length: usize,
    #[arg(long)]
    sentences: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `staircase` or `uniform:K`.
    #[arg(long, conflicts_with = "spec")]
    shape: Option<String>,
    /// JSON array of `{"position": p, "distribution": [[word, prob], ...]}`.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn profile_config(args: ProfileArgs) -> Result<RunConfig> {
    let mut config = match &args.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    if !args.inputs.is_empty() {
        config.inputs = args.inputs;
    }
    macro_rules! apply {
        ($($field:ident <- $arg:expr),* $(,)?) => {
            $(if let Some(v) = $arg { config.$field = v; })*
        };
    }
    apply!(
        format <- args.format,
        min_len <- args.min_len,
        max_len <- args.max_len,
        high_cutoff <- args.high_cutoff,
        low_cutoff <- args.low_cutoff,
        estimator <- args.estimator,
        medial <- args.medial,
        emit <- args.emit,
        workers <- args.workers,
        min_sentences_per_bin <- args.min_bin,
        svg_lengths <- args.svg_lengths,
    );
    if args.lowercase {
        config.lowercase = true;
    }
    if args.no_lowercase {
        config.lowercase = false;
    }
    if args.dedup {
        config.dedup = true;
    }
    config.out_dir = args.out;
    Ok(config)
}

#[derive(serde::Deserialize)]
struct SpecEntry {
    position: usize,
    distribution: Vec<(String, f64)>,
}

fn synth_specs(args: &SynthArgs) -> Result<Vec<PositionSpec>> {
    if let Some(path) = &args.spec {
        let file = File::open(path).map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        })?;
        let entries: Vec<SpecEntry> = serde_json::from_reader(io::BufReader::new(file))?;
        return Ok(entries
            .into_iter()
            .map(|e| PositionSpec::new(e.position, e.distribution))
            .collect());
    }
    match args.shape.as_deref().unwrap_or("staircase") {
        "staircase" => Ok(staircase_specs(args.length)),
        shape => {
            let k: usize = shape
                .strip_prefix("uniform:")
                .and_then(|k| k.parse().ok())
                .filter(|&k| k > 0)
                .ok_or_else(|| Error::Config(format!("unknown shape `{shape}`")))?;
            let words: Vec<String> = (0..k).map(|i| format!("w{i}")).collect();
            Ok((1..=args.length)
                .map(|p| PositionSpec::uniform(p, &words))
                .collect())
        }
    }
}

fn synth(args: SynthArgs) -> Result<()> {
    let specs = synth_specs(&args)?;
    let bin = generate_positional_corpus(args.length, &specs, args.sentences, args.seed)?;
    match &args.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })?;
            write_lines(&bin, BufWriter::new(file)).map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })
        }
        None => write_lines(&bin, BufWriter::new(io::stdout().lock())).map_err(|e| Error::Io {
            path: PathBuf::from("<stdout>"),
            source: e,
        }),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Profile(args) => {
            let config = profile_config(args)?;
            let report = run_profile(&config)?;
            eprintln!(
                "profiled {} lengths; wrote {} files to {}",
                report.bins.len(),
                report.written.len(),
                config.out_dir.display()
            );
            Ok(())
        }
        Command::Synth(args) => synth(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
