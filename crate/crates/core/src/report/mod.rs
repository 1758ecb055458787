//! End-to-end profiling runs: corpus files in, tables, summary and charts out.

mod emit;
pub mod format;
pub mod svg;

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{
    bin_by_length, ingest_text, BinningStats, InputFormat, LengthBin, TokenizeConfig,
};
use crate::lexicon::{
    build_lexicon, classify_frequency, frequency_spectrum, FrequencyClassMap, FrequencySpectrum,
    Lexicon,
};
use crate::numfit::{fit_power_law_offset, PowerLawFit};
use crate::positional::{per_word_trends, profile_bin, trend_tally, Estimator, PositionProfile};
use crate::stattests::{
    medial_window, proportion_half_test, regression_f_test, MedialMode, MedialTestResult,
    ProportionTestResult,
};

pub use emit::{emit_csv, emit_summary_json, emit_svg, MEDIAL_TESTS_HEADER, PROFILES_HEADER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Emit {
    Csv,
    Json,
    Svg,
}

impl FromStr for Emit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Emit::Csv),
            "json" => Ok(Emit::Json),
            "svg" => Ok(Emit::Svg),
            other => Err(Error::Config(format!("unknown output kind `{other}`"))),
        }
    }
}

/// Everything that determines a run's outputs. The output directory and the
/// worker count do not affect output bytes and are left out of the echo.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub format: InputFormat,
    pub lowercase: bool,
    pub dedup: bool,
    pub min_len: usize,
    pub max_len: usize,
    pub high_cutoff: usize,
    pub low_cutoff: usize,
    pub estimator: Estimator,
    pub medial: MedialMode,
    pub emit: Vec<Emit>,
    pub min_sentences_per_bin: usize,
    /// Lengths to chart; empty means every qualifying length.
    pub svg_lengths: Vec<usize>,
    #[serde(skip)]
    pub out_dir: PathBuf,
    #[serde(skip, default = "default_workers")]
    pub workers: usize,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, usize::from)
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            inputs: Vec::new(),
            format: InputFormat::Lines,
            lowercase: true,
            dedup: false,
            min_len: 3,
            max_len: 50,
            high_cutoff: 100,
            low_cutoff: 100,
            estimator: Estimator::Mle,
            medial: MedialMode::PaperConsistent,
            emit: vec![Emit::Csv, Emit::Json, Emit::Svg],
            min_sentences_per_bin: 100,
            svg_lengths: Vec::new(),
            out_dir: PathBuf::from("out"),
            workers: default_workers(),
        }
    }
}

impl RunConfig {
    fn emits(&self, kind: Emit) -> bool {
        self.emit.contains(&kind)
    }

    fn validate(&self) -> Result<()> {
        if self.inputs.is_empty() {
            return Err(Error::Config("no input files given".into()));
        }
        if self.min_len < 1 || self.min_len > self.max_len {
            return Err(Error::Config(format!(
                "invalid length range {}..{}",
                self.min_len, self.max_len
            )));
        }
        if self.workers == 0 {
            return Err(Error::Config("worker count must be at least 1".into()));
        }
        for path in &self.inputs {
            fs::File::open(path).map_err(|e| Error::io(path, e))?;
        }
        Ok(())
    }
}

/// Statistics tested over the medial window, in output order.
pub const MEDIAL_STATISTICS: [&str; 8] = [
    "entropy_bits",
    "types",
    "mean_word_len",
    "mean_word_freq",
    "prop_high",
    "prop_medium",
    "prop_low",
    "plaw_exponent",
];

fn statistic_value(profile: &PositionProfile, name: &str) -> Option<f64> {
    Some(match name {
        "entropy_bits" => profile.entropy_bits,
        "types" => profile.type_count as f64,
        "mean_word_len" => profile.mean_word_len,
        "mean_word_freq" => profile.mean_word_freq,
        "prop_high" => profile.prop_high,
        "prop_medium" => profile.prop_medium,
        "prop_low" => profile.prop_low,
        "plaw_exponent" => return profile.plaw_exponent,
        _ => return None,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SkippedTest {
    pub statistic: String,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrendReport {
    pub classified_words: usize,
    pub flat_words: usize,
    pub test: Option<ProportionTestResult>,
}

#[derive(Debug, Clone)]
pub struct BinReport {
    pub length: usize,
    pub sentences: usize,
    pub profiles: Vec<PositionProfile>,
    /// `None` when the medial window does not fit this length.
    pub window: Option<Vec<usize>>,
    pub medial_tests: Vec<MedialTestResult>,
    pub skipped_tests: Vec<SkippedTest>,
    pub trend: Option<TrendReport>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub config: RunConfig,
    pub binning: BinningStats,
    pub analyzed_sentences: usize,
    pub lexicon: Lexicon,
    pub classes: FrequencyClassMap,
    pub spectrum: FrequencySpectrum,
    pub spectrum_fit: std::result::Result<PowerLawFit, String>,
    pub bins: Vec<BinReport>,
    /// Lengths below the sentence threshold, with their sentence counts.
    pub skipped_bins: Vec<(usize, usize)>,
    pub pooled_trend: Option<ProportionTestResult>,
    pub written: Vec<PathBuf>,
}

fn analyze_bin(
    bin: &LengthBin,
    lex: &Lexicon,
    classes: &FrequencyClassMap,
    config: &RunConfig,
) -> Result<BinReport> {
    let profiles = profile_bin(bin, lex, classes, config.estimator)?;
    let mut report = BinReport {
        length: bin.length(),
        sentences: bin.len(),
        profiles,
        window: None,
        medial_tests: Vec::new(),
        skipped_tests: Vec::new(),
        trend: None,
    };
    let Ok(window) = medial_window(bin.length(), config.medial) else {
        return Ok(report);
    };
    let xs: Vec<f64> = window.iter().map(|&p| p as f64).collect();
    for name in MEDIAL_STATISTICS {
        let ys: Option<Vec<f64>> = window
            .iter()
            .map(|&p| statistic_value(&report.profiles[p - 1], name))
            .collect();
        let outcome = match ys {
            Some(ys) => regression_f_test(name, &xs, &ys).map_err(|e| e.to_string()),
            None => Err("statistic unavailable at some window position".to_owned()),
        };
        match outcome {
            Ok(test) => report.medial_tests.push(test),
            Err(reason) => report.skipped_tests.push(SkippedTest {
                statistic: name.to_owned(),
                reason,
            }),
        }
    }
    let trends = per_word_trends(bin, &window)?;
    let (k_inc, k_dec) = trend_tally(&trends);
    report.trend = Some(TrendReport {
        classified_words: (k_inc + k_dec) as usize,
        flat_words: trends.len() - (k_inc + k_dec) as usize,
        test: proportion_half_test(k_inc, k_dec).ok(),
    });
    report.window = Some(window);
    Ok(report)
}

fn prepare_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let probe = dir.join(".posentropy-write-probe");
    fs::write(&probe, b"").map_err(|e| Error::io(dir, e))?;
    fs::remove_file(&probe).map_err(|e| Error::io(&probe, e))?;
    Ok(())
}

/// Runs the whole pipeline and writes the requested outputs.
pub fn run_profile(config: &RunConfig) -> Result<RunReport> {
    config.validate()?;
    prepare_out_dir(&config.out_dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let mut report = pool.install(|| compute(config))?;
    report.written = write_outputs(&report)?;
    Ok(report)
}

fn compute(config: &RunConfig) -> Result<RunReport> {
    let tokenize = TokenizeConfig {
        lowercase: config.lowercase,
    };
    let shards: Vec<_> = config
        .inputs
        .par_iter()
        .map(|path| {
            let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
            ingest_text(&bytes, config.format, tokenize).map_err(|e| match e {
                Error::Encoding { offset } => Error::Config(format!(
                    "{}: invalid UTF-8 at byte offset {offset}",
                    path.display()
                )),
                other => other,
            })
        })
        .collect::<Result<_>>()?;
    let sentences = shards.into_iter().flatten().collect();

    let binned = bin_by_length(sentences, config.min_len, config.max_len, config.dedup)?;
    let lexicon = build_lexicon(binned.bins.values())?;
    let classes = classify_frequency(&lexicon, config.high_cutoff, config.low_cutoff)?;
    let spectrum = frequency_spectrum(&lexicon);
    let spectrum_fit =
        fit_power_law_offset(&spectrum.xs(), &spectrum.ys(), None).map_err(|e| e.to_string());

    let (qualifying, skipped): (Vec<&LengthBin>, Vec<&LengthBin>) = binned
        .bins
        .values()
        .partition(|b| b.len() >= config.min_sentences_per_bin);
    if qualifying.is_empty() {
        return Err(Error::NoQualifyingBins {
            min_sentences: config.min_sentences_per_bin,
        });
    }
    let bins: Vec<BinReport> = qualifying
        .par_iter()
        .map(|bin| analyze_bin(bin, &lexicon, &classes, config))
        .collect::<Result<_>>()?;

    let (k_inc, k_dec) = bins
        .iter()
        .filter_map(|b| b.trend.as_ref()?.test.as_ref())
        .fold((0, 0), |(i, d), t| (i + t.k_increasing, d + t.k_decreasing));

    Ok(RunReport {
        config: config.clone(),
        binning: binned.stats,
        analyzed_sentences: binned.sentence_count(),
        lexicon,
        classes,
        spectrum,
        spectrum_fit,
        pooled_trend: proportion_half_test(k_inc, k_dec).ok(),
        bins,
        skipped_bins: skipped.iter().map(|b| (b.length(), b.len())).collect(),
        written: Vec::new(),
    })
}

fn write_outputs(report: &RunReport) -> Result<Vec<PathBuf>> {
    let config = &report.config;
    let mut written = Vec::new();
    if config.emits(Emit::Csv) {
        written.extend(emit_csv(report, &config.out_dir)?);
    }
    if config.emits(Emit::Json) {
        written.push(emit_summary_json(report, &config.out_dir)?);
    }
    if config.emits(Emit::Svg) {
        written.extend(emit_svg(report, &config.out_dir)?);
    }
    Ok(written)
}

/// Reads a config echo, either bare or under the `config` key of a summary.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let config = match value.get("config") {
        Some(inner) => inner.clone(),
        None => value,
    };
    Ok(serde_json::from_value(config)?)
}
