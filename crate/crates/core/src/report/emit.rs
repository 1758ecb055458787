use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::json;

use super::format::sig;
use super::svg::{line_chart, stacked_proportion_chart, Series, PALETTE};
use super::{BinReport, RunReport};
use crate::error::{Error, Result};
use crate::lexicon::{write_lexicon_csv, FrequencyClass};
use crate::stattests::PROPORTION_TEST_LABEL;

pub const PROFILES_HEADER: [&str; 12] = [
    "length",
    "position",
    "tokens",
    "types",
    "entropy_bits",
    "mean_word_len",
    "mean_word_freq",
    "prop_high",
    "prop_medium",
    "prop_low",
    "plaw_exponent",
    "plaw_r2",
];

pub const MEDIAL_TESTS_HEADER: [&str; 7] =
    ["length", "statistic", "n", "r", "F", "p", "window_mode"];

const TREND_TESTS_HEADER: [&str; 8] = [
    "length",
    "classified_words",
    "flat_words",
    "k_increasing",
    "k_decreasing",
    "share_increasing",
    "statistic",
    "p",
];

fn real(x: f64) -> String {
    sig(x, 6)
}

fn opt_real(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn csv_file(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::Writer::from_writer(create(path)?))
}

fn finish<W: Write>(mut writer: csv::Writer<W>) -> Result<()> {
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Writes `profiles.csv`, `medial_tests.csv`, `trend_tests.csv`,
/// `lexicon.csv` and `spectrum.csv`.
pub fn emit_csv(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>> {
    let profiles = dir.join("profiles.csv");
    let mut w = csv_file(&profiles)?;
    w.write_record(PROFILES_HEADER)?;
    for p in report.bins.iter().flat_map(|b| &b.profiles) {
        w.write_record([
            p.length.to_string(),
            p.position.to_string(),
            p.tokens.to_string(),
            p.type_count.to_string(),
            real(p.entropy_bits),
            real(p.mean_word_len),
            real(p.mean_word_freq),
            real(p.prop_high),
            real(p.prop_medium),
            real(p.prop_low),
            opt_real(p.plaw_exponent),
            opt_real(p.plaw_r2),
        ])?;
    }
    finish(w)?;

    let medial = dir.join("medial_tests.csv");
    let mode = report.config.medial.to_string();
    let mut w = csv_file(&medial)?;
    w.write_record(MEDIAL_TESTS_HEADER)?;
    for bin in &report.bins {
        for t in &bin.medial_tests {
            w.write_record([
                bin.length.to_string(),
                t.statistic_name.clone(),
                t.n.to_string(),
                real(t.r),
                real(t.f),
                real(t.p),
                mode.clone(),
            ])?;
        }
    }
    finish(w)?;

    let trends = dir.join("trend_tests.csv");
    let mut w = csv_file(&trends)?;
    w.write_record(TREND_TESTS_HEADER)?;
    for bin in &report.bins {
        let Some(trend) = &bin.trend else { continue };
        let test = trend.test.as_ref();
        w.write_record([
            bin.length.to_string(),
            trend.classified_words.to_string(),
            trend.flat_words.to_string(),
            test.map(|t| t.k_increasing.to_string()).unwrap_or_default(),
            test.map(|t| t.k_decreasing.to_string()).unwrap_or_default(),
            opt_real(test.map(|t| t.share_increasing())),
            opt_real(test.map(|t| t.statistic)),
            opt_real(test.map(|t| t.p)),
        ])?;
    }
    if let Some(t) = &report.pooled_trend {
        w.write_record([
            "all".to_owned(),
            (t.k_increasing + t.k_decreasing).to_string(),
            String::new(),
            t.k_increasing.to_string(),
            t.k_decreasing.to_string(),
            real(t.share_increasing()),
            real(t.statistic),
            real(t.p),
        ])?;
    }
    finish(w)?;

    let lexicon = dir.join("lexicon.csv");
    write_lexicon_csv(&report.lexicon, &report.classes, create(&lexicon)?)?;

    let spectrum = dir.join("spectrum.csv");
    let mut w = csv_file(&spectrum)?;
    w.write_record(["frequency", "types"])?;
    for point in &report.spectrum.points {
        w.write_record([point.frequency.to_string(), point.types.to_string()])?;
    }
    finish(w)?;

    Ok(vec![profiles, medial, trends, lexicon, spectrum])
}

fn bin_summary(bin: &BinReport) -> serde_json::Value {
    json!({
        "length": bin.length,
        "sentences": bin.sentences,
        "medial_window": bin.window,
        "medial_tests": bin.medial_tests,
        "skipped_tests": bin.skipped_tests,
        "trend": bin.trend,
    })
}

/// Writes `summary.json`.
pub fn emit_summary_json(report: &RunReport, dir: &Path) -> Result<PathBuf> {
    let stats = &report.binning;
    let classes = &report.classes;
    let spectrum_fit = match &report.spectrum_fit {
        Ok(fit) => serde_json::to_value(fit)?,
        Err(reason) => json!({ "error": reason }),
    };
    let summary = json!({
        "sentences": {
            "input": stats.input_sentences,
            "out_of_range": stats.out_of_range_sentences,
            "in_range": stats.in_range_sentences,
            "unique_in_range": stats.unique_in_range_sentences,
            "removed_duplicates": stats.removed_duplicates,
            "analyzed": report.analyzed_sentences,
            "dedup_applied": report.config.dedup,
        },
        "tokens": report.lexicon.total_tokens(),
        "types": report.lexicon.total_types(),
        "distinct_frequencies": classes.distinct_ranks,
        "frequency_classes": {
            "high_cutoff": classes.high_cutoff,
            "low_cutoff": classes.low_cutoff,
            "high": classes.count(FrequencyClass::High),
            "medium": classes.count(FrequencyClass::Medium),
            "low": classes.count(FrequencyClass::Low),
        },
        "spectrum_fit": spectrum_fit,
        "position_power_law": {
            "model": "a*rank^b",
            "method": "two-parameter log-log least squares",
            "min_types": 3,
        },
        "medial_window_mode": report.config.medial.to_string(),
        "bins": report.bins.iter().map(bin_summary).collect::<Vec<_>>(),
        "skipped_bins": report
            .skipped_bins
            .iter()
            .map(|&(length, sentences)| json!({ "length": length, "sentences": sentences }))
            .collect::<Vec<_>>(),
        "trend_test": {
            "label": PROPORTION_TEST_LABEL,
            "pooled": report.pooled_trend,
        },
        "config": report.config,
    });
    let path = dir.join("summary.json");
    let mut out = create(&path)?;
    serde_json::to_writer_pretty(&mut out, &summary)?;
    out.write_all(b"\n")
        .and_then(|()| out.flush())
        .map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn write_svg(path: PathBuf, body: String) -> Result<PathBuf> {
    fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Writes entropy, mean word frequency and class proportion charts per bin.
pub fn emit_svg(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>> {
    let wanted = &report.config.svg_lengths;
    let mut written = Vec::new();
    for bin in &report.bins {
        if !wanted.is_empty() && !wanted.contains(&bin.length) {
            continue;
        }
        let l = bin.length;
        let series = |name: &str, f: fn(&crate::positional::PositionProfile) -> f64| Series {
            name: name.to_owned(),
            color: PALETTE[0],
            points: bin
                .profiles
                .iter()
                .map(|p| (p.position as f64, f(p)))
                .collect(),
        };
        written.push(write_svg(
            dir.join(format!("entropy_L{l}.svg")),
            line_chart(
                &format!("Positional entropy, length {l}"),
                "Sentence position",
                "Entropy (bits)",
                &[series("entropy", |p| p.entropy_bits)],
            ),
        )?);
        written.push(write_svg(
            dir.join(format!("word_freq_L{l}.svg")),
            line_chart(
                &format!("Mean word frequency, length {l}"),
                "Sentence position",
                "Mean corpus frequency",
                &[series("mean frequency", |p| p.mean_word_freq)],
            ),
        )?);
        let layer = |f: fn(&crate::positional::PositionProfile) -> f64| {
            bin.profiles.iter().map(f).collect::<Vec<f64>>()
        };
        written.push(write_svg(
            dir.join(format!("class_props_L{l}.svg")),
            stacked_proportion_chart(
                &format!("Frequency classes by position, length {l}"),
                &[
                    ("high", PALETTE[0], layer(|p| p.prop_high)),
                    ("medium", PALETTE[1], layer(|p| p.prop_medium)),
                    ("low", PALETTE[2], layer(|p| p.prop_low)),
                ],
            ),
        )?);
    }
    Ok(written)
}
