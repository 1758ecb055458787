//! Per-position statistics for one sentence length.
//!
//! Every accumulation walks words in lexicographic order, so results do not
//! depend on how cells are scheduled across threads.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::LengthBin;
use crate::lexicon::{FrequencyClass, FrequencyClassMap, Lexicon};
use crate::numfit::fit_power_law_loglog;
use crate::stattests::pearson_r;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositionCounts {
    pub length: usize,
    /// 1-based.
    pub position: usize,
    pub counts: BTreeMap<String, u64>,
    pub tokens: u64,
}

impl PositionCounts {
    pub fn new(length: usize, position: usize, counts: BTreeMap<String, u64>) -> Self {
        let counts: BTreeMap<String, u64> = counts.into_iter().filter(|&(_, c)| c > 0).collect();
        let tokens = counts.values().sum();
        PositionCounts {
            length,
            position,
            counts,
            tokens,
        }
    }

    pub fn type_count(&self) -> usize {
        self.counts.len()
    }
}

/// Tallies words at each position `1..=L` of the bin.
pub fn position_counts(bin: &LengthBin) -> Result<Vec<PositionCounts>> {
    if bin.is_empty() {
        return Err(Error::EmptyBin);
    }
    let length = bin.length();
    let mut tallies: Vec<BTreeMap<String, u64>> = vec![BTreeMap::new(); length];
    for sentence in bin.sentences() {
        for (tally, word) in tallies.iter_mut().zip(sentence.norms()) {
            match tally.get_mut(word) {
                Some(c) => *c += 1,
                None => {
                    tally.insert(word.to_owned(), 1);
                }
            }
        }
    }
    Ok(tallies
        .into_iter()
        .enumerate()
        .map(|(i, counts)| PositionCounts::new(length, i + 1, counts))
        .collect())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    /// Plug-in estimate from relative frequencies.
    #[default]
    Mle,
    /// Plug-in plus `(K-1)/(2N ln 2)`.
    MillerMadow,
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Estimator::Mle => "mle",
            Estimator::MillerMadow => "miller-madow",
        })
    }
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mle" => Ok(Estimator::Mle),
            "miller-madow" | "miller_madow" => Ok(Estimator::MillerMadow),
            other => Err(Error::Config(format!("unknown estimator `{other}`"))),
        }
    }
}

/// Shannon entropy in bits of the word distribution at one position.
pub fn positional_entropy(pc: &PositionCounts, estimator: Estimator) -> Result<f64> {
    if pc.tokens == 0 {
        return Err(Error::NoTokens);
    }
    let n = pc.tokens as f64;
    // H = log2 N - (1/N) Σ c log2 c
    let weighted: f64 = pc
        .counts
        .values()
        .map(|&c| {
            let c = c as f64;
            c * c.log2()
        })
        .sum();
    let k = pc.type_count() as f64;
    let plug_in = (n.log2() - weighted / n).clamp(0.0, k.log2());
    Ok(match estimator {
        Estimator::Mle => plug_in,
        Estimator::MillerMadow => plug_in + (k - 1.0) / (2.0 * n * std::f64::consts::LN_2),
    })
}

/// Token-weighted mean of the character counts of normalized forms.
pub fn mean_word_length(pc: &PositionCounts) -> Result<f64> {
    if pc.tokens == 0 {
        return Err(Error::NoTokens);
    }
    let total: f64 = pc
        .counts
        .iter()
        .map(|(w, &c)| c as f64 * w.chars().count() as f64)
        .sum();
    Ok(total / pc.tokens as f64)
}

/// Token-weighted mean of corpus frequency.
pub fn mean_word_frequency(pc: &PositionCounts, lex: &Lexicon) -> Result<f64> {
    if pc.tokens == 0 {
        return Err(Error::NoTokens);
    }
    let mut total = 0.0;
    for (word, &count) in &pc.counts {
        let freq = lex
            .freq(word)
            .ok_or_else(|| Error::Inconsistent(format!("word `{word}` missing from lexicon")))?;
        total += count as f64 * freq as f64;
    }
    Ok(total / pc.tokens as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassProportions {
    pub high: f64,
    pub medium: f64,
    pub low: f64,
}

/// Token-weighted share of each frequency class.
pub fn class_proportions(
    pc: &PositionCounts,
    classes: &FrequencyClassMap,
) -> Result<ClassProportions> {
    if pc.tokens == 0 {
        return Err(Error::NoTokens);
    }
    let mut tally = [0u64; 3];
    for (word, &count) in &pc.counts {
        let class = classes
            .class_of(word)
            .ok_or_else(|| Error::Inconsistent(format!("word `{word}` has no frequency class")))?;
        tally[class as usize] += count;
    }
    let n = pc.tokens as f64;
    Ok(ClassProportions {
        high: tally[FrequencyClass::High as usize] as f64 / n,
        medium: tally[FrequencyClass::Medium as usize] as f64 / n,
        low: tally[FrequencyClass::Low as usize] as f64 / n,
    })
}

/// `(rank, probability)` with rank 1 the most probable word; ties are
/// ordered lexicographically.
pub fn position_rank_distribution(pc: &PositionCounts) -> Vec<(usize, f64)> {
    let mut counts: Vec<u64> = pc.counts.values().copied().collect();
    counts.sort_by(|a, b| b.cmp(a));
    let n = pc.tokens as f64;
    counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| (i + 1, c as f64 / n))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SlopeSign {
    Increasing,
    Decreasing,
    Flat,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WordTrend {
    pub word: String,
    pub slope_sign: SlopeSign,
    /// Correlation of the word's count with position over the window; 0 when flat.
    pub r: f64,
}

/// Correlates each word's per-position count with position over `window`.
///
/// A word seen at fewer than two window positions, or with a constant count,
/// is [`SlopeSign::Flat`].
pub fn per_word_trends(bin: &LengthBin, window: &[usize]) -> Result<Vec<WordTrend>> {
    if window.len() < 3 {
        return Err(Error::Config(format!(
            "trend window has {} positions, needs at least 3",
            window.len()
        )));
    }
    if let Some(&bad) = window.iter().find(|&&p| p < 1 || p > bin.length()) {
        return Err(Error::Config(format!(
            "window position {bad} outside 1..{}",
            bin.length()
        )));
    }
    let counts = position_counts(bin)?;
    let mut series: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for (slot, &position) in window.iter().enumerate() {
        for (word, &count) in &counts[position - 1].counts {
            series
                .entry(word.as_str())
                .or_insert_with(|| vec![0.0; window.len()])[slot] = count as f64;
        }
    }
    let xs: Vec<f64> = window.iter().map(|&p| p as f64).collect();
    Ok(series
        .into_iter()
        .map(|(word, ys)| {
            let present = ys.iter().filter(|&&c| c > 0.0).count();
            let r = if present >= 2 {
                pearson_r(&xs, &ys).unwrap_or(0.0)
            } else {
                0.0
            };
            let slope_sign = if r > 0.0 {
                SlopeSign::Increasing
            } else if r < 0.0 {
                SlopeSign::Decreasing
            } else {
                SlopeSign::Flat
            };
            WordTrend {
                word: word.to_owned(),
                slope_sign,
                r,
            }
        })
        .collect())
}

/// `(increasing, decreasing)` counts, flat words excluded.
pub fn trend_tally(trends: &[WordTrend]) -> (u64, u64) {
    trends
        .iter()
        .fold((0, 0), |(inc, dec), t| match t.slope_sign {
            SlopeSign::Increasing => (inc + 1, dec),
            SlopeSign::Decreasing => (inc, dec + 1),
            SlopeSign::Flat => (inc, dec),
        })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositionProfile {
    pub length: usize,
    pub position: usize,
    pub tokens: u64,
    pub type_count: usize,
    pub entropy_bits: f64,
    pub mean_word_len: f64,
    pub mean_word_freq: f64,
    pub prop_high: f64,
    pub prop_medium: f64,
    pub prop_low: f64,
    /// Exponent of `a·rank^b` fitted to the rank-probability distribution;
    /// `None` when the position has fewer than three types.
    pub plaw_exponent: Option<f64>,
    pub plaw_r2: Option<f64>,
}

pub fn profile_position(
    pc: &PositionCounts,
    lex: &Lexicon,
    classes: &FrequencyClassMap,
    estimator: Estimator,
) -> Result<PositionProfile> {
    let props = class_proportions(pc, classes)?;
    let ranked = position_rank_distribution(pc);
    let plaw = if ranked.len() >= 3 {
        let (xs, ys): (Vec<f64>, Vec<f64>) = ranked.iter().map(|&(r, p)| (r as f64, p)).unzip();
        Some(fit_power_law_loglog(&xs, &ys)?)
    } else {
        None
    };
    Ok(PositionProfile {
        length: pc.length,
        position: pc.position,
        tokens: pc.tokens,
        type_count: pc.type_count(),
        entropy_bits: positional_entropy(pc, estimator)?,
        mean_word_len: mean_word_length(pc)?,
        mean_word_freq: mean_word_frequency(pc, lex)?,
        prop_high: props.high,
        prop_medium: props.medium,
        prop_low: props.low,
        plaw_exponent: plaw.map(|f| f.b),
        plaw_r2: plaw.map(|f| f.adj_r2),
    })
}

/// One profile per position of the bin.
pub fn profile_bin(
    bin: &LengthBin,
    lex: &Lexicon,
    classes: &FrequencyClassMap,
    estimator: Estimator,
) -> Result<Vec<PositionProfile>> {
    position_counts(bin)?
        .iter()
        .map(|pc| profile_position(pc, lex, classes, estimator))
        .collect()
}
