//! Corpus-wide word frequencies and the views derived from them.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::LengthBin;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    freq: BTreeMap<String, u64>,
    total_tokens: u64,
}

impl Lexicon {
    /// Builds a lexicon from raw counts, dropping zero entries.
    pub fn from_counts<I, S>(counts: I) -> Self
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        let mut freq = BTreeMap::new();
        for (word, count) in counts {
            if count > 0 {
                *freq.entry(word.into()).or_insert(0) += count;
            }
        }
        let total_tokens = freq.values().sum();
        Lexicon { freq, total_tokens }
    }

    pub fn freq(&self, word: &str) -> Option<u64> {
        self.freq.get(word).copied()
    }

    /// Words in lexicographic order with their counts.
    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.freq.iter().map(|(w, &c)| (w.as_str(), c))
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn total_types(&self) -> usize {
        self.freq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freq.is_empty()
    }

    /// Adds the counts of `other` into `self`.
    pub fn merge(&mut self, other: &Lexicon) {
        for (word, count) in other.iter() {
            *self.freq.entry(word.to_owned()).or_insert(0) += count;
        }
        self.total_tokens += other.total_tokens;
    }

    /// Number of distinct frequency values.
    pub fn distinct_frequencies(&self) -> usize {
        let mut values: Vec<u64> = self.freq.values().copied().collect();
        values.sort_unstable();
        values.dedup();
        values.len()
    }
}

/// Counts every token of every binned sentence once.
pub fn build_lexicon<'a, I>(bins: I) -> Result<Lexicon>
where
    I: IntoIterator<Item = &'a LengthBin>,
{
    let mut freq: BTreeMap<String, u64> = BTreeMap::new();
    let mut sentences = 0usize;
    for bin in bins {
        for sentence in bin.sentences() {
            sentences += 1;
            for word in sentence.norms() {
                match freq.get_mut(word) {
                    Some(c) => *c += 1,
                    None => {
                        freq.insert(word.to_owned(), 1);
                    }
                }
            }
        }
    }
    if sentences == 0 {
        return Err(Error::EmptyCorpus);
    }
    Ok(Lexicon::from_counts(freq))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SpectrumPoint {
    /// Frequency value.
    pub frequency: u64,
    /// Number of types occurring exactly `frequency` times.
    pub types: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrequencySpectrum {
    pub points: Vec<SpectrumPoint>,
}

impl FrequencySpectrum {
    pub fn total_tokens(&self) -> u64 {
        self.points.iter().map(|p| p.frequency * p.types).sum()
    }

    pub fn total_types(&self) -> u64 {
        self.points.iter().map(|p| p.types).sum()
    }

    pub fn xs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.frequency as f64).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.types as f64).collect()
    }
}

pub fn frequency_spectrum(lex: &Lexicon) -> FrequencySpectrum {
    let mut by_freq: BTreeMap<u64, u64> = BTreeMap::new();
    for (_, count) in lex.iter() {
        *by_freq.entry(count).or_insert(0) += 1;
    }
    FrequencySpectrum {
        points: by_freq
            .into_iter()
            .map(|(frequency, types)| SpectrumPoint { frequency, types })
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankedWord {
    pub word: String,
    pub frequency: u64,
    /// 1-based rank over words; ties ordered lexicographically.
    pub type_rank: usize,
    /// 1-based rank over distinct frequency values; tied words share it.
    pub freq_rank: usize,
}

/// Words ordered by descending frequency, then lexicographically.
pub fn rank_frequency(lex: &Lexicon) -> Vec<RankedWord> {
    let mut words: Vec<(&str, u64)> = lex.iter().collect();
    // stable sort keeps the lexicographic order of the BTreeMap within ties
    words.sort_by_key(|w| std::cmp::Reverse(w.1));
    let mut freq_rank = 0;
    let mut previous = None;
    words
        .into_iter()
        .enumerate()
        .map(|(i, (word, frequency))| {
            if previous != Some(frequency) {
                freq_rank += 1;
                previous = Some(frequency);
            }
            RankedWord {
                word: word.to_owned(),
                frequency,
                type_rank: i + 1,
                freq_rank,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FrequencyClass {
    High,
    Medium,
    Low,
}

impl fmt::Display for FrequencyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrequencyClass::High => "high",
            FrequencyClass::Medium => "medium",
            FrequencyClass::Low => "low",
        })
    }
}

#[derive(Debug, Clone)]
pub struct FrequencyClassMap {
    class_of: BTreeMap<String, FrequencyClass>,
    pub high_cutoff: usize,
    pub low_cutoff: usize,
    pub distinct_ranks: usize,
}

impl FrequencyClassMap {
    pub fn class_of(&self, word: &str) -> Option<FrequencyClass> {
        self.class_of.get(word).copied()
    }

    pub fn len(&self) -> usize {
        self.class_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class_of.is_empty()
    }

    pub fn count(&self, class: FrequencyClass) -> usize {
        self.class_of.values().filter(|&&c| c == class).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, FrequencyClass)> {
        self.class_of.iter().map(|(w, &c)| (w.as_str(), c))
    }
}

/// Assigns High to the first `high_cutoff` distinct-frequency ranks, Low to
/// the last `low_cutoff`, and Medium to everything in between.
pub fn classify_frequency(
    lex: &Lexicon,
    high_cutoff: usize,
    low_cutoff: usize,
) -> Result<FrequencyClassMap> {
    let ranked = rank_frequency(lex);
    let distinct_ranks = ranked.last().map_or(0, |w| w.freq_rank);
    if high_cutoff + low_cutoff > distinct_ranks {
        return Err(Error::Config(format!(
            "frequency cutoffs {high_cutoff}+{low_cutoff} exceed the {distinct_ranks} distinct frequency ranks"
        )));
    }
    let low_start = distinct_ranks - low_cutoff;
    let class_of = ranked
        .into_iter()
        .map(|w| {
            let class = if w.freq_rank <= high_cutoff {
                FrequencyClass::High
            } else if w.freq_rank > low_start {
                FrequencyClass::Low
            } else {
                FrequencyClass::Medium
            };
            (w.word, class)
        })
        .collect();
    Ok(FrequencyClassMap {
        class_of,
        high_cutoff,
        low_cutoff,
        distinct_ranks,
    })
}

/// Writes `word,frequency,type_rank,freq_rank,class` rows in type-rank order.
pub fn write_lexicon_csv<W: Write>(
    lex: &Lexicon,
    classes: &FrequencyClassMap,
    out: W,
) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["word", "frequency", "type_rank", "freq_rank", "class"])?;
    for w in rank_frequency(lex) {
        let class = classes
            .class_of(&w.word)
            .ok_or_else(|| Error::Inconsistent(format!("unclassified word `{}`", w.word)))?;
        writer.write_record([
            w.word.as_str(),
            &w.frequency.to_string(),
            &w.type_rank.to_string(),
            &w.freq_rank.to_string(),
            &class.to_string(),
        ])?;
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Sentence;
    use proptest::prelude::*;

    fn lex(pairs: &[(&str, u64)]) -> Lexicon {
        Lexicon::from_counts(pairs.iter().map(|&(w, c)| (w, c)))
    }

    fn bin(length: usize, texts: &[&[&str]]) -> LengthBin {
        let sentences = texts
            .iter()
            .map(|t| Sentence::from_norms(t).unwrap())
            .collect();
        LengthBin::new(length, sentences, false).unwrap()
    }

    #[test]
    fn counts_single_sentence() {
        let b = bin(3, &[&["a", "b", "a"]]);
        let lex = build_lexicon([&b]).unwrap();
        assert_eq!(lex.freq("a"), Some(2));
        assert_eq!(lex.freq("b"), Some(1));
        assert_eq!(lex.total_tokens(), 3);
        assert_eq!(lex.total_types(), 2);
    }

    #[test]
    fn union_of_disjoint_bins() {
        let b2 = bin(2, &[&["a", "b"]]);
        let b3 = bin(3, &[&["c", "d", "c"]]);
        let lex = build_lexicon([&b2, &b3]).unwrap();
        let mut expected = build_lexicon([&b2]).unwrap();
        expected.merge(&build_lexicon([&b3]).unwrap());
        assert_eq!(lex, expected);
        assert_eq!(lex.total_types(), 4);
    }

    #[test]
    fn empty_corpus_is_an_error() {
        let err = build_lexicon(std::iter::empty()).unwrap_err();
        assert_eq!(err.to_string(), "no sentences in configured length range");
    }

    #[test]
    fn spectrum_examples() {
        let s = frequency_spectrum(&lex(&[("a", 2), ("b", 1), ("c", 1)]));
        let pairs: Vec<_> = s.points.iter().map(|p| (p.frequency, p.types)).collect();
        assert_eq!(pairs, vec![(1, 2), (2, 1)]);

        let s = frequency_spectrum(&lex(&[("a", 5)]));
        assert_eq!(
            s.points,
            vec![SpectrumPoint {
                frequency: 5,
                types: 1
            }]
        );

        let words: Vec<(String, u64)> = (0..10).map(|i| (format!("w{i}"), 7)).collect();
        let s = frequency_spectrum(&Lexicon::from_counts(words));
        assert_eq!(
            s.points,
            vec![SpectrumPoint {
                frequency: 7,
                types: 10
            }]
        );
    }

    #[test]
    fn rank_views() {
        let ranked = rank_frequency(&lex(&[("c", 1), ("a", 3), ("b", 1)]));
        let view: Vec<_> = ranked
            .iter()
            .map(|w| (w.word.as_str(), w.type_rank, w.freq_rank))
            .collect();
        assert_eq!(view, vec![("a", 1, 1), ("b", 2, 2), ("c", 3, 2)]);
    }

    #[test]
    fn classify_five_distinct_frequencies() {
        let l = lex(&[
            ("a", 50),
            ("b", 40),
            ("c", 30),
            ("d", 20),
            ("e", 10),
            ("f", 10),
        ]);
        let classes = classify_frequency(&l, 1, 1).unwrap();
        assert_eq!(classes.class_of("a"), Some(FrequencyClass::High));
        for w in ["b", "c", "d"] {
            assert_eq!(classes.class_of(w), Some(FrequencyClass::Medium));
        }
        assert_eq!(classes.class_of("e"), Some(FrequencyClass::Low));
        assert_eq!(classes.class_of("f"), Some(FrequencyClass::Low));
    }

    #[test]
    fn classify_single_frequency_all_high() {
        let l = lex(&[("a", 1), ("b", 1), ("c", 1)]);
        let classes = classify_frequency(&l, 1, 0).unwrap();
        assert_eq!(classes.count(FrequencyClass::High), 3);
    }

    #[test]
    fn classify_rejects_excessive_cutoffs() {
        let l = lex(&[("a", 2), ("b", 1)]);
        assert!(matches!(
            classify_frequency(&l, 2, 1),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn lexicon_csv_layout() {
        let l = lex(&[("the", 3), ("cat", 1)]);
        let classes = classify_frequency(&l, 1, 1).unwrap();
        let mut out = Vec::new();
        write_lexicon_csv(&l, &classes, &mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "word,frequency,type_rank,freq_rank,class\nthe,3,1,1,high\ncat,1,2,2,low\n"
        );
    }

    fn arb_lexicon() -> impl Strategy<Value = Lexicon> {
        prop::collection::btree_map("[a-z]{1,4}", 1u64..50, 1..60).prop_map(Lexicon::from_counts)
    }

    proptest! {
        #[test]
        fn spectrum_reconstructs_totals(l in arb_lexicon()) {
            let s = frequency_spectrum(&l);
            prop_assert_eq!(s.total_tokens(), l.total_tokens());
            prop_assert_eq!(s.total_types() as usize, l.total_types());
            prop_assert!(s.points.windows(2).all(|w| w[0].frequency < w[1].frequency));
            prop_assert_eq!(s.points.len(), l.distinct_frequencies());
        }

        #[test]
        fn classes_partition_and_are_monotone(l in arb_lexicon(), hi in 0usize..4, lo in 0usize..4) {
            prop_assume!(hi + lo <= l.distinct_frequencies());
            let classes = classify_frequency(&l, hi, lo).unwrap();
            let total = classes.count(FrequencyClass::High)
                + classes.count(FrequencyClass::Medium)
                + classes.count(FrequencyClass::Low);
            prop_assert_eq!(total, l.total_types());
            let freq_of = |c: FrequencyClass| -> Vec<u64> {
                classes.iter().filter(|(_, k)| *k == c).map(|(w, _)| l.freq(w).unwrap()).collect()
            };
            let (h, m, lw) = (freq_of(FrequencyClass::High), freq_of(FrequencyClass::Medium), freq_of(FrequencyClass::Low));
            if let (Some(hmin), Some(mmax)) = (h.iter().min(), m.iter().max()) { prop_assert!(hmin >= mmax); }
            if let (Some(mmin), Some(lmax)) = (m.iter().min(), lw.iter().max()) { prop_assert!(mmin >= lmax); }
            if let (Some(hmin), Some(lmax)) = (h.iter().min(), lw.iter().max()) { prop_assert!(hmin >= lmax); }
        }
    }
}
