//! Corpus ingestion: sentence segmentation, tokenization and grouping of
//! sentences into exact-length bins.
//!
//! Tokens are maximal runs of letters, digits and apostrophes, where a hyphen
//! is kept only when it sits between two such characters
//! (`state-of-the-art` is one token, `well--known` is two). Every other
//! character separates tokens. A run made only of apostrophes is dropped.

use std::collections::{BTreeMap, HashSet};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    /// One sentence per non-blank line.
    Lines,
    /// Free text split after `.`, `!` or `?` followed by whitespace.
    Plain,
}

impl FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lines" => Ok(InputFormat::Lines),
            "plain" => Ok(InputFormat::Plain),
            other => Err(Error::Config(format!("unknown input format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    pub surface: String,
    /// Normalized form used for all counting.
    pub norm: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    tokens: Vec<Token>,
}

impl Sentence {
    /// Returns `None` for an empty token sequence.
    pub fn new(tokens: Vec<Token>) -> Option<Self> {
        if tokens.is_empty() {
            None
        } else {
            Some(Sentence { tokens })
        }
    }

    /// Builds a sentence whose surface and normalized forms coincide.
    pub fn from_norms<S: AsRef<str>>(words: &[S]) -> Option<Self> {
        let tokens = words
            .iter()
            .map(|w| Token {
                surface: w.as_ref().to_owned(),
                norm: w.as_ref().to_owned(),
            })
            .collect();
        Sentence::new(tokens)
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn norms(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.norm.as_str())
    }

    pub fn norm(&self, index: usize) -> &str {
        &self.tokens[index].norm
    }
}

/// All sentences of one exact length.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthBin {
    length: usize,
    sentences: Vec<Sentence>,
    dedup_applied: bool,
}

impl LengthBin {
    pub fn new(length: usize, sentences: Vec<Sentence>, dedup_applied: bool) -> Result<Self> {
        if let Some(bad) = sentences.iter().find(|s| s.len() != length) {
            return Err(Error::Inconsistent(format!(
                "sentence of length {} in bin of length {length}",
                bad.len()
            )));
        }
        Ok(LengthBin {
            length,
            sentences,
            dedup_applied,
        })
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn dedup_applied(&self) -> bool {
        self.dedup_applied
    }

    pub fn token_count(&self) -> usize {
        self.length * self.sentences.len()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct BinningStats {
    pub input_sentences: usize,
    pub input_tokens: usize,
    pub out_of_range_sentences: usize,
    pub out_of_range_tokens: usize,
    /// In-range sentences, all occurrences counted.
    pub in_range_sentences: usize,
    /// In-range sentences, identical norm sequences counted once.
    pub unique_in_range_sentences: usize,
    /// Sentences dropped by deduplication (zero when dedup is off).
    pub removed_duplicates: usize,
    pub removed_duplicate_tokens: usize,
}

#[derive(Debug, Clone)]
pub struct BinnedCorpus {
    pub bins: BTreeMap<usize, LengthBin>,
    pub stats: BinningStats,
}

impl BinnedCorpus {
    pub fn sentence_count(&self) -> usize {
        self.bins.values().map(LengthBin::len).sum()
    }

    pub fn token_count(&self) -> usize {
        self.bins.values().map(LengthBin::token_count).sum()
    }
}

/// Splits raw bytes into sentence-candidate spans.
pub fn segment_sentences(bytes: &[u8], format: InputFormat) -> Result<Vec<&str>> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::Encoding {
        offset: e.valid_up_to(),
    })?;
    Ok(match format {
        InputFormat::Lines => text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect(),
        InputFormat::Plain => split_plain(text),
    })
}

fn split_plain(text: &str) -> Vec<&str> {
    let mut spans = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if !matches!(c, '.' | '!' | '?') {
            continue;
        }
        if let Some(&(_, next)) = chars.peek() {
            if next.is_whitespace() {
                let end = i + c.len_utf8();
                push_span(&mut spans, &text[start..end]);
                start = end;
            }
        }
    }
    push_span(&mut spans, &text[start..]);
    spans
}

fn push_span<'a>(spans: &mut Vec<&'a str>, raw: &'a str) {
    let span = raw.trim();
    if !span.is_empty() {
        spans.push(span);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizeConfig {
    pub lowercase: bool,
}

impl Default for TokenizeConfig {
    fn default() -> Self {
        TokenizeConfig { lowercase: true }
    }
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || is_apostrophe(c)
}

pub fn tokenize(span: &str, config: TokenizeConfig) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut chars = span.chars().peekable();
    while let Some(c) = chars.next() {
        if is_word_char(c) {
            current.push(c);
            continue;
        }
        let internal_hyphen = c == '-'
            && current.chars().last().is_some_and(is_word_char)
            && chars.peek().copied().is_some_and(is_word_char);
        if internal_hyphen {
            current.push(c);
        } else {
            flush_token(&mut tokens, &mut current, config);
        }
    }
    flush_token(&mut tokens, &mut current, config);
    tokens
}

fn flush_token(tokens: &mut Vec<Token>, current: &mut String, config: TokenizeConfig) {
    if current.is_empty() {
        return;
    }
    let surface = std::mem::take(current);
    if surface.chars().all(|c| is_apostrophe(c) || c == '-') {
        return;
    }
    let norm = if config.lowercase {
        surface.to_lowercase()
    } else {
        surface.clone()
    };
    tokens.push(Token { surface, norm });
}

/// Segments and tokenizes one input shard, dropping spans with no tokens.
pub fn ingest_text(
    bytes: &[u8],
    format: InputFormat,
    config: TokenizeConfig,
) -> Result<Vec<Sentence>> {
    Ok(segment_sentences(bytes, format)?
        .into_iter()
        .filter_map(|span| Sentence::new(tokenize(span, config)))
        .collect())
}

/// Groups sentences into exact-length bins within `[min_len, max_len]`.
///
/// With `dedup`, the first occurrence of each norm sequence is kept and later
/// repeats anywhere in the corpus are dropped.
pub fn bin_by_length(
    sentences: Vec<Sentence>,
    min_len: usize,
    max_len: usize,
    dedup: bool,
) -> Result<BinnedCorpus> {
    if min_len < 1 {
        return Err(Error::Config("min_len must be at least 1".into()));
    }
    if min_len > max_len {
        return Err(Error::Config(format!(
            "min_len ({min_len}) exceeds max_len ({max_len})"
        )));
    }

    let mut stats = BinningStats {
        input_sentences: sentences.len(),
        input_tokens: sentences.iter().map(Sentence::len).sum(),
        ..Default::default()
    };

    let keep: Vec<bool> = {
        let mut seen: HashSet<Vec<&str>> = HashSet::new();
        sentences
            .iter()
            .map(|s| {
                let len = s.len();
                if len < min_len || len > max_len {
                    stats.out_of_range_sentences += 1;
                    stats.out_of_range_tokens += len;
                    return false;
                }
                stats.in_range_sentences += 1;
                let first = seen.insert(s.norms().collect());
                if first {
                    stats.unique_in_range_sentences += 1;
                } else if dedup {
                    stats.removed_duplicates += 1;
                    stats.removed_duplicate_tokens += len;
                    return false;
                }
                true
            })
            .collect()
    };

    let mut grouped: BTreeMap<usize, Vec<Sentence>> = BTreeMap::new();
    for (sentence, kept) in sentences.into_iter().zip(keep) {
        if kept {
            grouped.entry(sentence.len()).or_default().push(sentence);
        }
    }
    let bins = grouped
        .into_iter()
        .map(|(length, sentences)| {
            (
                length,
                LengthBin {
                    length,
                    sentences,
                    dedup_applied: dedup,
                },
            )
        })
        .collect();
    Ok(BinnedCorpus { bins, stats })
}
