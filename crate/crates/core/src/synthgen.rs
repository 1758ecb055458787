//! Synthetic corpora with known per-position word distributions.
//!
//! Sentence `i` draws its words from a ChaCha8 stream seeded with `seed` and
//! stream id `i`. Each position consumes one `u64`; its top 53 bits give a
//! uniform `u` in `[0, 1)` and the word is the first whose cumulative
//! probability exceeds `u`. Positions are independent.

use std::io::Write;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ingest::{LengthBin, Sentence};

#[derive(Debug, Clone, PartialEq)]
pub struct PositionSpec {
    pub position: usize,
    pub distribution: Vec<(String, f64)>,
}

impl PositionSpec {
    pub fn new(position: usize, distribution: Vec<(String, f64)>) -> Self {
        PositionSpec {
            position,
            distribution,
        }
    }

    /// Uniform over `words`.
    pub fn uniform<S: AsRef<str>>(position: usize, words: &[S]) -> Self {
        let p = 1.0 / words.len() as f64;
        PositionSpec::new(
            position,
            words.iter().map(|w| (w.as_ref().to_owned(), p)).collect(),
        )
    }

    /// Shannon entropy of the distribution in bits.
    pub fn entropy_bits(&self) -> f64 {
        -self
            .distribution
            .iter()
            .map(|&(_, p)| p * p.log2())
            .sum::<f64>()
    }

    fn validate(&self) -> Result<()> {
        if self.distribution.is_empty() {
            return Err(Error::MalformedSpec(format!(
                "position {} has an empty distribution",
                self.position
            )));
        }
        for (word, p) in &self.distribution {
            if word.is_empty() || word.chars().any(char::is_whitespace) {
                return Err(Error::MalformedSpec(format!("invalid word `{word}`")));
            }
            if p.is_nan() || *p <= 0.0 {
                return Err(Error::MalformedSpec(format!(
                    "probability of `{word}` at position {} is not positive",
                    self.position
                )));
            }
        }
        let total: f64 = self.distribution.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::MalformedSpec(format!(
                "probabilities at position {} sum to {total}",
                self.position
            )));
        }
        Ok(())
    }
}

struct Sampler<'a> {
    words: Vec<&'a str>,
    cumulative: Vec<f64>,
}

impl<'a> Sampler<'a> {
    fn new(spec: &'a PositionSpec) -> Self {
        let mut acc = 0.0;
        let cumulative = spec
            .distribution
            .iter()
            .map(|(_, p)| {
                acc += p;
                acc
            })
            .collect();
        Sampler {
            words: spec.distribution.iter().map(|(w, _)| w.as_str()).collect(),
            cumulative,
        }
    }

    fn sample(&self, bits: u64) -> &'a str {
        let u = (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        let i = self.cumulative.partition_point(|&c| c <= u);
        self.words[i.min(self.words.len() - 1)]
    }
}

/// Draws `n_sentences` sentences of `length` words from `specs`.
pub fn generate_positional_corpus(
    length: usize,
    specs: &[PositionSpec],
    n_sentences: usize,
    seed: u64,
) -> Result<LengthBin> {
    if length == 0 || specs.len() != length {
        return Err(Error::MalformedSpec(format!(
            "expected {length} position specs, got {}",
            specs.len()
        )));
    }
    if n_sentences == 0 {
        return Err(Error::MalformedSpec(
            "n_sentences must be at least 1".into(),
        ));
    }
    for (i, spec) in specs.iter().enumerate() {
        if spec.position != i + 1 {
            return Err(Error::MalformedSpec(format!(
                "spec {} is labelled position {}",
                i + 1,
                spec.position
            )));
        }
        spec.validate()?;
    }
    let samplers: Vec<Sampler> = specs.iter().map(Sampler::new).collect();
    let sentences: Vec<Sentence> = (0..n_sentences)
        .into_par_iter()
        .map(|index| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index as u64);
            let words: Vec<&str> = samplers.iter().map(|s| s.sample(rng.next_u64())).collect();
            Sentence::from_norms(&words).expect("length is at least 1")
        })
        .collect();
    LengthBin::new(length, sentences, false)
}

/// Three-step fixture over a shared vocabulary `w000..w511`: the first
/// position is uniform over 4 words, medial positions over the same 32
/// words, and the final position over all 512.
pub fn staircase_specs(length: usize) -> Vec<PositionSpec> {
    let vocab: Vec<String> = (0..512).map(|i| format!("w{i:03}")).collect();
    (1..=length)
        .map(|position| {
            let k = if position == 1 {
                4
            } else if position == length {
                512
            } else {
                32
            };
            PositionSpec::uniform(position, &vocab[..k])
        })
        .collect()
}

/// Writes one sentence per line, words separated by single spaces.
pub fn write_lines<W: Write>(bin: &LengthBin, mut out: W) -> std::io::Result<()> {
    for sentence in bin.sentences() {
        let mut first = true;
        for word in sentence.norms() {
            if !first {
                out.write_all(b" ")?;
            }
            out.write_all(word.as_bytes())?;
            first = false;
        }
        out.write_all(b"\n")?;
    }
    out.flush()
}
