//! Position-resolved word statistics for sentence corpora.
//!
//! Sentences are tokenized, grouped by length, and each position within a
//! length is profiled: entropy of the word distribution, mean word length,
//! mean corpus frequency, frequency-class shares and a rank power law.
//! Medial trends are tested with simple-regression F-tests.

pub mod error;
pub mod ingest;
pub mod lexicon;
pub mod numfit;
pub mod positional;
pub mod report;
pub mod special;
pub mod stattests;
pub mod synthgen;

pub use error::{Error, Result};
pub use ingest::{
    bin_by_length, ingest_text, BinnedCorpus, InputFormat, LengthBin, Sentence, TokenizeConfig,
};
pub use lexicon::{
    build_lexicon, classify_frequency, frequency_spectrum, FrequencyClass, FrequencyClassMap,
    Lexicon,
};
pub use numfit::{
    fit_power_law_loglog, fit_power_law_nls, fit_power_law_offset, PowerLawFit, PowerLawModel,
};
pub use positional::{
    position_counts, positional_entropy, profile_bin, Estimator, PositionProfile,
};
pub use report::{run_profile, RunConfig, RunReport};
pub use stattests::{medial_window, proportion_half_test, regression_f_test, MedialMode};
pub use synthgen::{generate_positional_corpus, staircase_specs, PositionSpec};
