use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A boundary set lacks the final character index of its sentence.
    MissingFinalBoundary { len: usize },

    /// An index is outside the sentence it refers to.
    IndexOutOfRange { index: usize, len: usize },

    /// Token spans do not partition the sentence.
    Coverage(String),

    /// Tokens were given as strings whose concatenation is not the sentence.
    TokenTextMismatch { expected: String, found: String },

    /// A link reuses a source or target index, or breaks another alignment invariant.
    InvalidAlignment(String),

    /// Two tokenizations refer to sentences of different length.
    SentenceMismatch { left: usize, right: usize },

    /// Paired inputs have different lengths.
    LengthMismatch { left: usize, right: usize },

    /// No embedding vectors for the requested sentence or position.
    MissingEmbedding,

    /// Embedding vector counts or dimensions do not fit the sentence.
    InvalidEmbedding(String),

    /// A corpus that must not be empty was empty.
    EmptyCorpus,

    /// Edit statistics were requested on a corpus with no edits.
    DistributionUndefined,

    /// `ratio * total_chars < 1`, or the ratio is not positive.
    RatioTooSmall { ratio: f64, total_chars: usize },

    /// Noise parameters are outside their domain.
    InvalidNoiseSpec(String),

    /// A pair needed for evaluation or tuning has no gold tokenization.
    MissingGold(String),

    /// A pair has no tokenization where one is required.
    MissingTokenization(String),

    /// Weights, thresholds or grid settings are outside their domain.
    InvalidConfig(String),

    /// A perturbation log does not replay against the clean corpus.
    Replay(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::MissingFinalBoundary { len } => {
                write!(
                    f,
                    "boundary set lacks the final index {} of a {len}-character sentence",
                    len.saturating_sub(1)
                )
            }
            Self::IndexOutOfRange { index, len } => {
                write!(f, "index {index} out of range for length {len}")
            }
            Self::Coverage(msg) => write!(f, "tokenization does not cover the sentence: {msg}"),
            Self::TokenTextMismatch { expected, found } => {
                write!(f, "tokens concatenate to {found:?}, expected {expected:?}")
            }
            Self::InvalidAlignment(msg) => write!(f, "invalid alignment: {msg}"),
            Self::SentenceMismatch { left, right } => {
                write!(
                    f,
                    "tokenizations cover different sentences ({left} vs {right} characters)"
                )
            }
            Self::LengthMismatch { left, right } => {
                write!(f, "paired inputs differ in length ({left} vs {right})")
            }
            Self::MissingEmbedding => f.write_str("no embedding vectors available"),
            Self::InvalidEmbedding(msg) => write!(f, "invalid embeddings: {msg}"),
            Self::EmptyCorpus => f.write_str("corpus is empty"),
            Self::DistributionUndefined => {
                f.write_str("corpus contains no edit operations; distribution undefined")
            }
            Self::RatioTooSmall { ratio, total_chars } => write!(
                f,
                "noise ratio {ratio} over {total_chars} characters yields fewer than one edit"
            ),
            Self::InvalidNoiseSpec(msg) => write!(f, "invalid noise spec: {msg}"),
            Self::MissingGold(id) => write!(f, "pair {id:?} has no gold source tokenization"),
            Self::MissingTokenization(id) => write!(f, "pair {id:?} is missing a tokenization"),
            Self::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Self::Replay(msg) => write!(f, "perturbation replay failed: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
