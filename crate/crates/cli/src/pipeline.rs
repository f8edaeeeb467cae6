//! Corpus-level wiring of the core stages, parallel per sentence.

use std::collections::BTreeMap;

use anyhow::{anyhow, Result};
use rayon::prelude::*;

use segproj_core::anchor::align_anchors;
use segproj_core::ibm::{ibm_decode, ibm_expand, IbmModel};
use segproj_core::project::{check_projection, project};
use segproj_core::residual::{
    align_residual, PairEmbeddings, ResidualScorer, SimilarityConfig, SimilarityTables,
};
use segproj_core::segment::{DictionarySegmenter, Segmenter};
use segproj_core::{CharAlignment, SentencePair, Tokenization};

/// A broken internal guarantee, as opposed to bad input. Exits with code 2.
#[derive(Debug, thiserror::Error)]
#[error("internal invariant violated: {0}")]
pub struct InvariantViolation(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    /// Identical-character anchors only.
    P1,
    /// Anchors plus similarity-scored residual links.
    P2,
    /// IBM Model 2 token alignment expanded to characters.
    Ibm,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Self::P1 => "p1",
            Self::P2 => "p2",
            Self::Ibm => "ibm",
        }
    }
}

/// Fills missing initial source and target segmentations with `segmenter`.
pub fn fill_tokenizations(
    corpus: &mut [SentencePair],
    segmenter: Option<&DictionarySegmenter>,
    initial: bool,
    target: bool,
) -> Result<()> {
    for pair in corpus.iter_mut() {
        if initial && pair.source_tokens_initial.is_none() {
            let seg = segmenter.ok_or_else(|| missing(&pair.id, "source_tokens"))?;
            pair.source_tokens_initial = Some(seg.segment(&pair.source));
        }
        if target && pair.target_tokens.is_none() {
            let seg = segmenter.ok_or_else(|| missing(&pair.id, "target_tokens"))?;
            pair.target_tokens = Some(seg.segment(&pair.target));
        }
    }
    Ok(())
}

fn missing(id: &str, field: &str) -> anyhow::Error {
    anyhow!(
        "{}; pair {id:?} has no {field} and no --dictionary was given",
        segproj_core::Error::MissingTokenization(id.to_string())
    )
}

/// Everything the residual scorer may consult.
#[derive(Debug, Default)]
pub struct ScoringInputs {
    pub tables: SimilarityTables,
    pub embeddings: BTreeMap<String, PairEmbeddings>,
    pub config: SimilarityConfig,
}

pub fn align_corpus(
    corpus: &[SentencePair],
    mode: Mode,
    inputs: &ScoringInputs,
    model: Option<&IbmModel>,
) -> Result<Vec<CharAlignment>> {
    corpus
        .par_iter()
        .map(|pair| {
            let scorer = ResidualScorer {
                source: &pair.source,
                target: &pair.target,
                tables: &inputs.tables,
                embeddings: inputs.embeddings.get(&pair.id),
                config: &inputs.config,
            };
            let a = match mode {
                Mode::P1 => align_anchors(&pair.source, &pair.target),
                Mode::P2 => align_residual(&align_anchors(&pair.source, &pair.target), &scorer),
                Mode::Ibm => {
                    let model = model.ok_or_else(|| anyhow!("ibm mode needs a model"))?;
                    let assignments =
                        ibm_decode(model, pair).map_err(|e| anyhow!("pair {:?}: {e}", pair.id))?;
                    ibm_expand(pair.target_tokens()?, &assignments, &scorer)
                        .map_err(|e| anyhow!("pair {:?}: {e}", pair.id))?
                }
            };
            Ok(a)
        })
        .collect()
}

/// Projects every pair and checks the operator's guarantees on the result.
pub fn project_corpus(
    corpus: &[SentencePair],
    alignments: &[CharAlignment],
) -> Result<Vec<Tokenization>> {
    corpus
        .par_iter()
        .zip(alignments)
        .map(|(pair, a)| {
            let initial = pair.initial_source_tokens()?;
            let target = pair.target_tokens()?;
            let out = project(&pair.source, initial, target, a)
                .map_err(|e| anyhow!("pair {:?}: {e}", pair.id))?;
            check_projection(&pair.source, initial, target, a, &out)
                .map_err(|v| InvariantViolation(format!("pair {:?}: {v:?}", pair.id)))?;
            Ok(out)
        })
        .collect()
}
