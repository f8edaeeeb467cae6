//! Automatic choice among several candidate corrections of one source
//! sentence.
//!
//! Two criteria rank the candidates: the smallest character edit distance to
//! the source and the largest cosine between mean character vectors. A
//! candidate is selected only when both criteria pick it; otherwise the entry
//! is left for manual adjudication. Ties inside a criterion go to the earliest
//! candidate.

use alloc::vec::Vec;

use crate::edit::levenshtein;
use crate::residual::cosine;
use crate::types::Sentence;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UndecidedReason {
    /// The two criteria chose different candidates.
    Disagreement {
        levenshtein: usize,
        cosine: usize,
    },
    /// No embeddings were available for the similarity criterion.
    NoEmbeddings,
    NoCandidates,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    Selected(usize),
    Undecided(UndecidedReason),
}

/// Character vectors for the source and each candidate.
#[derive(Debug, Clone, Copy)]
pub struct SentenceVectors<'a> {
    pub source: &'a [Vec<f64>],
    pub candidates: &'a [Vec<Vec<f64>>],
}

pub fn mean_vector(vectors: &[Vec<f64>]) -> Vec<f64> {
    let Some(first) = vectors.first() else {
        return Vec::new();
    };
    let mut mean = alloc::vec![0.0; first.len()];
    for v in vectors {
        for (m, x) in mean.iter_mut().zip(v) {
            *m += x;
        }
    }
    let n = vectors.len() as f64;
    mean.iter_mut().for_each(|m| *m /= n);
    mean
}

/// Index of the candidate closest to the source in edit distance.
pub fn closest_by_edit(source: &Sentence, candidates: &[Sentence]) -> Option<usize> {
    candidates
        .iter()
        .enumerate()
        .min_by_key(|(k, c)| (levenshtein(source.chars(), c.chars()), *k))
        .map(|(k, _)| k)
}

/// Index of the candidate whose mean vector is most similar to the source's.
pub fn closest_by_cosine(vectors: &SentenceVectors<'_>) -> Option<usize> {
    let src = mean_vector(vectors.source);
    let mut best: Option<(usize, f64)> = None;
    for (k, cand) in vectors.candidates.iter().enumerate() {
        let c = cosine(&src, &mean_vector(cand));
        if best.is_none_or(|(_, b)| c > b) {
            best = Some((k, c));
        }
    }
    best.map(|(k, _)| k)
}

pub fn select_reference(
    source: &Sentence,
    candidates: &[Sentence],
    vectors: Option<&SentenceVectors<'_>>,
) -> Selection {
    match candidates.len() {
        0 => return Selection::Undecided(UndecidedReason::NoCandidates),
        1 => return Selection::Selected(0),
        _ => {}
    }
    let Some(vectors) = vectors else {
        return Selection::Undecided(UndecidedReason::NoEmbeddings);
    };
    let by_edit = closest_by_edit(source, candidates).expect("non-empty");
    let by_cosine = closest_by_cosine(vectors).unwrap_or(usize::MAX);
    if by_edit == by_cosine {
        Selection::Selected(by_edit)
    } else {
        Selection::Undecided(UndecidedReason::Disagreement {
            levenshtein: by_edit,
            cosine: by_cosine,
        })
    }
}
