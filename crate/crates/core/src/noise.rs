//! Synthetic benchmark generation by character-level noise injection.
//!
//! A clean segmented corpus becomes the target side. A global ratio `r` fixes
//! the number of edits at `round(r * N)` for `N` clean characters. Edit
//! positions are drawn without replacement over the whole corpus, and each
//! edit is a substitution, deletion or insertion drawn from an
//! [`EditDistribution`]. The gold source segmentation follows the clean one
//! through the same edits.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::edit::{edit_path, EditOp};
use crate::error::{Error, Result};
use crate::types::{Sentence, SentencePair, Tokenization};

/// Name of the generator behind every seeded stream in this crate.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng";

/// Relative frequency of the three learner-perspective edit kinds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EditDistribution {
    pub substitution: f64,
    pub deletion: f64,
    pub insertion: f64,
}

impl EditDistribution {
    /// Estimated from learner source / correction pairs.
    #[allow(clippy::approx_constant)]
    pub const LEARNER: Self = Self {
        substitution: 0.483,
        deletion: 0.318,
        insertion: 0.199,
    };

    pub fn validate(&self) -> Result<()> {
        let parts = [self.substitution, self.deletion, self.insertion];
        if parts.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidNoiseSpec(format!(
                "probabilities {parts:?} outside [0, 1]"
            )));
        }
        let total: f64 = parts.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidNoiseSpec(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(())
    }

    fn sample(&self, u: f64) -> EditKind {
        if u < self.substitution {
            EditKind::Substitution
        } else if u < self.substitution + self.deletion {
            EditKind::Deletion
        } else {
            EditKind::Insertion
        }
    }
}

impl Default for EditDistribution {
    fn default() -> Self {
        Self::LEARNER
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EditKind {
    Substitution,
    Deletion,
    Insertion,
}

impl EditKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Substitution => "substitution",
            Self::Deletion => "deletion",
            Self::Insertion => "insertion",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "substitution" => Some(Self::Substitution),
            "deletion" => Some(Self::Deletion),
            "insertion" => Some(Self::Insertion),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    pub ratio: f64,
    pub distribution: EditDistribution,
    pub seed: u64,
    /// Characters used for substitutions and insertions. `None` means every
    /// character of the clean corpus.
    pub char_pool: Option<Vec<char>>,
}

impl NoiseSpec {
    pub fn new(ratio: f64, seed: u64) -> Self {
        Self {
            ratio,
            distribution: EditDistribution::LEARNER,
            seed,
            char_pool: None,
        }
    }
}

/// Derives a distinct, reproducible seed for each ratio of a sweep.
pub fn seed_for_ratio(base: u64, ratio: f64) -> u64 {
    // splitmix64 finalizer over the base seed and the ratio in parts per million
    let ppm = libm::round(ratio * 1e6) as u64;
    let mut z = base ^ ppm.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A clean sentence with its segmentation, as read from a segmented corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentedSentence {
    pub id: String,
    pub sentence: Sentence,
    pub tokens: Tokenization,
}

impl SegmentedSentence {
    pub fn from_tokens<S: AsRef<str>>(id: impl Into<String>, tokens: &[S]) -> Result<Self> {
        let text: String = tokens.iter().map(AsRef::as_ref).collect();
        let sentence = Sentence::new(&text);
        let tokens = Tokenization::from_tokens(&sentence, tokens)?;
        Ok(Self {
            id: id.into(),
            sentence,
            tokens,
        })
    }
}

/// One applied edit. `position` indexes the clean sentence; an insertion
/// goes immediately before that character.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Perturbation {
    pub sentence_id: String,
    pub kind: EditKind,
    pub position: usize,
    pub original: Option<char>,
    pub replacement: Option<char>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PerturbationLog {
    pub entries: Vec<Perturbation>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct KindCounts {
    pub substitution: usize,
    pub deletion: usize,
    pub insertion: usize,
}

impl KindCounts {
    pub fn total(&self) -> usize {
        self.substitution + self.deletion + self.insertion
    }

    fn add(&mut self, kind: EditKind) {
        match kind {
            EditKind::Substitution => self.substitution += 1,
            EditKind::Deletion => self.deletion += 1,
            EditKind::Insertion => self.insertion += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseOutput {
    pub pairs: Vec<SentencePair>,
    pub log: PerturbationLog,
    pub counts: KindCounts,
    pub total_chars: usize,
    pub pool_size: usize,
}

/// Relative frequency of substitutions, deletions and insertions on the
/// minimum edit paths from each learner source to its target.
///
/// A target character missing from the source is a learner deletion; a
/// source character missing from the target is a learner insertion.
pub fn estimate_distribution(corpus: &[SentencePair]) -> Result<EditDistribution> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut counts = KindCounts::default();
    for pair in corpus {
        for op in edit_path(pair.source.chars(), pair.target.chars()) {
            match op {
                EditOp::Match { .. } => {}
                EditOp::Substitute { .. } => counts.add(EditKind::Substitution),
                EditOp::Insert { .. } => counts.add(EditKind::Deletion),
                EditOp::Delete { .. } => counts.add(EditKind::Insertion),
            }
        }
    }
    let total = counts.total();
    if total == 0 {
        return Err(Error::DistributionUndefined);
    }
    let total = total as f64;
    Ok(EditDistribution {
        substitution: counts.substitution as f64 / total,
        deletion: counts.deletion as f64 / total,
        insertion: counts.insertion as f64 / total,
    })
}

#[derive(Debug, Clone, Copy)]
enum Planned {
    Substitute(char),
    Delete,
    Insert(char),
}

pub fn inject_noise(corpus: &[SegmentedSentence], spec: &NoiseSpec) -> Result<NoiseOutput> {
    spec.distribution.validate()?;
    let total_chars: usize = corpus.iter().map(|s| s.sentence.len()).sum();
    if spec.ratio.is_nan()
        || spec.ratio <= 0.0
        || libm::round(spec.ratio * total_chars as f64) < 1.0
    {
        return Err(Error::RatioTooSmall {
            ratio: spec.ratio,
            total_chars,
        });
    }
    if spec.ratio > 1.0 {
        return Err(Error::InvalidNoiseSpec(format!(
            "ratio {} above 1",
            spec.ratio
        )));
    }
    let pool: Vec<char> = match &spec.char_pool {
        Some(p) => p
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
        None => corpus
            .iter()
            .flat_map(|s| s.sentence.chars().iter().copied())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
    };
    if pool.len() < 2 {
        return Err(Error::InvalidNoiseSpec(
            "character pool needs at least two characters".into(),
        ));
    }

    let n_edits = libm::round(spec.ratio * total_chars as f64) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut positions = index::sample(&mut rng, total_chars, n_edits).into_vec();
    positions.sort_unstable();

    let flat: Vec<char> = corpus
        .iter()
        .flat_map(|s| s.sentence.chars().iter().copied())
        .collect();
    let mut plan: Vec<Option<Planned>> = vec![None; total_chars];
    for &p in &positions {
        let kind = spec.distribution.sample(rng.gen::<f64>());
        plan[p] = Some(match kind {
            EditKind::Substitution => {
                let original = flat[p];
                // draw from the pool minus the original character
                let slot = pool.binary_search(&original).ok();
                let k = rng.gen_range(0..pool.len() - usize::from(slot.is_some()));
                let k = match slot {
                    Some(s) if k >= s => k + 1,
                    _ => k,
                };
                Planned::Substitute(pool[k])
            }
            EditKind::Deletion => Planned::Delete,
            EditKind::Insertion => Planned::Insert(pool[rng.gen_range(0..pool.len())]),
        });
    }

    let mut out = NoiseOutput {
        pairs: Vec::with_capacity(corpus.len()),
        log: PerturbationLog::default(),
        counts: KindCounts::default(),
        total_chars,
        pool_size: pool.len(),
    };
    let mut offset = 0;
    for clean in corpus {
        let len = clean.sentence.len();
        let plan = &plan[offset..offset + len];
        offset += len;

        let mut token_of = vec![0usize; len];
        for (t, span) in clean.tokens.spans().iter().enumerate() {
            token_of[span.start..span.end].fill(t);
        }
        let mut emitted: Vec<(char, usize)> = Vec::with_capacity(len + 4);
        for (p, (&c, step)) in clean.sentence.chars().iter().zip(plan).enumerate() {
            let entry = |kind, original, replacement| Perturbation {
                sentence_id: clean.id.clone(),
                kind,
                position: p,
                original,
                replacement,
            };
            match *step {
                None => emitted.push((c, token_of[p])),
                Some(Planned::Substitute(x)) => {
                    emitted.push((x, token_of[p]));
                    out.log
                        .entries
                        .push(entry(EditKind::Substitution, Some(c), Some(x)));
                }
                Some(Planned::Delete) => {
                    out.log
                        .entries
                        .push(entry(EditKind::Deletion, Some(c), None));
                }
                Some(Planned::Insert(x)) => {
                    // joins the token on its left; sentence-initial joins the right
                    let token = emitted.last().map_or(token_of[p], |e| e.1);
                    emitted.push((x, token));
                    emitted.push((c, token_of[p]));
                    out.log
                        .entries
                        .push(entry(EditKind::Insertion, None, Some(x)));
                }
            }
        }

        let source = Sentence::from_chars(emitted.iter().map(|e| e.0).collect());
        let mut lengths: Vec<usize> = Vec::new();
        let mut prev = None;
        for &(_, t) in &emitted {
            if prev == Some(t) {
                *lengths.last_mut().expect("run started") += 1;
            } else {
                lengths.push(1);
                prev = Some(t);
            }
        }
        let gold = Tokenization::from_lengths(lengths)?;
        out.pairs.push(SentencePair {
            id: clean.id.clone(),
            source,
            target: clean.sentence.clone(),
            source_tokens_initial: None,
            target_tokens: Some(clean.tokens.clone()),
            gold_source_tokens: Some(gold),
        });
    }
    for e in &out.log.entries {
        out.counts.add(e.kind);
    }
    Ok(out)
}

/// Applies `log` to the clean corpus and returns the noisy sentences.
pub fn replay(corpus: &[SegmentedSentence], log: &PerturbationLog) -> Result<Vec<Sentence>> {
    let mut cursor = 0;
    let entries = &log.entries;
    let mut out = Vec::with_capacity(corpus.len());
    for clean in corpus {
        let start = cursor;
        while cursor < entries.len() && entries[cursor].sentence_id == clean.id {
            cursor += 1;
        }
        let edits = &entries[start..cursor];
        let mut chars = Vec::with_capacity(clean.sentence.len() + edits.len());
        let mut next = edits.iter().peekable();
        for (p, &c) in clean.sentence.chars().iter().enumerate() {
            match next.next_if(|e| e.position == p) {
                None => chars.push(c),
                Some(e) => {
                    if e.kind != EditKind::Insertion && e.original != Some(c) {
                        return Err(Error::Replay(format!(
                            "{}:{p} expected {:?}, found {c:?}",
                            clean.id, e.original
                        )));
                    }
                    match (e.kind, e.replacement) {
                        (EditKind::Substitution, Some(x)) => chars.push(x),
                        (EditKind::Deletion, None) => {}
                        (EditKind::Insertion, Some(x)) => {
                            chars.push(x);
                            chars.push(c);
                        }
                        _ => {
                            return Err(Error::Replay(format!(
                                "malformed entry at {}:{p}",
                                clean.id
                            )))
                        }
                    }
                }
            }
        }
        if let Some(e) = next.next() {
            return Err(Error::Replay(format!(
                "entry {}:{} not applied",
                e.sentence_id, e.position
            )));
        }
        out.push(Sentence::from_chars(chars));
    }
    if cursor != entries.len() {
        return Err(Error::Replay(format!(
            "entry for {:?} does not match the corpus order",
            entries[cursor].sentence_id
        )));
    }
    Ok(out)
}
