//! Token-level micro F1, error-type labels, alignment coverage statistics and
//! a paired bootstrap significance test.

use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::types::{CharAlignment, Provenance, Tokenization};

/// Span-match counts for one sentence or, summed, a corpus.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct F1Counts {
    pub correct: usize,
    pub predicted: usize,
    pub gold: usize,
}

impl F1Counts {
    pub fn precision(&self) -> f64 {
        ratio(self.correct, self.predicted)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.correct, self.gold)
    }

    /// Harmonic mean of precision and recall, computed as `2c / (p + g)`.
    pub fn f1(&self) -> f64 {
        ratio(2 * self.correct, self.predicted + self.gold)
    }
}

impl core::ops::Add for F1Counts {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self {
            correct: self.correct + rhs.correct,
            predicted: self.predicted + rhs.predicted,
            gold: self.gold + rhs.gold,
        }
    }
}

impl core::ops::AddAssign for F1Counts {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl core::iter::Sum for F1Counts {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::default(), |a, b| a + b)
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Counts predicted tokens whose span exactly equals a gold token span.
pub fn token_f1(pred: &Tokenization, gold: &Tokenization) -> Result<F1Counts> {
    if pred.char_len() != gold.char_len() {
        return Err(Error::SentenceMismatch {
            left: pred.char_len(),
            right: gold.char_len(),
        });
    }
    let (p, g) = (pred.spans(), gold.spans());
    let (mut a, mut b, mut correct) = (0, 0, 0);
    while a < p.len() && b < g.len() {
        match p[a].start.cmp(&g[b].start) {
            core::cmp::Ordering::Less => a += 1,
            core::cmp::Ordering::Greater => b += 1,
            core::cmp::Ordering::Equal => {
                correct += usize::from(p[a].end == g[b].end);
                a += 1;
                b += 1;
            }
        }
    }
    Ok(F1Counts {
        correct,
        predicted: p.len(),
        gold: g.len(),
    })
}

/// Per-token correctness of `pred` against `gold`.
pub fn correct_token_flags(pred: &Tokenization, gold: &Tokenization) -> Result<Vec<bool>> {
    if pred.char_len() != gold.char_len() {
        return Err(Error::SentenceMismatch {
            left: pred.char_len(),
            right: gold.char_len(),
        });
    }
    let mut starts = alloc::vec![None; gold.char_len()];
    for s in gold.spans() {
        starts[s.start] = Some(s.end);
    }
    Ok(pred
        .spans()
        .iter()
        .map(|s| starts[s.start] == Some(s.end))
        .collect())
}

/// Sentence-level segmentation error type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ErrorType {
    None,
    /// A gold token split into several predicted tokens.
    OverSeg,
    /// Several gold tokens merged into one predicted token.
    UnderSeg,
    /// Same token count, shifted boundary.
    Drift,
    /// Both splits and merges, or crossing regions.
    Mixed,
}

impl ErrorType {
    pub const ALL: [Self; 5] = [
        Self::None,
        Self::OverSeg,
        Self::UnderSeg,
        Self::Drift,
        Self::Mixed,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::None => "none",
            Self::OverSeg => "over_seg",
            Self::UnderSeg => "under_seg",
            Self::Drift => "drift",
            Self::Mixed => "mixed",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.as_str() == name)
    }
}

/// Labels the mismatch between `pred` and `gold`.
///
/// Checked in order: identical, equal token counts (drift), then the regions
/// between boundaries both sides share: all splits (over), all merges
/// (under), anything else (mixed).
pub fn classify_error(pred: &Tokenization, gold: &Tokenization) -> Result<ErrorType> {
    if pred.char_len() != gold.char_len() {
        return Err(Error::SentenceMismatch {
            left: pred.char_len(),
            right: gold.char_len(),
        });
    }
    if pred == gold {
        return Ok(ErrorType::None);
    }
    if pred.num_tokens() == gold.num_tokens() {
        return Ok(ErrorType::Drift);
    }
    let (pb, gb) = (pred.boundary_flags(), gold.boundary_flags());
    let (mut splits, mut merges, mut other) = (0, 0, 0);
    let (mut np, mut ng) = (0, 0);
    for (&p, &g) in pb.iter().zip(&gb) {
        np += usize::from(p);
        ng += usize::from(g);
        if p && g {
            match (np, ng) {
                (1, 1) => {}
                (_, 1) => splits += 1,
                (1, _) => merges += 1,
                _ => other += 1,
            }
            np = 0;
            ng = 0;
        }
    }
    Ok(match (splits, merges, other) {
        (s, 0, 0) if s > 0 => ErrorType::OverSeg,
        (0, m, 0) if m > 0 => ErrorType::UnderSeg,
        _ => ErrorType::Mixed,
    })
}

/// Outcome notation over systems: `g` matches gold, `b` does not.
pub fn outcome_pattern(matches_gold: impl IntoIterator<Item = bool>) -> String {
    let mut out = String::new();
    for (k, ok) in matches_gold.into_iter().enumerate() {
        if k > 0 {
            out.push(' ');
        }
        out.push(if ok { 'g' } else { 'b' });
    }
    out
}

/// Coverage and crossing statistics over a corpus of alignments.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AlignmentStats {
    pub sentences: usize,
    pub source_chars: usize,
    pub source_aligned: usize,
    pub target_chars: usize,
    pub target_aligned: usize,
    pub links: usize,
    pub residual_links: usize,
    pub non_monotone_links: usize,
    pub non_monotone_residual: usize,
    pub sentences_with_non_monotone_residual: usize,
}

impl AlignmentStats {
    pub fn source_coverage(&self) -> f64 {
        coverage(self.source_aligned, self.source_chars)
    }

    pub fn target_coverage(&self) -> f64 {
        coverage(self.target_aligned, self.target_chars)
    }

    /// Share of residual links that cross another link.
    pub fn non_monotone_residual_fraction(&self) -> f64 {
        ratio(self.non_monotone_residual, self.residual_links)
    }
}

fn coverage(aligned: usize, total: usize) -> f64 {
    if total == 0 {
        1.0
    } else {
        aligned as f64 / total as f64
    }
}

/// Whether link `k` crosses any other link: `(i - i')(j - j') < 0`.
pub fn crosses_any(links: &[(usize, usize)], k: usize) -> bool {
    let (i, j) = links[k];
    links
        .iter()
        .enumerate()
        .any(|(o, &(i2, j2))| o != k && ((i < i2 && j > j2) || (i > i2 && j < j2)))
}

pub fn alignment_stats<'a>(
    alignments: impl IntoIterator<Item = &'a CharAlignment>,
) -> AlignmentStats {
    let mut stats = AlignmentStats::default();
    for a in alignments {
        stats.sentences += 1;
        stats.source_chars += a.source_len();
        stats.target_chars += a.target_len();
        let links: Vec<_> = a.links().collect();
        stats.source_aligned += links.len();
        stats.target_aligned += links.len();
        stats.links += links.len();
        let pairs: Vec<(usize, usize)> = links.iter().map(|l| (l.source, l.target)).collect();
        let mut residual_crossing = false;
        for (k, link) in links.iter().enumerate() {
            let crossing = crosses_any(&pairs, k);
            stats.non_monotone_links += usize::from(crossing);
            if link.provenance == Provenance::Residual {
                stats.residual_links += 1;
                stats.non_monotone_residual += usize::from(crossing);
                residual_crossing |= crossing;
            }
        }
        stats.sentences_with_non_monotone_residual += usize::from(residual_crossing);
    }
    stats
}

/// Outcome of a paired bootstrap test between systems A and B.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Significance {
    pub p_value: f64,
    /// Micro F1 of A minus micro F1 of B.
    pub observed_difference: f64,
    /// Fewer than two sentences; no resampling variance exists.
    pub degenerate: bool,
    pub resamples: usize,
    pub seed: u64,
}

/// Two-sided paired bootstrap over sentences.
///
/// Sentences are resampled with replacement and the micro F1 difference
/// recomputed. `p` is twice the share of resamples whose difference has the
/// opposite sign to the observed one or is zero, capped at 1. A zero observed
/// difference gives `p = 1`.
pub fn paired_significance(
    a: &[F1Counts],
    b: &[F1Counts],
    resamples: usize,
    seed: u64,
) -> Result<Significance> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if resamples == 0 {
        return Err(Error::InvalidConfig(
            "bootstrap needs at least one resample".into(),
        ));
    }
    let observed =
        a.iter().copied().sum::<F1Counts>().f1() - b.iter().copied().sum::<F1Counts>().f1();
    let mut result = Significance {
        p_value: 1.0,
        observed_difference: observed,
        degenerate: false,
        resamples,
        seed,
    };
    if a.len() < 2 {
        result.degenerate = true;
        return Ok(result);
    }
    if observed == 0.0 {
        return Ok(result);
    }
    let n = a.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reversed = 0usize;
    for _ in 0..resamples {
        let (mut sa, mut sb) = (F1Counts::default(), F1Counts::default());
        for _ in 0..n {
            let k = rng.gen_range(0..n);
            sa += a[k];
            sb += b[k];
        }
        let delta = sa.f1() - sb.f1();
        if delta * observed.signum() <= 0.0 {
            reversed += 1;
        }
    }
    result.p_value = (2.0 * reversed as f64 / resamples as f64).min(1.0);
    Ok(result)
}
