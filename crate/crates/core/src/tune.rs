//! Grid search with k-fold cross-validation over the residual weights and
//! threshold.
//!
//! Anchors and feature values depend only on the pair, so they are computed
//! once per pair ([`PreparedPair`]); each configuration then only re-runs the
//! greedy selection, the projection and the scoring.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::anchor::align_anchors;
use crate::error::{Error, Result};
use crate::eval::{token_f1, F1Counts};
use crate::project::project;
use crate::residual::{
    select_residual, Features, PairEmbeddings, ResidualScorer, SimilarityConfig, SimilarityTables,
};
use crate::types::{CharAlignment, SentencePair, Tokenization};

/// Candidate configurations.
#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    /// Every weight drawn independently from `weights`, crossed with `taus`.
    Product {
        weights: Vec<f64>,
        taus: Vec<f64>,
    },
    Explicit(Vec<SimilarityConfig>),
}

impl Grid {
    /// Weights in steps of 0.1 and thresholds 0.30..=0.90 in steps of 0.05.
    pub fn default_search() -> Self {
        Self::product(10, 30, 90, 5).expect("static grid is valid")
    }

    /// Weights `k / weight_divisions`, thresholds from `tau_min` to `tau_max`
    /// (both in hundredths) every `tau_step` hundredths.
    pub fn product(
        weight_divisions: u32,
        tau_min: u32,
        tau_max: u32,
        tau_step: u32,
    ) -> Result<Self> {
        if weight_divisions == 0 || tau_step == 0 || tau_min > tau_max || tau_max > 100 {
            return Err(Error::InvalidConfig(format!(
                "bad grid: divisions {weight_divisions}, tau {tau_min}..={tau_max} step {tau_step}"
            )));
        }
        let weights = (0..=weight_divisions)
            .map(|k| k as f64 / weight_divisions as f64)
            .collect();
        let taus = (tau_min..=tau_max)
            .step_by(tau_step as usize)
            .map(|t| t as f64 / 100.0)
            .collect();
        Ok(Self::Product { weights, taus })
    }

    pub fn configs(&self) -> Vec<SimilarityConfig> {
        match self {
            Self::Explicit(configs) => configs.clone(),
            Self::Product { weights, taus } => {
                let mut out = Vec::with_capacity(weights.len().pow(4) * taus.len());
                for &lambda_emb in weights {
                    for &lambda_glyph in weights {
                        for &lambda_pinyin in weights {
                            for &lambda_pos in weights {
                                for &tau in taus {
                                    out.push(SimilarityConfig {
                                        lambda_emb,
                                        lambda_glyph,
                                        lambda_pinyin,
                                        lambda_pos,
                                        tau,
                                    });
                                }
                            }
                        }
                    }
                }
                out
            }
        }
    }
}

/// A configuration whose weights sum to at most `tau` can never link anything
/// (every feature is at most 1), so it is equivalent to the anchors alone.
pub fn can_link(config: &SimilarityConfig) -> bool {
    config.weight_sum() > config.tau
}

/// Fold index for each of `n` items: seeded shuffle, then round-robin.
pub fn fold_assignment(n: usize, folds: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut fold = vec![0; n];
    for (k, &item) in order.iter().enumerate() {
        fold[item] = k % folds;
    }
    fold
}

/// Per-pair data that does not depend on the configuration.
#[derive(Debug, Clone)]
pub struct PreparedPair {
    source: crate::types::Sentence,
    anchors: CharAlignment,
    initial: Tokenization,
    target_tokens: Tokenization,
    gold: Tokenization,
    // slot of each source index among the unresolved ones
    source_slot: Vec<usize>,
    target_slot: Vec<usize>,
    // row-major [target slot][source slot]
    features: Vec<Features>,
}

impl PreparedPair {
    pub fn new(
        pair: &SentencePair,
        tables: &SimilarityTables,
        embeddings: Option<&PairEmbeddings>,
    ) -> Result<Self> {
        let gold = pair.gold_tokens()?.clone();
        let initial = pair.initial_source_tokens()?.clone();
        let target_tokens = pair.target_tokens()?.clone();
        let anchors = align_anchors(&pair.source, &pair.target);
        let free_s = anchors.unresolved_source();
        let free_t = anchors.unresolved_target();
        let mut source_slot = vec![usize::MAX; pair.source.len()];
        for (k, &i) in free_s.iter().enumerate() {
            source_slot[i] = k;
        }
        let mut target_slot = vec![usize::MAX; pair.target.len()];
        for (k, &j) in free_t.iter().enumerate() {
            target_slot[j] = k;
        }
        let config = SimilarityConfig::default();
        let scorer = ResidualScorer {
            source: &pair.source,
            target: &pair.target,
            tables,
            embeddings,
            config: &config,
        };
        let mut features = Vec::with_capacity(free_s.len() * free_t.len());
        for &j in &free_t {
            for &i in &free_s {
                features.push(scorer.features(i, j));
            }
        }
        Ok(Self {
            source: pair.source.clone(),
            anchors,
            initial,
            target_tokens,
            gold,
            source_slot,
            target_slot,
            features,
        })
    }

    /// Runs selection, projection and scoring under `config`.
    pub fn evaluate(&self, config: &SimilarityConfig) -> F1Counts {
        let width = self.anchors.unresolved_source().len();
        let alignment = select_residual(&self.anchors, config.tau, |i, j| {
            self.features[self.target_slot[j] * width + self.source_slot[i]].interpolate(config)
        });
        let projected = project(&self.source, &self.initial, &self.target_tokens, &alignment)
            .expect("prepared pair is consistent");
        token_f1(&projected, &self.gold).expect("gold covers the source")
    }
}

/// Cross-validated score of one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigScore {
    pub config: SimilarityConfig,
    pub fold_f1: Vec<f64>,
    pub mean_f1: f64,
    pub max_f1: f64,
}

/// Micro F1 of `config` on each fold's pairs.
pub fn evaluate_config(
    config: &SimilarityConfig,
    prepared: &[PreparedPair],
    fold: &[usize],
    folds: usize,
) -> ConfigScore {
    let mut counts = vec![F1Counts::default(); folds];
    for (p, &f) in prepared.iter().zip(fold) {
        counts[f] += p.evaluate(config);
    }
    let fold_f1: Vec<f64> = counts.iter().map(F1Counts::f1).collect();
    let mean_f1 = fold_f1.iter().sum::<f64>() / folds as f64;
    let max_f1 = fold_f1.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    ConfigScore {
        config: *config,
        fold_f1,
        mean_f1,
        max_f1,
    }
}

fn config_key(c: &SimilarityConfig) -> [f64; 5] {
    [
        c.lambda_emb,
        c.lambda_glyph,
        c.lambda_pinyin,
        c.lambda_pos,
        c.tau,
    ]
}

/// Mean F1 descending, then max fold F1 descending, then configuration ascending.
pub fn compare_scores(a: &ConfigScore, b: &ConfigScore) -> Ordering {
    b.mean_f1
        .total_cmp(&a.mean_f1)
        .then(b.max_f1.total_cmp(&a.max_f1))
        .then_with(|| {
            config_key(&a.config)
                .iter()
                .zip(config_key(&b.config).iter())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuneOutcome {
    pub ranked: Vec<ConfigScore>,
    /// Configurations skipped because they can never add a link.
    pub pruned: Vec<SimilarityConfig>,
    pub fold: Vec<usize>,
}

/// Checks the corpus and splits the grid into evaluated and pruned configurations.
pub fn plan(
    corpus_len: usize,
    grid: &Grid,
    folds: usize,
    prune: bool,
) -> Result<(Vec<SimilarityConfig>, Vec<SimilarityConfig>)> {
    if folds < 2 {
        return Err(Error::InvalidConfig(format!(
            "need at least 2 folds, got {folds}"
        )));
    }
    if corpus_len < folds {
        return Err(Error::InvalidConfig(format!(
            "{corpus_len} pairs cannot fill {folds} folds"
        )));
    }
    let configs = grid.configs();
    if configs.is_empty() {
        return Err(Error::InvalidConfig("empty grid".into()));
    }
    for c in &configs {
        c.validate()?;
    }
    Ok(if prune {
        configs.into_iter().partition(can_link)
    } else {
        (configs, Vec::new())
    })
}

/// Full search. `embeddings[k]` belongs to `corpus[k]`.
pub fn grid_search(
    corpus: &[SentencePair],
    tables: &SimilarityTables,
    embeddings: &[Option<&PairEmbeddings>],
    grid: &Grid,
    folds: usize,
    seed: u64,
    prune: bool,
) -> Result<TuneOutcome> {
    if embeddings.len() != corpus.len() {
        return Err(Error::LengthMismatch {
            left: embeddings.len(),
            right: corpus.len(),
        });
    }
    let (configs, pruned) = plan(corpus.len(), grid, folds, prune)?;
    let prepared = corpus
        .iter()
        .zip(embeddings)
        .map(|(p, e)| PreparedPair::new(p, tables, *e))
        .collect::<Result<Vec<_>>>()?;
    let fold = fold_assignment(corpus.len(), folds, seed);
    let mut ranked: Vec<ConfigScore> = configs
        .iter()
        .map(|c| evaluate_config(c, &prepared, &fold, folds))
        .collect();
    ranked.sort_by(compare_scores);
    Ok(TuneOutcome {
        ranked,
        pruned,
        fold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_shape() {
        let Grid::Product { weights, taus } = Grid::default_search() else {
            panic!()
        };
        assert_eq!(weights.len(), 11);
        assert_eq!(weights[3], 0.3);
        assert_eq!(taus.len(), 13);
        assert_eq!(taus.first(), Some(&0.30));
        assert_eq!(taus.last(), Some(&0.90));
        assert!(taus.contains(&0.85));
        assert!(Grid::default_search()
            .configs()
            .contains(&SimilarityConfig::SUBMITTED));
    }

    #[test]
    fn folds_partition_evenly() {
        for n in [5, 10, 13, 101] {
            let f = fold_assignment(n, 5, 3);
            let mut sizes = [0usize; 5];
            for &k in &f {
                sizes[k] += 1;
            }
            let (lo, hi) = (sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
            assert!(hi - lo <= 1, "{sizes:?}");
            assert_eq!(sizes.iter().sum::<usize>(), n);
        }
        assert_eq!(fold_assignment(50, 5, 9), fold_assignment(50, 5, 9));
        assert_ne!(fold_assignment(50, 5, 9), fold_assignment(50, 5, 10));
    }

    #[test]
    fn pruning_rule() {
        assert!(can_link(&SimilarityConfig::SUBMITTED));
        let c = SimilarityConfig {
            lambda_emb: 0.0,
            lambda_glyph: 0.3,
            lambda_pinyin: 0.0,
            lambda_pos: 0.0,
            tau: 0.3,
        };
        assert!(!can_link(&c));
    }

    #[test]
    fn ranking_order() {
        let s = |mean, max, tau| ConfigScore {
            config: SimilarityConfig {
                tau,
                ..SimilarityConfig::SUBMITTED
            },
            fold_f1: vec![],
            mean_f1: mean,
            max_f1: max,
        };
        let mut v = [
            s(0.5, 0.6, 0.5),
            s(0.7, 0.7, 0.5),
            s(0.5, 0.9, 0.5),
            s(0.5, 0.6, 0.4),
        ];
        v.sort_by(compare_scores);
        let order: Vec<(f64, f64, f64)> = v
            .iter()
            .map(|c| (c.mean_f1, c.max_f1, c.config.tau))
            .collect();
        assert_eq!(
            order,
            vec![
                (0.7, 0.7, 0.5),
                (0.5, 0.9, 0.5),
                (0.5, 0.6, 0.4),
                (0.5, 0.6, 0.5)
            ]
        );
    }

    #[test]
    fn plan_validation() {
        let grid = Grid::Explicit(vec![SimilarityConfig::SUBMITTED]);
        assert!(plan(10, &grid, 1, true).is_err());
        assert!(plan(3, &grid, 5, true).is_err());
        assert_eq!(plan(10, &grid, 5, true).unwrap().0.len(), 1);
    }
}
