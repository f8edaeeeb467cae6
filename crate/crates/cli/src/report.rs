//! Evaluation reports and the viewer bundle built from them.

use std::collections::BTreeMap;

use anyhow::{bail, Result};
use serde::{Deserialize, Serialize};

use segproj_core::eval::{
    alignment_stats, classify_error, correct_token_flags, outcome_pattern, paired_significance,
    token_f1, ErrorType, F1Counts,
};
use segproj_core::{CharAlignment, SentencePair, Tokenization};

/// Version of the bundle layout the viewer understands.
pub const SCHEMA_VERSION: u32 = 1;

pub const SIGNIFICANCE_METHOD: &str = "paired bootstrap over sentences, two-sided";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub correct: usize,
    pub predicted: usize,
    pub gold: usize,
}

impl From<F1Counts> for Counts {
    fn from(c: F1Counts) -> Self {
        Self {
            correct: c.correct,
            predicted: c.predicted,
            gold: c.gold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageSummary {
    pub source_coverage: f64,
    pub target_coverage: f64,
    pub links: usize,
    pub residual_links: usize,
    pub non_monotone_residual: usize,
    pub non_monotone_residual_fraction: f64,
    pub sentences_with_non_monotone_residual: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSummary {
    pub name: String,
    pub counts: Counts,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Sentences per error label, every label present.
    pub error_counts: BTreeMap<String, usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alignment: Option<CoverageSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub system_a: String,
    pub system_b: String,
    pub f1_difference: f64,
    pub p_value: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceSettings {
    pub method: String,
    pub resamples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemOutput {
    pub system: String,
    pub tokens: Vec<String>,
    /// One flag per predicted token: its span is also a gold span.
    pub correct: Vec<bool>,
    pub counts: Counts,
    pub error_type: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceRecord {
    pub id: String,
    pub source: String,
    pub target: String,
    pub gold_tokens: Vec<String>,
    pub systems: Vec<SystemOutput>,
    /// `g`/`b` per system in report order: prediction equals gold or not.
    pub pattern: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub systems: Vec<SystemSummary>,
    pub comparisons: Vec<Comparison>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub significance: Option<SignificanceSettings>,
    pub sentences: Vec<SentenceRecord>,
}

/// One system's predictions, parallel to the gold corpus.
#[derive(Debug, Clone)]
pub struct SystemInput {
    pub name: String,
    pub predictions: Vec<Tokenization>,
    pub alignments: Option<Vec<CharAlignment>>,
}

pub fn build_report(
    corpus: &[SentencePair],
    systems: &[SystemInput],
    compare: Option<(usize, u64)>,
) -> Result<EvalReport> {
    let gold: Vec<&Tokenization> = corpus
        .iter()
        .map(|p| p.gold_tokens())
        .collect::<segproj_core::Result<_>>()?;
    let mut per_system_counts: Vec<Vec<F1Counts>> = Vec::with_capacity(systems.len());
    let mut per_system_labels: Vec<Vec<ErrorType>> = Vec::with_capacity(systems.len());
    for s in systems {
        if s.predictions.len() != corpus.len() {
            bail!(
                "system {} has {} predictions for {} sentences",
                s.name,
                s.predictions.len(),
                corpus.len()
            );
        }
        let counts = s
            .predictions
            .iter()
            .zip(&gold)
            .map(|(p, g)| token_f1(p, g))
            .collect::<segproj_core::Result<Vec<_>>>()?;
        let labels = s
            .predictions
            .iter()
            .zip(&gold)
            .map(|(p, g)| classify_error(p, g))
            .collect::<segproj_core::Result<Vec<_>>>()?;
        per_system_counts.push(counts);
        per_system_labels.push(labels);
    }

    let summaries = systems
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let total: F1Counts = per_system_counts[k].iter().copied().sum();
            let mut error_counts: BTreeMap<String, usize> = ErrorType::ALL
                .iter()
                .map(|e| (e.as_str().to_string(), 0))
                .collect();
            for label in &per_system_labels[k] {
                *error_counts.entry(label.as_str().to_string()).or_default() += 1;
            }
            let alignment = s.alignments.as_ref().map(|a| {
                let st = alignment_stats(a.iter());
                CoverageSummary {
                    source_coverage: st.source_coverage(),
                    target_coverage: st.target_coverage(),
                    links: st.links,
                    residual_links: st.residual_links,
                    non_monotone_residual: st.non_monotone_residual,
                    non_monotone_residual_fraction: st.non_monotone_residual_fraction(),
                    sentences_with_non_monotone_residual: st.sentences_with_non_monotone_residual,
                }
            });
            SystemSummary {
                name: s.name.clone(),
                counts: total.into(),
                precision: total.precision(),
                recall: total.recall(),
                f1: total.f1(),
                error_counts,
                alignment,
            }
        })
        .collect();

    let mut comparisons = Vec::new();
    if let Some((resamples, seed)) = compare {
        for a in 0..systems.len() {
            for b in a + 1..systems.len() {
                let sig = paired_significance(
                    &per_system_counts[a],
                    &per_system_counts[b],
                    resamples,
                    seed,
                )?;
                comparisons.push(Comparison {
                    system_a: systems[a].name.clone(),
                    system_b: systems[b].name.clone(),
                    f1_difference: sig.observed_difference,
                    p_value: sig.p_value,
                    degenerate: sig.degenerate,
                });
            }
        }
    }

    let sentences = corpus
        .iter()
        .enumerate()
        .map(|(n, pair)| {
            let g = gold[n];
            let mut outputs = Vec::with_capacity(systems.len());
            for (k, s) in systems.iter().enumerate() {
                let pred = &s.predictions[n];
                outputs.push(SystemOutput {
                    system: s.name.clone(),
                    tokens: pred.token_strings(&pair.source),
                    correct: correct_token_flags(pred, g)?,
                    counts: per_system_counts[k][n].into(),
                    error_type: per_system_labels[k][n].as_str().to_string(),
                });
            }
            let pattern =
                outcome_pattern(per_system_labels.iter().map(|l| l[n] == ErrorType::None));
            Ok(SentenceRecord {
                id: pair.id.clone(),
                source: pair.source.to_string(),
                target: pair.target.to_string(),
                gold_tokens: g.token_strings(&pair.source),
                systems: outputs,
                pattern,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(EvalReport {
        systems: summaries,
        comparisons,
        significance: compare.map(|(resamples, seed)| SignificanceSettings {
            method: SIGNIFICANCE_METHOD.to_string(),
            resamples,
            seed,
        }),
        sentences,
    })
}

/// Console table: one row per system, then the pairwise tests.
pub fn render_table(report: &EvalReport) -> String {
    let mut out = format!(
        "{:<16} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8}\n",
        "system", "P", "R", "F1", "correct", "pred", "gold"
    );
    for s in &report.systems {
        out.push_str(&format!(
            "{:<16} {:>8.4} {:>8.4} {:>8.4} {:>8} {:>8} {:>8}\n",
            s.name,
            s.precision,
            s.recall,
            s.f1,
            s.counts.correct,
            s.counts.predicted,
            s.counts.gold
        ));
    }
    for c in &report.comparisons {
        let flag = if c.degenerate { " (degenerate)" } else { "" };
        out.push_str(&format!(
            "{} vs {}: dF1 = {:+.4}, p = {:.4}{flag}\n",
            c.system_a, c.system_b, c.f1_difference, c.p_value
        ));
    }
    out
}

/// What the viewer loads: the report plus a version stamp.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViewerBundle {
    pub schema_version: u32,
    pub generator: String,
    pub record_count: usize,
    pub report: EvalReport,
}

impl ViewerBundle {
    pub fn new(report: EvalReport) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            generator: concat!("segproj ", env!("CARGO_PKG_VERSION")).to_string(),
            record_count: report.sentences.len(),
            report,
        }
    }
}
