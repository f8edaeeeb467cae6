//! IBM Model 2 style character-to-token alignment baseline.
//!
//! Every source character `s_j` picks a target token index `a_j` in `0..=K`,
//! `0` being NULL, with probability `d(i | j, m, K) * p(s_j | w_i)`.
//! Parameters are fitted by EM, decoded by per-character argmax and finally
//! expanded to one-to-one character links inside the chosen token.
//!
//! The positional table is stored as a distribution over `i` for every
//! `(j, m, K)` context. Emissions are floored at [`EMISSION_FLOOR`]; the floor
//! is part of the M-step (the floored maximizer is computed exactly) so the
//! corpus likelihood never decreases between iterations.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::residual::ResidualScorer;
use crate::types::{CharAlignment, Provenance, Sentence, SentencePair, Tokenization};

pub const EMISSION_FLOOR: f64 = 1e-6;

/// Index of the NULL token in every target sentence and in the token vocabulary.
pub const NULL: usize = 0;

/// Emission distribution of one token type over the source character vocabulary.
///
/// Characters without an explicit entry share `default`.
#[derive(Debug, Clone, PartialEq)]
pub struct Emission {
    pub explicit: BTreeMap<usize, f64>,
    pub default: f64,
}

impl Emission {
    fn uniform(vocab: usize) -> Self {
        Self {
            explicit: BTreeMap::new(),
            default: 1.0 / vocab as f64,
        }
    }

    pub fn prob(&self, c: usize) -> f64 {
        self.explicit.get(&c).copied().unwrap_or(self.default)
    }

    /// Total mass over a vocabulary of `vocab` characters.
    pub fn total(&self, vocab: usize) -> f64 {
        let explicit: f64 = self.explicit.values().sum();
        explicit + (vocab - self.explicit.len()) as f64 * self.default
    }

    /// Maximizes `sum_c n_c ln p_c` subject to `p_c >= floor` and unit mass.
    ///
    /// The solution is `p_c = max(floor, n_c / lambda)`; lambda is found by
    /// flooring the smallest counts until the remaining ones clear the floor.
    fn from_counts(counts: &BTreeMap<usize, f64>, vocab: usize, floor: f64) -> Self {
        let mut free: Vec<(usize, f64)> = counts
            .iter()
            .filter(|(_, &n)| n > 0.0)
            .map(|(&c, &n)| (c, n))
            .collect();
        if free.is_empty() {
            return Self::uniform(vocab);
        }
        free.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let mut mass: f64 = free.iter().map(|(_, n)| n).sum();
        let lambda = loop {
            let floored = (vocab - free.len()) as f64;
            let lambda = mass / (1.0 - floored * floor);
            match free.last() {
                Some(&(_, n)) if free.len() > 1 && n / lambda <= floor => {
                    mass -= n;
                    free.pop();
                }
                _ => break lambda,
            }
        };
        Self {
            explicit: free.into_iter().map(|(c, n)| (c, n / lambda)).collect(),
            default: floor,
        }
    }
}

/// Trained parameters plus the log-likelihood trace of training.
#[derive(Debug, Clone, PartialEq)]
pub struct IbmModel {
    chars: Vec<char>,
    char_index: BTreeMap<char, usize>,
    tokens: Vec<String>,
    token_index: BTreeMap<String, usize>,
    emission: Vec<Emission>,
    distortion: BTreeMap<(usize, usize), Vec<f64>>,
    iterations: usize,
    log_likelihood: Vec<f64>,
}

struct Encoded {
    source: Vec<usize>,
    // token types, NULL first
    tokens: Vec<usize>,
}

impl IbmModel {
    /// Source character vocabulary, sorted.
    pub fn chars(&self) -> &[char] {
        &self.chars
    }

    /// Target token vocabulary; entry 0 is NULL (the empty string).
    pub fn token_types(&self) -> &[String] {
        &self.tokens
    }

    pub fn emission(&self, token_type: usize) -> &Emission {
        &self.emission[token_type]
    }

    /// Distortion rows keyed by `(m, K)`: entry `j * (K + 1) + i` is `d(i | j, m, K)`.
    pub fn distortion_tables(&self) -> &BTreeMap<(usize, usize), Vec<f64>> {
        &self.distortion
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Corpus log-likelihood before each iteration and after the last one.
    pub fn log_likelihood_trace(&self) -> &[f64] {
        &self.log_likelihood
    }

    /// Rebuilds a model from serialized parts, checking normalization.
    pub fn from_parts(
        chars: Vec<char>,
        tokens: Vec<String>,
        emission: Vec<Emission>,
        distortion: BTreeMap<(usize, usize), Vec<f64>>,
        iterations: usize,
        log_likelihood: Vec<f64>,
    ) -> Result<Self> {
        if tokens.first().map(String::as_str) != Some("") {
            return Err(Error::InvalidConfig(
                "token vocabulary must start with NULL".into(),
            ));
        }
        if emission.len() != tokens.len() {
            return Err(Error::InvalidConfig(format!(
                "{} emission rows for {} token types",
                emission.len(),
                tokens.len()
            )));
        }
        let vocab = chars.len();
        for (t, e) in emission.iter().enumerate() {
            if e.explicit.keys().any(|&c| c >= vocab) || (e.total(vocab) - 1.0).abs() > 1e-6 {
                return Err(Error::InvalidConfig(format!(
                    "emission row {t} is not a distribution"
                )));
            }
        }
        for (&(m, k), row) in &distortion {
            if row.len() != m * (k + 1) {
                return Err(Error::InvalidConfig(format!(
                    "distortion ({m}, {k}) has wrong size"
                )));
            }
            for j in 0..m {
                let s: f64 = row[j * (k + 1)..(j + 1) * (k + 1)].iter().sum();
                if (s - 1.0).abs() > 1e-6 {
                    return Err(Error::InvalidConfig(format!(
                        "distortion ({m}, {k}) row {j} sums to {s}"
                    )));
                }
            }
        }
        let char_index = chars.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let token_index = tokens
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Ok(Self {
            chars,
            char_index,
            tokens,
            token_index,
            emission,
            distortion,
            iterations,
            log_likelihood,
        })
    }

    /// `p(c | w)` for a known character id and token type id.
    fn emit(&self, token_type: Option<usize>, c: usize) -> f64 {
        match token_type {
            Some(t) => self.emission[t].prob(c),
            None => 1.0 / self.chars.len() as f64,
        }
    }

    /// `d(i | j, m, K)`; contexts unseen in training are uniform.
    pub fn distortion(&self, i: usize, j: usize, m: usize, k: usize) -> f64 {
        match self.distortion.get(&(m, k)) {
            Some(row) if j < m && i <= k => row[j * (k + 1) + i],
            _ => 1.0 / (k + 1) as f64,
        }
    }

    fn encode(
        &self,
        source: &Sentence,
        target_tokens: &[String],
    ) -> (Vec<Option<usize>>, Vec<Option<usize>>) {
        let src = source
            .chars()
            .iter()
            .map(|c| self.char_index.get(c).copied())
            .collect();
        let tokens = core::iter::once(Some(NULL))
            .chain(
                target_tokens
                    .iter()
                    .map(|t| self.token_index.get(t).copied()),
            )
            .collect();
        (src, tokens)
    }
}

fn target_token_strings(pair: &SentencePair) -> Result<Vec<String>> {
    Ok(pair.target_tokens()?.token_strings(&pair.target))
}

/// Fits the model with `iterations` rounds of EM.
pub fn ibm_train(corpus: &[SentencePair], iterations: usize) -> Result<IbmModel> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut chars: Vec<char> = corpus
        .iter()
        .flat_map(|p| p.source.chars().iter().copied())
        .collect();
    chars.sort_unstable();
    chars.dedup();
    let char_index: BTreeMap<char, usize> =
        chars.iter().enumerate().map(|(i, &c)| (c, i)).collect();

    let mut tokens = vec![String::new()];
    let mut token_index: BTreeMap<String, usize> = BTreeMap::new();
    let mut encoded = Vec::with_capacity(corpus.len());
    for pair in corpus {
        let mut ids = vec![NULL];
        for t in target_token_strings(pair)? {
            let next = tokens.len();
            let id = *token_index.entry(t.clone()).or_insert(next);
            if id == next {
                tokens.push(t);
            }
            ids.push(id);
        }
        let source = pair.source.chars().iter().map(|c| char_index[c]).collect();
        encoded.push(Encoded {
            source,
            tokens: ids,
        });
    }

    let vocab = chars.len().max(1);
    let floor = EMISSION_FLOOR.min(0.5 / vocab as f64);
    let mut distortion = BTreeMap::new();
    for e in &encoded {
        let (m, k) = (e.source.len(), e.tokens.len() - 1);
        distortion
            .entry((m, k))
            .or_insert_with(|| vec![1.0 / (k + 1) as f64; m * (k + 1)]);
    }
    let mut model = IbmModel {
        chars,
        char_index,
        emission: vec![Emission::uniform(vocab); tokens.len()],
        tokens,
        token_index,
        distortion,
        iterations: 0,
        log_likelihood: Vec::new(),
    };

    for _ in 0..iterations {
        let (ll, emit_counts, dist_counts) = expectation(&model, &encoded);
        model.log_likelihood.push(ll);
        for (t, counts) in emit_counts.iter().enumerate() {
            model.emission[t] = Emission::from_counts(counts, vocab, floor);
        }
        for ((m, k), counts) in dist_counts {
            let row = model
                .distortion
                .get_mut(&(m, k))
                .expect("context seen in corpus");
            for j in 0..m {
                let slice = &counts[j * (k + 1)..(j + 1) * (k + 1)];
                let total: f64 = slice.iter().sum();
                for i in 0..=k {
                    row[j * (k + 1) + i] = if total > 0.0 {
                        slice[i] / total
                    } else {
                        1.0 / (k + 1) as f64
                    };
                }
            }
        }
        model.iterations += 1;
    }
    let (ll, _, _) = expectation(&model, &encoded);
    model.log_likelihood.push(ll);
    Ok(model)
}

type Counts = (
    f64,
    Vec<BTreeMap<usize, f64>>,
    BTreeMap<(usize, usize), Vec<f64>>,
);

fn expectation(model: &IbmModel, corpus: &[Encoded]) -> Counts {
    let mut ll = 0.0;
    let mut emit: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); model.tokens.len()];
    let mut dist: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
    let mut post = Vec::new();
    for e in corpus {
        let (m, k) = (e.source.len(), e.tokens.len() - 1);
        let row = &model.distortion[&(m, k)];
        let counts = dist.entry((m, k)).or_insert_with(|| vec![0.0; m * (k + 1)]);
        for (j, &c) in e.source.iter().enumerate() {
            post.clear();
            post.extend(
                e.tokens
                    .iter()
                    .enumerate()
                    .map(|(i, &t)| row[j * (k + 1) + i] * model.emission[t].prob(c)),
            );
            let total: f64 = post.iter().sum();
            ll += libm::log(total);
            for (i, &p) in post.iter().enumerate() {
                let q = p / total;
                *emit[e.tokens[i]].entry(c).or_insert(0.0) += q;
                counts[j * (k + 1) + i] += q;
            }
        }
    }
    (ll, emit, dist)
}

/// Most probable token index per source character; ties go to the lowest
/// index and characters outside the training vocabulary go to NULL.
pub fn ibm_decode(model: &IbmModel, pair: &SentencePair) -> Result<Vec<usize>> {
    let tokens = target_token_strings(pair)?;
    let (m, k) = (pair.source.len(), tokens.len());
    let (src, types) = model.encode(&pair.source, &tokens);
    Ok(src
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let Some(c) = *c else { return NULL };
            let mut best = (NULL, f64::NEG_INFINITY);
            for (i, &ty) in types.iter().enumerate() {
                let p = model.distortion(i, j, m, k) * model.emit(ty, c);
                if p > best.1 {
                    best = (i, p);
                }
            }
            best.0
        })
        .collect())
}

/// Turns token assignments into one-to-one character links.
///
/// A source character assigned to token `i > 0` takes the leftmost unused
/// identical character of that token, or failing that the unused character
/// with the highest residual score (leftmost on ties). NULL assignments and
/// characters whose token is exhausted stay unresolved.
pub fn ibm_expand(
    target_tokens: &Tokenization,
    assignments: &[usize],
    scorer: &ResidualScorer<'_>,
) -> Result<CharAlignment> {
    let (m, n) = (scorer.source.len(), scorer.target.len());
    if assignments.len() != m {
        return Err(Error::LengthMismatch {
            left: assignments.len(),
            right: m,
        });
    }
    if target_tokens.char_len() != n {
        return Err(Error::SentenceMismatch {
            left: target_tokens.char_len(),
            right: n,
        });
    }
    let spans = target_tokens.spans();
    let mut alignment = CharAlignment::new(m, n);
    for (j, &a) in assignments.iter().enumerate() {
        if a == NULL {
            continue;
        }
        let span = *spans.get(a - 1).ok_or(Error::IndexOutOfRange {
            index: a,
            len: spans.len() + 1,
        })?;
        let c = scorer.source.chars()[j];
        let unused = (span.start..span.end).filter(|&t| !alignment.is_target_aligned(t));
        let identical = unused.clone().find(|&t| scorer.target.chars()[t] == c);
        let choice = identical.or_else(|| {
            let mut best: Option<(usize, f64)> = None;
            for t in unused {
                let s = scorer.score(j, t);
                if best.is_none_or(|(_, b)| s > b) {
                    best = Some((t, s));
                }
            }
            best.map(|(t, _)| t)
        });
        if let Some(t) = choice {
            alignment.add_link(j, t, Provenance::Ibm)?;
        }
    }
    Ok(alignment)
}
