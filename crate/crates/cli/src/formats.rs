//! On-disk formats: JSON Lines corpora, TSV similarity tables, JSON configs
//! and models. Every loader reports the offending line.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use segproj_core::ibm::{Emission, IbmModel};
use segproj_core::noise::{
    EditDistribution, EditKind, Perturbation, PerturbationLog, SegmentedSentence,
};
use segproj_core::residual::{GlyphTable, PairEmbeddings, PinyinTable, SimilarityConfig};
use segproj_core::{CharAlignment, Link, Provenance, Sentence, SentencePair, Tokenization};

/// Non-empty lines of a text file with their 1-based line numbers.
fn lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut out = Vec::new();
    for (k, line) in BufReader::new(file).lines().enumerate() {
        let line =
            line.with_context(|| format!("{}:{}: unreadable line", path.display(), k + 1))?;
        if !line.trim().is_empty() {
            out.push((k + 1, line));
        }
    }
    Ok(out)
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<(usize, T)>> {
    lines(path)?
        .into_iter()
        .map(|(n, line)| {
            serde_json::from_str(&line)
                .map(|v| (n, v))
                .map_err(|e| anyhow!("{}:{n}: {e}", path.display()))
        })
        .collect()
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = create(path)?;
    for item in items {
        serde_json::to_writer(&mut w, &item)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    serde_json::from_reader(BufReader::new(file))
        .with_context(|| format!("{}: invalid JSON", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(file))
}

/// One line of a sentence-pair corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairRecord {
    pub id: String,
    pub source: String,
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_tokens: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_tokens: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_source_tokens: Option<Vec<String>>,
}

impl PairRecord {
    pub fn into_pair(self) -> segproj_core::Result<SentencePair> {
        let mut pair = SentencePair::new(self.id, &self.source, &self.target);
        let tok = |s: &Sentence, t: Option<Vec<String>>| {
            t.map(|t| Tokenization::from_tokens(s, &t)).transpose()
        };
        pair.source_tokens_initial = tok(&pair.source, self.source_tokens)?;
        pair.target_tokens = tok(&pair.target, self.target_tokens)?;
        pair.gold_source_tokens = tok(&pair.source, self.gold_source_tokens)?;
        Ok(pair)
    }

    pub fn from_pair(pair: &SentencePair) -> Self {
        Self {
            id: pair.id.clone(),
            source: pair.source.to_string(),
            target: pair.target.to_string(),
            source_tokens: pair
                .source_tokens_initial
                .as_ref()
                .map(|t| t.token_strings(&pair.source)),
            target_tokens: pair
                .target_tokens
                .as_ref()
                .map(|t| t.token_strings(&pair.target)),
            gold_source_tokens: pair
                .gold_source_tokens
                .as_ref()
                .map(|t| t.token_strings(&pair.source)),
        }
    }
}

fn check_unique<'a>(path: &Path, ids: impl IntoIterator<Item = (usize, &'a str)>) -> Result<()> {
    let mut seen = BTreeSet::new();
    for (n, id) in ids {
        if !seen.insert(id) {
            bail!("{}:{n}: duplicate id {id:?}", path.display());
        }
    }
    Ok(())
}

pub fn read_corpus(path: &Path) -> Result<Vec<SentencePair>> {
    let records: Vec<(usize, PairRecord)> = read_jsonl(path)?;
    check_unique(path, records.iter().map(|(n, r)| (*n, r.id.as_str())))?;
    records
        .into_iter()
        .map(|(n, r)| {
            r.into_pair()
                .map_err(|e| anyhow!("{}:{n}: {e}", path.display()))
        })
        .collect()
}

pub fn write_corpus(path: &Path, pairs: &[SentencePair]) -> Result<()> {
    write_jsonl(path, pairs.iter().map(PairRecord::from_pair))
}

/// Segmented plain text: one sentence per line, tokens separated by single spaces.
/// Sentence ids are the 1-based line numbers.
pub fn read_segmented(path: &Path) -> Result<Vec<SegmentedSentence>> {
    lines(path)?
        .into_iter()
        .map(|(n, line)| {
            let tokens: Vec<&str> = line.trim().split(' ').collect();
            if tokens.iter().any(|t| t.is_empty()) {
                bail!(
                    "{}:{n}: empty token (tokens must be separated by single spaces)",
                    path.display()
                );
            }
            SegmentedSentence::from_tokens(n.to_string(), &tokens)
                .map_err(|e| anyhow!("{}:{n}: {e}", path.display()))
        })
        .collect()
}

pub fn read_dictionary(path: &Path) -> Result<Vec<String>> {
    Ok(lines(path)?
        .into_iter()
        .map(|(_, l)| l.trim().to_string())
        .collect())
}

fn single_char(path: &Path, n: usize, field: &str) -> Result<char> {
    let mut chars = field.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Ok(c),
        _ => bail!(
            "{}:{n}: expected a single character, found {field:?}",
            path.display()
        ),
    }
}

/// `charA<TAB>charB<TAB>score`; lines starting with `#` are comments.
pub fn read_glyph_table(path: &Path) -> Result<GlyphTable> {
    let mut table = GlyphTable::new();
    for (n, line) in lines(path)? {
        if line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            bail!(
                "{}:{n}: expected 3 tab-separated columns, found {}",
                path.display(),
                cols.len()
            );
        }
        let a = single_char(path, n, cols[0])?;
        let b = single_char(path, n, cols[1])?;
        let score: f64 = cols[2]
            .trim()
            .parse()
            .map_err(|e| anyhow!("{}:{n}: bad score: {e}", path.display()))?;
        table
            .insert(a, b, score)
            .map_err(|e| anyhow!("{}:{n}: {e}", path.display()))?;
    }
    Ok(table)
}

pub fn write_glyph_table(path: &Path, rows: &[(char, char, f64)]) -> Result<()> {
    let mut w = create(path)?;
    for (a, b, s) in rows {
        writeln!(w, "{a}\t{b}\t{s}")?;
    }
    w.flush()?;
    Ok(())
}

/// `char<TAB>pinyin`, tone digit appended to the syllable.
pub fn read_pinyin_table(path: &Path) -> Result<PinyinTable> {
    let mut table = PinyinTable::new();
    for (n, line) in lines(path)? {
        if line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 2 {
            bail!(
                "{}:{n}: expected 2 tab-separated columns, found {}",
                path.display(),
                cols.len()
            );
        }
        let c = single_char(path, n, cols[0])?;
        table
            .insert(c, cols[1].trim())
            .map_err(|e| anyhow!("{}:{n}: {e}", path.display()))?;
    }
    Ok(table)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingRecord {
    pub id: String,
    pub source_vectors: Vec<Vec<f64>>,
    pub target_vectors: Vec<Vec<f64>>,
}

/// Embeddings keyed by pair id, checked against the corpus they belong to.
/// Records for ids outside the corpus are ignored.
pub fn read_embeddings(
    path: &Path,
    corpus: &[SentencePair],
) -> Result<BTreeMap<String, PairEmbeddings>> {
    let records: Vec<(usize, EmbeddingRecord)> = read_jsonl(path)?;
    check_unique(path, records.iter().map(|(n, r)| (*n, r.id.as_str())))?;
    let lengths: BTreeMap<&str, (usize, usize)> = corpus
        .iter()
        .map(|p| (p.id.as_str(), (p.source.len(), p.target.len())))
        .collect();
    let mut dim = None;
    let mut out = BTreeMap::new();
    for (n, r) in records {
        let Some(&(m, k)) = lengths.get(r.id.as_str()) else {
            continue;
        };
        if let Some(d) = r
            .source_vectors
            .first()
            .or(r.target_vectors.first())
            .map(Vec::len)
        {
            if *dim.get_or_insert(d) != d {
                bail!(
                    "{}:{n}: vector dimension {d} differs from earlier records",
                    path.display()
                );
            }
        }
        let e = PairEmbeddings::new(m, k, r.source_vectors, r.target_vectors)
            .map_err(|e| anyhow!("{}:{n}: {e}", path.display()))?;
        out.insert(r.id, e);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default = "defaults::emb")]
    pub lambda_emb: f64,
    #[serde(default = "defaults::glyph")]
    pub lambda_glyph: f64,
    #[serde(default = "defaults::pinyin")]
    pub lambda_pinyin: f64,
    #[serde(default = "defaults::pos")]
    pub lambda_pos: f64,
    #[serde(default = "defaults::tau")]
    pub tau: f64,
}

mod defaults {
    use segproj_core::residual::SimilarityConfig;
    const C: SimilarityConfig = SimilarityConfig::SUBMITTED;
    pub fn emb() -> f64 {
        C.lambda_emb
    }
    pub fn glyph() -> f64 {
        C.lambda_glyph
    }
    pub fn pinyin() -> f64 {
        C.lambda_pinyin
    }
    pub fn pos() -> f64 {
        C.lambda_pos
    }
    pub fn tau() -> f64 {
        C.tau
    }
}

impl From<ConfigFile> for SimilarityConfig {
    fn from(c: ConfigFile) -> Self {
        Self {
            lambda_emb: c.lambda_emb,
            lambda_glyph: c.lambda_glyph,
            lambda_pinyin: c.lambda_pinyin,
            lambda_pos: c.lambda_pos,
            tau: c.tau,
        }
    }
}

impl From<SimilarityConfig> for ConfigFile {
    fn from(c: SimilarityConfig) -> Self {
        Self {
            lambda_emb: c.lambda_emb,
            lambda_glyph: c.lambda_glyph,
            lambda_pinyin: c.lambda_pinyin,
            lambda_pos: c.lambda_pos,
            tau: c.tau,
        }
    }
}

pub fn read_config(path: &Path) -> Result<SimilarityConfig> {
    let file: ConfigFile = read_json(path)?;
    let config = SimilarityConfig::from(file);
    config
        .validate()
        .with_context(|| format!("{}: invalid config", path.display()))?;
    Ok(config)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkRecord {
    pub source: usize,
    pub target: usize,
    pub provenance: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlignmentRecord {
    pub id: String,
    pub links: Vec<LinkRecord>,
    pub unresolved_source: Vec<usize>,
    pub unresolved_target: Vec<usize>,
}

impl AlignmentRecord {
    pub fn new(id: &str, a: &CharAlignment) -> Self {
        Self {
            id: id.to_string(),
            links: a
                .links()
                .map(|l| LinkRecord {
                    source: l.source,
                    target: l.target,
                    provenance: l.provenance.as_str().to_string(),
                })
                .collect(),
            unresolved_source: a.unresolved_source(),
            unresolved_target: a.unresolved_target(),
        }
    }

    /// Rebuilds the alignment for `pair`, checking links and the unresolved lists.
    pub fn to_alignment(&self, pair: &SentencePair) -> segproj_core::Result<CharAlignment> {
        let mut links = Vec::with_capacity(self.links.len());
        for l in &self.links {
            let provenance = Provenance::parse(&l.provenance).ok_or_else(|| {
                segproj_core::Error::InvalidAlignment(format!(
                    "unknown provenance {:?}",
                    l.provenance
                ))
            })?;
            links.push(Link {
                source: l.source,
                target: l.target,
                provenance,
            });
        }
        let a = CharAlignment::from_links(pair.source.len(), pair.target.len(), links)?;
        a.validate(&pair.source, &pair.target)?;
        if a.unresolved_source() != self.unresolved_source
            || a.unresolved_target() != self.unresolved_target
        {
            return Err(segproj_core::Error::InvalidAlignment(
                "unresolved lists disagree with the links".into(),
            ));
        }
        Ok(a)
    }
}

/// Alignments for every pair of `corpus`, in corpus order.
pub fn read_alignments(path: &Path, corpus: &[SentencePair]) -> Result<Vec<CharAlignment>> {
    let records: Vec<(usize, AlignmentRecord)> = read_jsonl(path)?;
    check_unique(path, records.iter().map(|(n, r)| (*n, r.id.as_str())))?;
    let by_id: BTreeMap<&str, (usize, &AlignmentRecord)> = records
        .iter()
        .map(|(n, r)| (r.id.as_str(), (*n, r)))
        .collect();
    let missing: Vec<&str> = corpus
        .iter()
        .map(|p| p.id.as_str())
        .filter(|id| !by_id.contains_key(id))
        .collect();
    if !missing.is_empty() {
        bail!(
            "{}: no alignment for ids {}",
            path.display(),
            missing.join(", ")
        );
    }
    corpus
        .iter()
        .map(|p| {
            let (n, r) = by_id[p.id.as_str()];
            r.to_alignment(p)
                .map_err(|e| anyhow!("{}:{n}: {e}", path.display()))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictionRecord {
    pub id: String,
    pub recovered_tokens: Vec<String>,
}

/// Predictions for every pair of `corpus`, in corpus order. Missing ids are a
/// single error that lists all of them.
pub fn read_predictions(path: &Path, corpus: &[SentencePair]) -> Result<Vec<Tokenization>> {
    let records: Vec<(usize, PredictionRecord)> = read_jsonl(path)?;
    check_unique(path, records.iter().map(|(n, r)| (*n, r.id.as_str())))?;
    let by_id: BTreeMap<&str, (usize, &PredictionRecord)> = records
        .iter()
        .map(|(n, r)| (r.id.as_str(), (*n, r)))
        .collect();
    let missing: Vec<&str> = corpus
        .iter()
        .map(|p| p.id.as_str())
        .filter(|id| !by_id.contains_key(id))
        .collect();
    if !missing.is_empty() {
        bail!(
            "{}: missing predictions for ids {}",
            path.display(),
            missing.join(", ")
        );
    }
    corpus
        .iter()
        .map(|p| {
            let (n, r) = by_id[p.id.as_str()];
            Tokenization::from_tokens(&p.source, &r.recovered_tokens)
                .map_err(|e| anyhow!("{}:{n}: {e}", path.display()))
        })
        .collect()
}

pub fn write_predictions(
    path: &Path,
    corpus: &[SentencePair],
    tokens: &[Tokenization],
) -> Result<()> {
    write_jsonl(
        path,
        corpus.iter().zip(tokens).map(|(p, t)| PredictionRecord {
            id: p.id.clone(),
            recovered_tokens: t.token_strings(&p.source),
        }),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmissionRecord {
    pub default: f64,
    pub explicit: BTreeMap<char, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionRecord {
    pub m: usize,
    pub k: usize,
    /// `rows[j][i]` is `d(i | j, m, K)`.
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vocab {
    pub chars: Vec<char>,
    /// Token types; the first entry is the empty NULL token.
    pub tokens: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IbmModelFile {
    pub vocab: Vocab,
    pub emission: Vec<EmissionRecord>,
    pub distortion: Vec<DistortionRecord>,
    pub iterations: usize,
    pub log_likelihood_trace: Vec<f64>,
}

impl IbmModelFile {
    pub fn from_model(model: &IbmModel) -> Self {
        let chars = model.chars().to_vec();
        Self {
            emission: (0..model.token_types().len())
                .map(|t| {
                    let e = model.emission(t);
                    EmissionRecord {
                        default: e.default,
                        explicit: e.explicit.iter().map(|(&c, &p)| (chars[c], p)).collect(),
                    }
                })
                .collect(),
            distortion: model
                .distortion_tables()
                .iter()
                .map(|(&(m, k), flat)| DistortionRecord {
                    m,
                    k,
                    rows: flat.chunks(k + 1).map(<[f64]>::to_vec).collect(),
                })
                .collect(),
            vocab: Vocab {
                chars,
                tokens: model.token_types().to_vec(),
            },
            iterations: model.iterations(),
            log_likelihood_trace: model.log_likelihood_trace().to_vec(),
        }
    }

    pub fn into_model(self) -> Result<IbmModel> {
        let index: BTreeMap<char, usize> = self
            .vocab
            .chars
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, i))
            .collect();
        if index.len() != self.vocab.chars.len() {
            bail!("duplicate characters in vocabulary");
        }
        let mut emission = Vec::with_capacity(self.emission.len());
        for e in self.emission {
            let mut explicit = BTreeMap::new();
            for (c, p) in e.explicit {
                let id = *index.get(&c).ok_or_else(|| {
                    anyhow!("emission for character {c:?} outside the vocabulary")
                })?;
                explicit.insert(id, p);
            }
            emission.push(Emission {
                explicit,
                default: e.default,
            });
        }
        let mut distortion = BTreeMap::new();
        for d in self.distortion {
            if d.rows.iter().any(|r| r.len() != d.k + 1) {
                bail!(
                    "distortion ({}, {}) rows must have {} entries",
                    d.m,
                    d.k,
                    d.k + 1
                );
            }
            distortion.insert((d.m, d.k), d.rows.concat());
        }
        Ok(IbmModel::from_parts(
            self.vocab.chars,
            self.vocab.tokens,
            emission,
            distortion,
            self.iterations,
            self.log_likelihood_trace,
        )?)
    }
}

/// Multi-reference entry for reference selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiReferenceRecord {
    pub id: String,
    pub source: String,
    pub targets: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_tokens: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_source_tokens: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateEmbeddingRecord {
    pub id: String,
    pub source_vectors: Vec<Vec<f64>>,
    pub candidate_vectors: Vec<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionRecord {
    pub substitution: f64,
    pub deletion: f64,
    pub insertion: f64,
}

impl From<EditDistribution> for DistributionRecord {
    fn from(d: EditDistribution) -> Self {
        Self {
            substitution: d.substitution,
            deletion: d.deletion,
            insertion: d.insertion,
        }
    }
}

impl From<DistributionRecord> for EditDistribution {
    fn from(d: DistributionRecord) -> Self {
        Self {
            substitution: d.substitution,
            deletion: d.deletion,
            insertion: d.insertion,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpCounts {
    pub substitution: usize,
    pub deletion: usize,
    pub insertion: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseManifest {
    pub ratio: f64,
    pub seed: u64,
    pub base_seed: u64,
    pub rng: String,
    pub distribution: DistributionRecord,
    pub pool_size: usize,
    pub total_chars: usize,
    pub operations: usize,
    pub op_counts: OpCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationRecord {
    pub sentence_id: String,
    pub kind: String,
    pub position: usize,
    pub original: Option<char>,
    pub replacement: Option<char>,
}

impl From<&Perturbation> for PerturbationRecord {
    fn from(p: &Perturbation) -> Self {
        Self {
            sentence_id: p.sentence_id.clone(),
            kind: p.kind.as_str().to_string(),
            position: p.position,
            original: p.original,
            replacement: p.replacement,
        }
    }
}

pub fn read_perturbations(path: &Path) -> Result<PerturbationLog> {
    let records: Vec<(usize, PerturbationRecord)> = read_jsonl(path)?;
    let mut entries = Vec::with_capacity(records.len());
    for (n, r) in records {
        let kind = EditKind::parse(&r.kind)
            .ok_or_else(|| anyhow!("{}:{n}: unknown edit kind {:?}", path.display(), r.kind))?;
        entries.push(Perturbation {
            sentence_id: r.sentence_id,
            kind,
            position: r.position,
            original: r.original,
            replacement: r.replacement,
        });
    }
    Ok(PerturbationLog { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use segproj_core::anchor::align_anchors;

    #[test]
    fn pair_record_round_trip() {
        let line = r#"{"id":"1","source":"旅行困","target":"旅行团","source_tokens":["旅行","困"],"target_tokens":["旅行团"]}"#;
        let r: PairRecord = serde_json::from_str(line).unwrap();
        let pair = r.clone().into_pair().unwrap();
        assert_eq!(pair.target_tokens.as_ref().unwrap().num_tokens(), 1);
        assert_eq!(PairRecord::from_pair(&pair), r);
    }

    #[test]
    fn tokens_must_concatenate_to_sentence() {
        let r: PairRecord = serde_json::from_str(
            r#"{"id":"1","source":"AB","target":"AB","source_tokens":["A","C"]}"#,
        )
        .unwrap();
        assert!(r.into_pair().is_err());
    }

    #[test]
    fn alignment_record_round_trip() {
        let pair = SentencePair::new("x", "AXC", "ABYC");
        let a = align_anchors(&pair.source, &pair.target);
        let r = AlignmentRecord::new("x", &a);
        assert_eq!(r.unresolved_target, vec![1, 2]);
        assert_eq!(r.to_alignment(&pair).unwrap(), a);
        let mut bad = r.clone();
        bad.unresolved_source.clear();
        assert!(bad.to_alignment(&pair).is_err());
    }

    #[test]
    fn config_defaults_to_submitted_setting() {
        let c: ConfigFile = serde_json::from_str("{}").unwrap();
        assert_eq!(SimilarityConfig::from(c), SimilarityConfig::SUBMITTED);
        let c: ConfigFile = serde_json::from_str(r#"{"tau": 0.5}"#).unwrap();
        assert_eq!(c.tau, 0.5);
        assert!(serde_json::from_str::<ConfigFile>(r#"{"tua": 0.5}"#).is_err());
    }
}
