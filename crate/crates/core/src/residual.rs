//! Step two: similarity-scored alignment of characters left unresolved by
//! anchoring.
//!
//! Each unresolved target character, in target order, picks the best unused
//! unresolved source character under a weighted sum of four features (glyph,
//! pinyin, position, embedding). The link is kept only when the score is
//! strictly greater than the threshold. Anchor links are never touched.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::edit::levenshtein;
use crate::error::{Error, Result};
use crate::types::{CharAlignment, Provenance, Sentence};

/// Symmetric character-pair glyph similarity. Absent pairs score 0.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GlyphTable {
    scores: BTreeMap<(char, char), f64>,
}

impl GlyphTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Stores `score` for both `(a, b)` and `(b, a)`; a later insert overwrites.
    pub fn insert(&mut self, a: char, b: char, score: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&score) {
            return Err(Error::InvalidConfig(format!(
                "glyph score {score} for ({a}, {b}) outside [0, 1]"
            )));
        }
        self.scores.insert(Self::key(a, b), score);
        Ok(())
    }

    pub fn get(&self, a: char, b: char) -> f64 {
        self.scores.get(&Self::key(a, b)).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    fn key(a: char, b: char) -> (char, char) {
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }
}

/// Character to tone-marked pinyin, e.g. `'妈' -> "ma1"`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PinyinTable {
    readings: BTreeMap<char, String>,
}

impl PinyinTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, c: char, pinyin: impl Into<String>) -> Result<()> {
        let pinyin = pinyin.into();
        if pinyin.is_empty() {
            return Err(Error::InvalidConfig(format!("empty pinyin for {c:?}")));
        }
        self.readings.insert(c, pinyin);
        Ok(())
    }

    pub fn get(&self, c: char) -> Option<&str> {
        self.readings.get(&c).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.readings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.readings.is_empty()
    }
}

/// Lookup tables shared read-only across sentences.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SimilarityTables {
    pub glyph: GlyphTable,
    pub pinyin: PinyinTable,
}

/// Per-character contextual vectors for one sentence pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairEmbeddings {
    source: Vec<Vec<f64>>,
    target: Vec<Vec<f64>>,
}

impl PairEmbeddings {
    /// Requires one vector per character on each side, all of one dimension.
    pub fn new(
        source_len: usize,
        target_len: usize,
        source: Vec<Vec<f64>>,
        target: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if source.len() != source_len || target.len() != target_len {
            return Err(Error::InvalidEmbedding(format!(
                "got {}x{} vectors for a {source_len}x{target_len} pair",
                source.len(),
                target.len()
            )));
        }
        let dim = source.first().or(target.first()).map(Vec::len);
        if let Some(dim) = dim {
            if source.iter().chain(&target).any(|v| v.len() != dim) {
                return Err(Error::InvalidEmbedding(format!(
                    "vectors are not all of dimension {dim}"
                )));
            }
        }
        Ok(Self { source, target })
    }

    pub fn source(&self) -> &[Vec<f64>] {
        &self.source
    }

    pub fn target(&self) -> &[Vec<f64>] {
        &self.target
    }
}

/// Interpolation weights and link threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityConfig {
    pub lambda_emb: f64,
    pub lambda_glyph: f64,
    pub lambda_pinyin: f64,
    pub lambda_pos: f64,
    pub tau: f64,
}

impl SimilarityConfig {
    /// Dominant glyph weight, secondary position, minor embedding, no pinyin.
    pub const SUBMITTED: Self = Self {
        lambda_emb: 0.1,
        lambda_glyph: 0.6,
        lambda_pinyin: 0.0,
        lambda_pos: 0.3,
        tau: 0.85,
    };

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("lambda_emb", self.lambda_emb),
            ("lambda_glyph", self.lambda_glyph),
            ("lambda_pinyin", self.lambda_pinyin),
            ("lambda_pos", self.lambda_pos),
            ("tau", self.tau),
        ];
        for (name, value) in fields {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidConfig(format!(
                    "{name} = {value} outside [0, 1]"
                )));
            }
        }
        Ok(())
    }

    pub fn weight_sum(&self) -> f64 {
        self.lambda_emb + self.lambda_glyph + self.lambda_pinyin + self.lambda_pos
    }
}

impl Default for SimilarityConfig {
    fn default() -> Self {
        Self::SUBMITTED
    }
}

pub fn sim_glyph(a: char, b: char, table: &GlyphTable) -> f64 {
    table.get(a, b)
}

/// `1 - Lev(py(a), py(b)) / max(|py(a)|, |py(b)|)`; 0 when either is unmapped.
pub fn sim_pinyin(a: char, b: char, table: &PinyinTable) -> f64 {
    let (Some(pa), Some(pb)) = (table.get(a), table.get(b)) else {
        return 0.0;
    };
    let pa: Vec<char> = pa.chars().collect();
    let pb: Vec<char> = pb.chars().collect();
    let longest = pa.len().max(pb.len());
    1.0 - levenshtein(&pa, &pb) as f64 / longest as f64
}

/// `1 - |i - j| / max(m, n)`.
pub fn sim_pos(i: usize, j: usize, source_len: usize, target_len: usize) -> f64 {
    1.0 - i.abs_diff(j) as f64 / source_len.max(target_len) as f64
}

/// Cosine of the two position vectors; may be negative. Zero vectors score 0.
pub fn sim_emb(i: usize, j: usize, embeddings: Option<&PairEmbeddings>) -> Result<f64> {
    let e = embeddings.ok_or(Error::MissingEmbedding)?;
    let (u, v) = match (e.source.get(i), e.target.get(j)) {
        (Some(u), Some(v)) => (u, v),
        _ => return Err(Error::MissingEmbedding),
    };
    Ok(cosine(u, v))
}

pub fn cosine(u: &[f64], v: &[f64]) -> f64 {
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu = libm::sqrt(u.iter().map(|a| a * a).sum());
    let nv = libm::sqrt(v.iter().map(|a| a * a).sum());
    if nu == 0.0 || nv == 0.0 {
        0.0
    } else {
        dot / (nu * nv)
    }
}

/// Raw feature values for one candidate pair.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Features {
    pub emb: f64,
    pub glyph: f64,
    pub pinyin: f64,
    pub pos: f64,
}

impl Features {
    pub fn interpolate(&self, config: &SimilarityConfig) -> f64 {
        config.lambda_emb * self.emb
            + config.lambda_glyph * self.glyph
            + config.lambda_pinyin * self.pinyin
            + config.lambda_pos * self.pos
    }
}

/// Everything needed to score candidate pairs of one sentence pair.
#[derive(Debug, Clone, Copy)]
pub struct ResidualScorer<'a> {
    pub source: &'a Sentence,
    pub target: &'a Sentence,
    pub tables: &'a SimilarityTables,
    pub embeddings: Option<&'a PairEmbeddings>,
    pub config: &'a SimilarityConfig,
}

impl ResidualScorer<'_> {
    pub fn features(&self, i: usize, j: usize) -> Features {
        let (a, b) = (self.source.chars()[i], self.target.chars()[j]);
        Features {
            // Missing embeddings contribute nothing.
            emb: sim_emb(i, j, self.embeddings).unwrap_or(0.0),
            glyph: sim_glyph(a, b, &self.tables.glyph),
            pinyin: sim_pinyin(a, b, &self.tables.pinyin),
            pos: sim_pos(i, j, self.source.len(), self.target.len()),
        }
    }

    pub fn score(&self, i: usize, j: usize) -> f64 {
        self.features(i, j).interpolate(self.config)
    }
}

/// Extends `anchors` with residual links scored by `scorer`.
pub fn align_residual(anchors: &CharAlignment, scorer: &ResidualScorer<'_>) -> CharAlignment {
    select_residual(anchors, scorer.config.tau, |i, j| scorer.score(i, j))
}

/// Greedy target-order selection shared by [`align_residual`] and the tuner.
///
/// For each unresolved target `j` (ascending), the unresolved, not yet used
/// source with the highest `score(i, j)` is linked if that score exceeds
/// `tau`. Ties go to the lowest source index. A target that fails the
/// threshold consumes nothing.
pub fn select_residual(
    anchors: &CharAlignment,
    tau: f64,
    mut score: impl FnMut(usize, usize) -> f64,
) -> CharAlignment {
    let mut out = anchors.clone();
    let mut free: Vec<usize> = anchors.unresolved_source();
    if free.is_empty() {
        return out;
    }
    for j in anchors.unresolved_target() {
        let mut best: Option<(usize, f64)> = None;
        for (slot, &i) in free.iter().enumerate() {
            let s = score(i, j);
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((slot, s));
            }
        }
        let Some((slot, s)) = best else { break };
        if s > tau {
            let i = free.remove(slot);
            out.add_link(i, j, Provenance::Residual)
                .expect("both indices are unresolved");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anchor::align_anchors;
    use alloc::vec;

    const EPS: f64 = 1e-12;

    #[test]
    fn glyph_lookup_and_symmetry() {
        let mut t = GlyphTable::new();
        t.insert('困', '团', 0.8).unwrap();
        assert_eq!(sim_glyph('困', '团', &t), 0.8);
        assert_eq!(sim_glyph('团', '困', &t), 0.8);
        assert_eq!(sim_glyph('困', '因', &t), 0.0);
        assert!(t.insert('a', 'b', 1.5).is_err());
    }

    #[test]
    fn pinyin_similarity() {
        let mut t = PinyinTable::new();
        t.insert('妈', "ma1").unwrap();
        t.insert('麻', "ma2").unwrap();
        t.insert('马', "ma1").unwrap();
        assert_eq!(sim_pinyin('妈', '马', &t), 1.0);
        assert!((sim_pinyin('妈', '麻', &t) - (1.0 - 1.0 / 3.0)).abs() < EPS);
        assert_eq!(sim_pinyin('妈', 'x', &t), 0.0);
    }

    #[test]
    fn position_similarity() {
        assert_eq!(sim_pos(3, 3, 5, 7), 1.0);
        assert!((sim_pos(0, 4, 5, 5) - 0.2).abs() < EPS);
        assert!((sim_pos(2, 0, 3, 6) - (1.0 - 2.0 / 6.0)).abs() < EPS);
    }

    #[test]
    fn embedding_similarity() {
        let e = PairEmbeddings::new(
            3,
            1,
            vec![vec![1.0, 0.0], vec![0.0, 2.0], vec![-3.0, 0.0]],
            vec![vec![2.0, 0.0]],
        )
        .unwrap();
        assert!((sim_emb(0, 0, Some(&e)).unwrap() - 1.0).abs() < EPS);
        assert_eq!(sim_emb(1, 0, Some(&e)).unwrap(), 0.0);
        assert!((sim_emb(2, 0, Some(&e)).unwrap() + 1.0).abs() < EPS);
        assert_eq!(sim_emb(0, 0, None), Err(Error::MissingEmbedding));
        assert!(PairEmbeddings::new(2, 1, vec![vec![1.0]], vec![vec![1.0]]).is_err());
        assert!(PairEmbeddings::new(1, 1, vec![vec![1.0]], vec![vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn interpolation_arithmetic() {
        let c = SimilarityConfig::default();
        let all = Features {
            emb: 1.0,
            glyph: 1.0,
            pinyin: 1.0,
            pos: 1.0,
        };
        assert!((all.interpolate(&c) - 1.0).abs() < EPS);
        let no_emb = Features { emb: 0.0, ..all };
        assert!((no_emb.interpolate(&c) - 0.9).abs() < EPS);
        assert_eq!(Features::default().interpolate(&c), 0.0);
    }

    fn residual_links(
        src: &str,
        tgt: &str,
        tables: &SimilarityTables,
        config: &SimilarityConfig,
    ) -> Vec<(usize, usize)> {
        let (s, t) = (Sentence::new(src), Sentence::new(tgt));
        let anchors = align_anchors(&s, &t);
        let scorer = ResidualScorer {
            source: &s,
            target: &t,
            tables,
            embeddings: None,
            config,
        };
        align_residual(&anchors, &scorer)
            .links()
            .filter(|l| l.provenance == Provenance::Residual)
            .map(|l| (l.source, l.target))
            .collect()
    }

    #[test]
    fn nothing_unresolved_is_identity() {
        let s = Sentence::new("ABC");
        let anchors = align_anchors(&s, &s);
        let tables = SimilarityTables::default();
        let config = SimilarityConfig::default();
        let scorer = ResidualScorer {
            source: &s,
            target: &s,
            tables: &tables,
            embeddings: None,
            config: &config,
        };
        assert_eq!(align_residual(&anchors, &scorer), anchors);
    }

    #[test]
    fn glyph_threshold_on_substitution() {
        // 0.6 g + 0.3 > 0.85 iff g > 0.91666...
        let config = SimilarityConfig::default();
        for (g, linked) in [(0.9, false), (0.916, false), (0.92, true), (1.0, true)] {
            let mut tables = SimilarityTables::default();
            tables.glyph.insert('困', '团', g).unwrap();
            let links = residual_links("旅行困", "旅行团", &tables, &config);
            assert_eq!(!links.is_empty(), linked, "g = {g}");
        }
    }

    #[test]
    fn earlier_target_wins_contested_source() {
        // Targets X(1) and Y(2) both prefer source P(1); X comes first.
        let mut tables = SimilarityTables::default();
        tables.glyph.insert('P', 'X', 1.0).unwrap();
        tables.glyph.insert('P', 'Y', 1.0).unwrap();
        tables.glyph.insert('Q', 'Y', 1.0).unwrap();
        let config = SimilarityConfig::default();
        let links = residual_links("APQ", "AXY", &tables, &config);
        assert_eq!(links, vec![(1, 1), (2, 2)]);

        // Without a fallback for Y it stays unresolved.
        let mut tables = SimilarityTables::default();
        tables.glyph.insert('P', 'X', 1.0).unwrap();
        tables.glyph.insert('P', 'Y', 1.0).unwrap();
        let links = residual_links("APQ", "AXY", &tables, &config);
        assert_eq!(links, vec![(1, 1)]);
    }

    #[test]
    fn argmax_ties_prefer_lowest_source() {
        let mut tables = SimilarityTables::default();
        tables.glyph.insert('P', 'X', 1.0).unwrap();
        tables.glyph.insert('Q', 'X', 1.0).unwrap();
        let config = SimilarityConfig {
            lambda_pos: 0.0,
            tau: 0.5,
            ..SimilarityConfig::default()
        };
        let links = residual_links("PQ", "X", &tables, &config);
        assert_eq!(links, vec![(0, 0)]);
    }

    #[test]
    fn residual_links_may_cross_anchors() {
        // Source "PAB" vs target "ABX": P is far from X but the glyph table joins them.
        let mut tables = SimilarityTables::default();
        tables.glyph.insert('P', 'X', 1.0).unwrap();
        let config = SimilarityConfig {
            tau: 0.5,
            ..SimilarityConfig::default()
        };
        let links = residual_links("PAB", "ABX", &tables, &config);
        assert_eq!(links, vec![(0, 2)]);
    }

    #[test]
    fn lowering_the_threshold_can_drop_a_link() {
        // A failed target consumes nothing, so at 0.85 the second target gets
        // source 0; at 0.5 the first target takes it and the second finds nothing.
        let empty = CharAlignment::from_links(2, 2, []).unwrap();
        let table = [[0.6, 0.9], [0.1, 0.1]];
        let links = |tau: f64| -> Vec<(usize, usize)> {
            select_residual(&empty, tau, |i, j| table[i][j])
                .links()
                .map(|l| (l.source, l.target))
                .collect()
        };
        assert_eq!(links(0.85), vec![(0, 1)]);
        assert_eq!(links(0.5), vec![(0, 0)]);
    }

    #[test]
    fn config_validation() {
        assert!(SimilarityConfig::default().validate().is_ok());
        assert!(SimilarityConfig {
            tau: 1.2,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(SimilarityConfig {
            lambda_pos: -0.1,
            ..Default::default()
        }
        .validate()
        .is_err());
    }
}
