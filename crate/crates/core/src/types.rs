//! Domain types shared by every stage: sentences, the two views of a
//! segmentation, character alignments and sentence pairs.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// A sentence indexed by Unicode scalar value, never by byte.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sentence {
    chars: Vec<char>,
}

impl Sentence {
    pub fn new(text: &str) -> Self {
        Self {
            chars: text.chars().collect(),
        }
    }

    pub fn from_chars(chars: Vec<char>) -> Self {
        Self { chars }
    }

    pub fn chars(&self) -> &[char] {
        &self.chars
    }

    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }

    pub fn char_at(&self, index: usize) -> Option<char> {
        self.chars.get(index).copied()
    }

    /// Text covered by `span`.
    pub fn slice(&self, span: Span) -> String {
        self.chars[span.start..span.end].iter().collect()
    }
}

impl From<&str> for Sentence {
    fn from(text: &str) -> Self {
        Self::new(text)
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.chars
            .iter()
            .try_for_each(|c| fmt::Write::write_char(f, *c))
    }
}

/// Half-open character range `start..end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub const fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    pub const fn len(&self) -> usize {
        self.end - self.start
    }

    pub const fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    /// Index of the last character in the span.
    pub const fn last(&self) -> usize {
        self.end - 1
    }
}

/// A segmentation as ordered, contiguous, non-empty spans that cover the
/// sentence exactly once.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Tokenization {
    len: usize,
    spans: Vec<Span>,
}

impl Tokenization {
    /// Validates that `spans` partition `0..len` from left to right.
    pub fn new(len: usize, spans: Vec<Span>) -> Result<Self> {
        let mut cursor = 0;
        for (k, span) in spans.iter().enumerate() {
            if span.is_empty() {
                return Err(Error::Coverage(format!("token {k} is empty")));
            }
            if span.start != cursor {
                return Err(Error::Coverage(format!(
                    "token {k} starts at {} but previous token ended at {cursor}",
                    span.start
                )));
            }
            cursor = span.end;
        }
        if cursor != len {
            return Err(Error::Coverage(format!(
                "tokens cover {cursor} of {len} characters"
            )));
        }
        Ok(Self { len, spans })
    }

    /// Builds the tokenization from consecutive token lengths.
    pub fn from_lengths(lengths: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut start = 0;
        let mut spans = Vec::new();
        for n in lengths {
            spans.push(Span::new(start, start + n));
            start += n;
        }
        Self::new(start, spans)
    }

    /// Builds the tokenization from token strings, which must concatenate to `sentence`.
    pub fn from_tokens<S: AsRef<str>>(sentence: &Sentence, tokens: &[S]) -> Result<Self> {
        let mut spans = Vec::with_capacity(tokens.len());
        let mut start = 0;
        let mut joined = String::new();
        for token in tokens {
            let token = token.as_ref();
            let n = token.chars().count();
            spans.push(Span::new(start, start + n));
            start += n;
            joined.push_str(token);
        }
        if joined.chars().ne(sentence.chars().iter().copied()) {
            return Err(Error::TokenTextMismatch {
                expected: sentence.to_string(),
                found: joined,
            });
        }
        Self::new(sentence.len(), spans)
    }

    /// One token per character.
    pub fn singletons(len: usize) -> Self {
        Self {
            len,
            spans: (0..len).map(|i| Span::new(i, i + 1)).collect(),
        }
    }

    /// The whole sentence as a single token (empty for an empty sentence).
    pub fn whole(len: usize) -> Self {
        let spans = if len == 0 {
            Vec::new()
        } else {
            alloc::vec![Span::new(0, len)]
        };
        Self { len, spans }
    }

    /// Character length of the covered sentence.
    pub fn char_len(&self) -> usize {
        self.len
    }

    pub fn spans(&self) -> &[Span] {
        &self.spans
    }

    pub fn num_tokens(&self) -> usize {
        self.spans.len()
    }

    pub fn token_strings(&self, sentence: &Sentence) -> Vec<String> {
        self.spans.iter().map(|s| sentence.slice(*s)).collect()
    }

    /// Word-final indices of every token.
    pub fn to_boundaries(&self) -> BoundarySet {
        BoundarySet {
            indices: self.spans.iter().map(Span::last).collect(),
        }
    }

    /// Inverse of [`Tokenization::to_boundaries`].
    pub fn from_boundaries(boundaries: &BoundarySet, len: usize) -> Result<Self> {
        if len == 0 {
            return match boundaries.indices.iter().next() {
                None => Ok(Self::default()),
                Some(&index) => Err(Error::IndexOutOfRange { index, len }),
            };
        }
        if let Some(&index) = boundaries.indices.iter().find(|&&i| i >= len) {
            return Err(Error::IndexOutOfRange { index, len });
        }
        if !boundaries.contains(len - 1) {
            return Err(Error::MissingFinalBoundary { len });
        }
        let mut start = 0;
        let spans = boundaries
            .indices
            .iter()
            .map(|&b| {
                let span = Span::new(start, b + 1);
                start = b + 1;
                span
            })
            .collect();
        Ok(Self { len, spans })
    }

    /// Boundary flags: `flags[i]` is true when character `i` ends a token.
    pub fn boundary_flags(&self) -> Vec<bool> {
        let mut flags = alloc::vec![false; self.len];
        for span in &self.spans {
            flags[span.last()] = true;
        }
        flags
    }

    /// Inverse of [`Tokenization::boundary_flags`]; the final index is forced on.
    pub fn from_boundary_flags(mut flags: Vec<bool>) -> Self {
        let len = flags.len();
        if let Some(last) = flags.last_mut() {
            *last = true;
        }
        let mut spans = Vec::new();
        let mut start = 0;
        for (i, _) in flags.iter().enumerate().filter(|(_, &f)| f) {
            spans.push(Span::new(start, i + 1));
            start = i + 1;
        }
        Self { len, spans }
    }
}

/// A segmentation as the set of word-final character indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct BoundarySet {
    indices: BTreeSet<usize>,
}

impl BoundarySet {
    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        Self {
            indices: indices.into_iter().collect(),
        }
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.contains(&index)
    }

    pub fn insert(&mut self, index: usize) -> bool {
        self.indices.insert(index)
    }

    pub fn remove(&mut self, index: usize) -> bool {
        self.indices.remove(&index)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// `tokens [AB][C]` over `"ABC"` gives `{1, 2}`.
pub fn tokens_to_boundaries(tokens: &Tokenization) -> BoundarySet {
    tokens.to_boundaries()
}

pub fn boundaries_to_tokens(boundaries: &BoundarySet, sentence: &Sentence) -> Result<Tokenization> {
    Tokenization::from_boundaries(boundaries, sentence.len())
}

/// Which stage produced a link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Provenance {
    Anchor,
    Residual,
    Ibm,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Anchor => "anchor",
            Self::Residual => "residual",
            Self::Ibm => "ibm",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "anchor" => Some(Self::Anchor),
            "residual" => Some(Self::Residual),
            "ibm" => Some(Self::Ibm),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Link {
    pub source: usize,
    pub target: usize,
    pub provenance: Provenance,
}

/// One-to-one character links between a source and a target sentence.
///
/// Indices on either side that take part in no link are the unresolved sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CharAlignment {
    source_partner: Vec<Option<usize>>,
    target_link: Vec<Option<(usize, Provenance)>>,
}

impl CharAlignment {
    /// Empty alignment: everything unresolved.
    pub fn new(source_len: usize, target_len: usize) -> Self {
        Self {
            source_partner: alloc::vec![None; source_len],
            target_link: alloc::vec![None; target_len],
        }
    }

    pub fn from_links(
        source_len: usize,
        target_len: usize,
        links: impl IntoIterator<Item = Link>,
    ) -> Result<Self> {
        let mut alignment = Self::new(source_len, target_len);
        for link in links {
            alignment.add_link(link.source, link.target, link.provenance)?;
        }
        Ok(alignment)
    }

    pub fn source_len(&self) -> usize {
        self.source_partner.len()
    }

    pub fn target_len(&self) -> usize {
        self.target_link.len()
    }

    pub fn add_link(&mut self, source: usize, target: usize, provenance: Provenance) -> Result<()> {
        if source >= self.source_len() {
            return Err(Error::IndexOutOfRange {
                index: source,
                len: self.source_len(),
            });
        }
        if target >= self.target_len() {
            return Err(Error::IndexOutOfRange {
                index: target,
                len: self.target_len(),
            });
        }
        if let Some(j) = self.source_partner[source] {
            return Err(Error::InvalidAlignment(format!(
                "source {source} already linked to target {j}"
            )));
        }
        if let Some((i, _)) = self.target_link[target] {
            return Err(Error::InvalidAlignment(format!(
                "target {target} already linked to source {i}"
            )));
        }
        self.source_partner[source] = Some(target);
        self.target_link[target] = Some((source, provenance));
        Ok(())
    }

    /// Target index linked to source `i`.
    pub fn source_partner(&self, i: usize) -> Option<usize> {
        self.source_partner.get(i).copied().flatten()
    }

    /// Source index linked to target `j`.
    pub fn target_partner(&self, j: usize) -> Option<usize> {
        self.target_link.get(j).copied().flatten().map(|(i, _)| i)
    }

    pub fn is_source_aligned(&self, i: usize) -> bool {
        self.source_partner(i).is_some()
    }

    pub fn is_target_aligned(&self, j: usize) -> bool {
        self.target_partner(j).is_some()
    }

    /// Links in ascending target order.
    pub fn links(&self) -> impl Iterator<Item = Link> + '_ {
        self.target_link
            .iter()
            .enumerate()
            .filter_map(|(target, l)| {
                l.map(|(source, provenance)| Link {
                    source,
                    target,
                    provenance,
                })
            })
    }

    pub fn num_links(&self) -> usize {
        self.target_link.iter().filter(|l| l.is_some()).count()
    }

    pub fn unresolved_source(&self) -> Vec<usize> {
        (0..self.source_len())
            .filter(|&i| self.source_partner[i].is_none())
            .collect()
    }

    pub fn unresolved_target(&self) -> Vec<usize> {
        (0..self.target_len())
            .filter(|&j| self.target_link[j].is_none())
            .collect()
    }

    /// Checks the invariants that depend on the sentence text: lengths match
    /// and anchor links join identical characters.
    pub fn validate(&self, source: &Sentence, target: &Sentence) -> Result<()> {
        if self.source_len() != source.len() || self.target_len() != target.len() {
            return Err(Error::InvalidAlignment(format!(
                "alignment is {}x{} but sentences are {}x{}",
                self.source_len(),
                self.target_len(),
                source.len(),
                target.len()
            )));
        }
        for link in self.links() {
            if link.provenance == Provenance::Anchor
                && source.chars()[link.source] != target.chars()[link.target]
            {
                return Err(Error::InvalidAlignment(format!(
                    "anchor ({}, {}) joins {:?} and {:?}",
                    link.source,
                    link.target,
                    source.chars()[link.source],
                    target.chars()[link.target]
                )));
            }
        }
        Ok(())
    }
}

/// A noisy source with its cleaner target and the segmentations attached to them.
#[derive(Debug, Clone, PartialEq)]
pub struct SentencePair {
    pub id: String,
    pub source: Sentence,
    pub target: Sentence,
    pub source_tokens_initial: Option<Tokenization>,
    pub target_tokens: Option<Tokenization>,
    pub gold_source_tokens: Option<Tokenization>,
}

impl SentencePair {
    pub fn new(id: impl Into<String>, source: &str, target: &str) -> Self {
        Self {
            id: id.into(),
            source: Sentence::new(source),
            target: Sentence::new(target),
            source_tokens_initial: None,
            target_tokens: None,
            gold_source_tokens: None,
        }
    }

    /// Checks that every attached tokenization covers its sentence.
    pub fn validate(&self) -> Result<()> {
        let check = |t: &Option<Tokenization>, s: &Sentence| match t {
            Some(t) if t.char_len() != s.len() => Err(Error::SentenceMismatch {
                left: t.char_len(),
                right: s.len(),
            }),
            _ => Ok(()),
        };
        check(&self.source_tokens_initial, &self.source)?;
        check(&self.target_tokens, &self.target)?;
        check(&self.gold_source_tokens, &self.source)
    }

    pub fn target_tokens(&self) -> Result<&Tokenization> {
        self.target_tokens
            .as_ref()
            .ok_or_else(|| Error::MissingTokenization(self.id.clone()))
    }

    pub fn initial_source_tokens(&self) -> Result<&Tokenization> {
        self.source_tokens_initial
            .as_ref()
            .ok_or_else(|| Error::MissingTokenization(self.id.clone()))
    }

    pub fn gold_tokens(&self) -> Result<&Tokenization> {
        self.gold_source_tokens
            .as_ref()
            .ok_or_else(|| Error::MissingGold(self.id.clone()))
    }
}
