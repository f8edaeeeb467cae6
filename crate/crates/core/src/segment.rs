//! Word segmenters used to produce the initial source segmentation and the
//! target segmentation when a corpus does not carry them.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::types::{Sentence, Tokenization};

pub trait Segmenter {
    fn segment(&self, sentence: &Sentence) -> Tokenization;
}

/// Greedy longest match against a word list; characters not starting any
/// dictionary word become single-character tokens.
#[derive(Debug, Clone, Default)]
pub struct DictionarySegmenter {
    words: BTreeSet<Vec<char>>,
    max_len: usize,
}

impl DictionarySegmenter {
    pub fn new<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut seg = Self::default();
        for w in words {
            seg.insert(w.as_ref());
        }
        seg
    }

    pub fn insert(&mut self, word: &str) {
        let chars: Vec<char> = word.trim().chars().collect();
        if chars.is_empty() {
            return;
        }
        self.max_len = self.max_len.max(chars.len());
        self.words.insert(chars);
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

impl Segmenter for DictionarySegmenter {
    fn segment(&self, sentence: &Sentence) -> Tokenization {
        let chars = sentence.chars();
        let mut lengths = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let longest = (2..=self.max_len.min(chars.len() - i))
                .rev()
                .find(|&l| self.words.contains(&chars[i..i + l]))
                .unwrap_or(1);
            lengths.push(longest);
            i += longest;
        }
        Tokenization::from_lengths(lengths).expect("lengths are positive")
    }
}
