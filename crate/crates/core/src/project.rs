//! The projection operator: transfer target word boundaries to the source
//! through a fixed character alignment.
//!
//! Starting from the initial source segmentation:
//!
//! 1. a target boundary between `t[j]` and `t[j+1]` is copied to the source
//!    when both are linked and their partners are `p` and `p + 1`;
//! 2. a multi-character target token whose characters are all linked to a
//!    contiguous source span of the same length clears every boundary inside
//!    that span;
//! 3. the final source character always ends a token.
//!
//! Insertions run before removals. Everything else keeps the initial
//! segmentation. Runs in `O(m + n)` time with `O(m)` extra space.

use crate::error::{Error, Result};
use crate::types::{CharAlignment, Sentence, Span, Tokenization};

pub fn project(
    source: &Sentence,
    initial: &Tokenization,
    target_tokens: &Tokenization,
    alignment: &CharAlignment,
) -> Result<Tokenization> {
    if initial.char_len() != source.len() {
        return Err(Error::Coverage(alloc::format!(
            "initial segmentation covers {} characters, source has {}",
            initial.char_len(),
            source.len()
        )));
    }
    if alignment.source_len() != source.len() || alignment.target_len() != target_tokens.char_len()
    {
        return Err(Error::InvalidAlignment(alloc::format!(
            "alignment is {}x{}, inputs are {}x{}",
            alignment.source_len(),
            alignment.target_len(),
            source.len(),
            target_tokens.char_len()
        )));
    }

    let mut boundaries = initial.boundary_flags();

    for span in target_tokens.spans() {
        let j = span.last();
        if let Some(p) = adjacent_partner(alignment, j) {
            boundaries[p] = true;
        }
    }

    for span in target_tokens.spans() {
        if let Some(licensed) = licensed_span(alignment, *span) {
            for flag in &mut boundaries[licensed.start..licensed.last()] {
                *flag = false;
            }
        }
    }

    Ok(Tokenization::from_boundary_flags(boundaries))
}

/// Source index `p` when target `j` and `j + 1` link to `p` and `p + 1`.
fn adjacent_partner(alignment: &CharAlignment, j: usize) -> Option<usize> {
    let p = alignment.target_partner(j)?;
    let q = alignment.target_partner(j + 1)?;
    (q == p + 1).then_some(p)
}

/// The source span matched by a multi-character target token, if every
/// character is linked and the partners fill a span of the token's length.
fn licensed_span(alignment: &CharAlignment, token: Span) -> Option<Span> {
    if token.len() < 2 {
        return None;
    }
    let mut lo = usize::MAX;
    let mut hi = 0;
    for j in token.start..token.end {
        let p = alignment.target_partner(j)?;
        lo = lo.min(p);
        hi = hi.max(p);
    }
    // Partners are distinct, so a span of equal length is filled exactly.
    (hi - lo + 1 == token.len()).then_some(Span::new(lo, hi + 1))
}

/// A projection output that breaks one of the operator's guarantees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// The output does not partition the source into contiguous tokens.
    Coverage,
    /// Output token text differs from the source.
    SourceChanged,
    /// A boundary at `index` was added without an adjacent-aligned target boundary.
    UnlicensedInsertion { index: usize },
    /// A boundary at `index` was removed outside every length-matched span.
    UnlicensedRemoval { index: usize },
}

/// Checks `output` against the guarantees of [`project`] without re-running it.
pub fn check_projection(
    source: &Sentence,
    initial: &Tokenization,
    target_tokens: &Tokenization,
    alignment: &CharAlignment,
    output: &Tokenization,
) -> core::result::Result<(), Violation> {
    if output.char_len() != source.len()
        || Tokenization::new(source.len(), output.spans().to_vec()).is_err()
    {
        return Err(Violation::Coverage);
    }
    let text: alloc::string::String = output.token_strings(source).concat();
    if text.chars().ne(source.chars().iter().copied()) {
        return Err(Violation::SourceChanged);
    }
    let before = initial.boundary_flags();
    let after = output.boundary_flags();

    let target_final = target_tokens.boundary_flags();
    let inserted_ok = |b: usize| {
        (0..target_final.len().saturating_sub(1)).any(|j| {
            target_final[j]
                && alignment.target_partner(j) == Some(b)
                && alignment.target_partner(j + 1) == Some(b + 1)
        })
    };
    let removed_ok = |b: usize| {
        target_tokens
            .spans()
            .iter()
            .filter(|t| t.len() >= 2)
            .any(|t| {
                let partners: Option<alloc::vec::Vec<usize>> = (t.start..t.end)
                    .map(|j| alignment.target_partner(j))
                    .collect();
                let Some(mut partners) = partners else {
                    return false;
                };
                partners.sort_unstable();
                let contiguous = partners.windows(2).all(|w| w[1] == w[0] + 1);
                contiguous && partners[0] <= b && b < partners[partners.len() - 1]
            })
    };
    for b in 0..source.len() {
        if after[b] && !before[b] && !inserted_ok(b) {
            return Err(Violation::UnlicensedInsertion { index: b });
        }
        if before[b] && !after[b] && !removed_ok(b) {
            return Err(Violation::UnlicensedRemoval { index: b });
        }
    }
    Ok(())
}
