//! Step one: identical-character anchors.
//!
//! An edit path is computed between source and target and only its exact
//! matches become links. Substitutions are left unresolved for the residual
//! step.

use crate::edit::{edit_path, EditOp};
use crate::types::{CharAlignment, Provenance, Sentence};

pub fn align_anchors(source: &Sentence, target: &Sentence) -> CharAlignment {
    let mut alignment = CharAlignment::new(source.len(), target.len());
    for op in edit_path(source.chars(), target.chars()) {
        if let EditOp::Match { source, target } = op {
            alignment
                .add_link(source, target, Provenance::Anchor)
                .expect("edit path visits each index once");
        }
    }
    alignment
}
