//! Word-boundary recovery for noisy Chinese text.
//!
//! A noisy source sentence is aligned character-by-character to a cleaner,
//! segmented target. The target's word boundaries are then projected back onto
//! the source through that alignment, without touching the source string.
//!
//! The pipeline has three interchangeable alignment routes feeding one
//! projection operator:
//!
//! * [`anchor::align_anchors`]: identical-character links along a minimum edit path.
//! * [`residual::align_residual`]: similarity-scored links for the characters anchoring left over.
//! * [`ibm`]: a token-to-character IBM Model 2 style baseline.
//!
//! [`project::project`] consumes any of them. The remaining modules generate
//! synthetic benchmarks ([`noise`]), score systems ([`eval`]), tune the residual
//! scorer ([`tune`]), supply initial segmentations ([`segment`]) and pick a
//! single reference out of several corrections ([`reference`]).
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![deny(missing_debug_implementations)]

extern crate alloc;

pub mod anchor;
pub mod edit;
pub mod error;
pub mod eval;
pub mod ibm;
pub mod noise;
pub mod project;
pub mod reference;
pub mod residual;
pub mod segment;
pub mod tune;
pub mod types;

pub use error::{Error, Result};
pub use types::{
    BoundarySet, CharAlignment, Link, Provenance, Sentence, SentencePair, Span, Tokenization,
};
