//! Multi-segmentation data augmentation for machine translation corpora.
//!
//! The toolkit segments target-side text in several ways (characters, BPE at
//! different merge counts, dictionary matching, external tools), appends the
//! resulting parallel corpora into one training set, and scores translations
//! with a character n-gram F-score.
//!
//! Every segmentation is lossless: spaces are replaced by [`SENTINEL`] before
//! segmenting, so [`detokenize`] recovers the original sentence.

pub mod bpe;
pub mod chrf;
pub mod combine;
pub mod corpus;
mod error;
pub mod segment;

pub use bpe::{apply_bpe, learn_bpe, BpeConfig, BpeMode, MergePair, MergeTable};
pub use chrf::{chrf_score, corpus_chrf, ChrfConfig, ChrfReport, Whitespace};
pub use combine::{combine, stats, CombinedCorpus, CorpusStats};
pub use corpus::{
    detokenize, sentinel_encode, Line, ParallelCorpus, SchemeId, SchemeKind, SegmentedLine,
    SENTINEL,
};
pub use error::{Error, Result};
